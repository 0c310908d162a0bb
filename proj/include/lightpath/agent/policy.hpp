#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lightpath/agent/gat.hpp"
#include "lightpath/agent/observation.hpp"
#include "lightpath/environment.hpp"

namespace lightpath::agent {

struct AgentConfig {
  int latent = 128;
  int message_passing_steps = 3;
  int mlp_layers = 2;
  ObservationConfig observation;
  // Value head reads the policy GAT instead of its own.
  bool share_gnn = false;
};

// Scores for one graph are K*S values, row-major over (path, channel).
using ScoreRow = std::span<const double>;

// Masked softmax over one sample's K*S scores: masked cells get exactly zero
// probability. Throws std::invalid_argument when the mask is all-false.
std::vector<double> MaskedSoftmax(ScoreRow scores, const ActionMask& mask);

// Highest-probability cell, lowest index on ties.
int GreedyIndex(std::span<const double> probs);
// Inverse-CDF draw with u in [0, 1); zero-probability cells are never chosen.
int SampleIndex(std::span<const double> probs, double u);

inline Action IndexToAction(int index, int channels) { return Action{index / channels, index % channels}; }
inline int ActionToIndex(Action a, int channels) { return a.path * channels + a.channel; }

// Graph-attention actor-critic. The policy projects final edge latents to S
// channel scores, averages them along each candidate path to form the K x S
// grid. The value head mean-pools node latents, appends the global latent and
// maps to a scalar through an MLP.
class ActorCritic {
 public:
  ActorCritic(const PathTable& table, const AgentConfig& config, std::uint64_t seed);

  struct Heads {
    Var scores;  // graphs*K x S
    Var values;  // graphs x 1
    GatOutput policy_gat;
    GatOutput value_gat;
  };
  Heads Forward(Tape& tape, const GraphBatch& batch);

  // Policy readout: per-path mean of per-edge channel scores.
  static Var PolicyReadout(Tape& tape, Var edge_scores, const GraphBatch& batch);
  Var ValueReadout(Tape& tape, Var node_latent, Var global_latent, const GraphBatch& batch);

  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const AgentConfig& config() const { return config_; }
  const GatConfig& gat_config() const { return gat_config_; }
  int k() const { return k_; }
  int channels() const { return channels_; }

  std::size_t policy_head_weight() const { return policy_head_.weight(); }
  std::size_t policy_head_bias() const { return policy_head_.bias(); }
  std::size_t value_head_weight() const { return value_head_.weight(); }
  std::size_t value_head_bias() const { return value_head_.bias(); }

  struct Decision {
    std::optional<Action> action;  // nullopt when the mask is all-false
    int index = -1;
    double log_prob = 0.0;
    double value = 0.0;
  };
  enum class Mode { kGreedy, kSample };
  // One batched inference pass. `uniforms` supplies one draw per graph in
  // kSample mode.
  std::vector<Decision> Act(const PathTable& table, std::span<const GraphObservation* const> observations,
                            std::span<const ActionMask* const> masks, Mode mode, std::span<const double> uniforms = {});

 private:
  AgentConfig config_;
  GatConfig gat_config_;
  int k_;
  int channels_;
  ParameterStore params_;
  GatNetwork policy_gat_;
  GatNetwork value_gat_;
  Linear policy_head_;
  Mlp value_mlp_;
  Linear value_head_;
};

}  // namespace lightpath::agent
