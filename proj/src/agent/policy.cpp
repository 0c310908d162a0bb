#include "lightpath/agent/policy.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace lightpath::agent {

std::vector<double> MaskedSoftmax(ScoreRow scores, const ActionMask& mask) {
  const int S = mask.channels();
  if (scores.size() != static_cast<std::size_t>(mask.k() * S)) throw std::invalid_argument("MaskedSoftmax: size mismatch");
  double max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask(static_cast<int>(i) / S, static_cast<int>(i) % S)) max = std::max(max, scores[i]);
  }
  if (!std::isfinite(max)) throw std::invalid_argument("MaskedSoftmax: no valid action");
  std::vector<double> probs(scores.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask(static_cast<int>(i) / S, static_cast<int>(i) % S)) {
      probs[i] = std::exp(scores[i] - max);
      total += probs[i];
    }
  }
  for (double& p : probs) p /= total;
  return probs;
}

int GreedyIndex(std::span<const double> probs) {
  int best = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0 && (best < 0 || probs[i] > probs[static_cast<std::size_t>(best)])) best = static_cast<int>(i);
  }
  return best;
}

int SampleIndex(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = static_cast<int>(i);
    cumulative += probs[i];
    if (u < cumulative) return last;
  }
  // Rounding left u above the final cumulative sum.
  return last;
}

ActorCritic::ActorCritic(const PathTable& table, const AgentConfig& config, std::uint64_t seed)
    : config_(config), k_(table.k()), channels_(table.channel_count()) {
  std::mt19937_64 rng(seed);
  gat_config_.node_features = NodeFeatureCount();
  gat_config_.edge_features = EdgeFeatureCount(channels_, config.observation);
  gat_config_.global_features = GlobalFeatureCount(static_cast<int>(table.topology().node_count()));
  gat_config_.latent = config.latent;
  gat_config_.message_passing_steps = config.message_passing_steps;
  gat_config_.mlp_layers = config.mlp_layers;

  policy_gat_ = GatNetwork(gat_config_, params_, "policy", rng);
  if (!config.share_gnn) value_gat_ = GatNetwork(gat_config_, params_, "value", rng);
  policy_head_ = Linear(params_, "policy/head", config.latent, channels_, rng, 0.01);
  value_mlp_ = Mlp(params_, "value/readout_mlp", 2 * config.latent, config.latent, config.mlp_layers, rng);
  value_head_ = Linear(params_, "value/head", config.latent, 1, rng);
}

Var ActorCritic::PolicyReadout(Tape& tape, Var edge_scores, const GraphBatch& batch) {
  return MapRows(tape, edge_scores, batch.path_from_edges);
}

Var ActorCritic::ValueReadout(Tape& tape, Var node_latent, Var global_latent, const GraphBatch& batch) {
  const Var pooled = MapRows(tape, node_latent, batch.graph_node_mean);
  const Var hidden = value_mlp_(tape, params_, ConcatCols(tape, {pooled, global_latent}));
  return value_head_(tape, params_, hidden);
}

ActorCritic::Heads ActorCritic::Forward(Tape& tape, const GraphBatch& batch) {
  Heads heads;
  heads.policy_gat = policy_gat_.Forward(tape, params_, batch);
  heads.value_gat = config_.share_gnn ? heads.policy_gat : value_gat_.Forward(tape, params_, batch);
  heads.scores = PolicyReadout(tape, policy_head_(tape, params_, heads.policy_gat.edge), batch);
  heads.values = ValueReadout(tape, heads.value_gat.node, heads.value_gat.global, batch);
  return heads;
}

std::vector<ActorCritic::Decision> ActorCritic::Act(const PathTable& table,
                                                    std::span<const GraphObservation* const> observations,
                                                    std::span<const ActionMask* const> masks, Mode mode,
                                                    std::span<const double> uniforms) {
  if (observations.size() != masks.size()) throw std::invalid_argument("Act: observation/mask count mismatch");
  if (mode == Mode::kSample && uniforms.size() != observations.size()) {
    throw std::invalid_argument("Act: sampling needs one uniform per graph");
  }
  const GraphBatch batch = BuildGraphBatch(table, observations);
  Tape tape(/*record_grad=*/false);
  const Heads heads = Forward(tape, batch);
  const Matrix& scores = tape.value(heads.scores);
  const Matrix& values = tape.value(heads.values);
  const int cells = k_ * channels_;

  std::vector<Decision> out(observations.size());
  for (std::size_t g = 0; g < observations.size(); ++g) {
    Decision& d = out[g];
    d.value = values(static_cast<Eigen::Index>(g), 0);
    if (!masks[g]->any()) continue;
    const ScoreRow row(scores.data() + g * static_cast<std::size_t>(cells), static_cast<std::size_t>(cells));
    const auto probs = MaskedSoftmax(row, *masks[g]);
    d.index = mode == Mode::kGreedy ? GreedyIndex(probs) : SampleIndex(probs, uniforms[g]);
    d.log_prob = std::log(probs[static_cast<std::size_t>(d.index)]);
    d.action = IndexToAction(d.index, channels_);
  }
  return out;
}

}  // namespace lightpath::agent
