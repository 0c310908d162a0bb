#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lightpath/agent/policy.hpp"
#include "lightpath/environment.hpp"

namespace lightpath::agent {

enum class LrScheduleKind { kConstant, kWarmupCosine };

struct PpoHyperparams {
  double gamma = 0.919;
  double gae_lambda = 0.984;
  double learning_rate = 1.943e-05;
  int update_epochs = 10;
  int rollout_length = 150;
  int num_envs = 100;
  std::int64_t total_timesteps = 200'000'000;
  int minibatches = 4;
  // Graphs per forward/backward pass inside a minibatch; gradients are
  // accumulated, so this only bounds memory.
  int micro_batch = 256;
  double clip_epsilon = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double max_grad_norm = 0.5;
  double adam_epsilon = 1e-5;
  bool action_masking = true;
  LrScheduleKind lr_schedule = LrScheduleKind::kWarmupCosine;
  double warmup_steps_fraction = 0.1;
  double warmup_peak_multiplier = 2.0;
  double warmup_end_fraction = 0.1;

  void Validate() const;
  // Rollout/update iterations: total_timesteps / (rollout_length * num_envs).
  std::int64_t NumUpdates() const;
  // Optimiser steps over the whole run; the LR schedule spans these.
  std::int64_t ScheduleSteps() const;
};

// Linear warmup from the base LR to peak_multiplier * base over the first
// warmup_steps_fraction of the schedule, then cosine decay to
// warmup_end_fraction * base at the final step.
double LearningRate(std::int64_t step, const PpoHyperparams& hp);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// done[t] marks that the transition at t ended its episode: no bootstrap
// across it. `last_value` bootstraps the step after the sequence.
GaeResult ComputeGae(std::span<const double> rewards, std::span<const double> values,
                     std::span<const std::uint8_t> done, double last_value, double gamma, double lambda);

struct Transition {
  GraphObservation observation;
  ActionMask mask;       // distribution support used when acting
  int action = -1;       // K*S cell index, -1 when no valid action existed
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  bool done = false;
};

// Rollout storage, env-major. Advantages exist only once every env has
// rollout_length transitions.
class TrajectoryBuffer {
 public:
  TrajectoryBuffer(int num_envs, int rollout_length);

  void Add(int env, Transition t);
  bool full() const;
  std::size_t size() const { return transitions_.size(); }
  int num_envs() const { return num_envs_; }
  int rollout_length() const { return rollout_length_; }

  void ComputeAdvantages(std::span<const double> last_values, double gamma, double lambda);
  bool has_advantages() const { return !advantages_.empty(); }

  const Transition& at(std::size_t i) const { return transitions_.at(i); }
  double advantage(std::size_t i) const { return advantages_.at(i); }
  double target(std::size_t i) const { return returns_.at(i); }

  void Clear();

 private:
  int num_envs_;
  int rollout_length_;
  std::vector<int> counts_;
  std::vector<Transition> transitions_;
  std::vector<double> advantages_;
  std::vector<double> returns_;
};

class Adam {
 public:
  explicit Adam(const ParameterStore& params, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-5);
  void Step(ParameterStore& params, double learning_rate);
  std::int64_t steps() const { return t_; }

 private:
  double beta1_;
  double beta2_;
  double epsilon_;
  std::int64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

struct PpoSample {
  int action = -1;
  double old_log_prob = 0.0;
  double advantage = 0.0;
  double target = 0.0;
  const ActionMask* mask = nullptr;
};

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double total = 0.0;
};

// Clipped surrogate + value_coef * 0.5 (V - target)^2 - entropy_coef * H,
// with policy terms averaged over `policy_count` samples that had an action
// and value terms over `sample_count`. Masked cells carry zero probability.
// Adds this chunk's contribution to `stats` if given.
Var PpoLoss(Tape& tape, Var scores, Var values, std::span<const PpoSample> samples, int k, int channels,
            const PpoHyperparams& hp, double policy_count, double sample_count, LossStats* stats = nullptr);

// Per-sample masked log-probability of the taken action and entropy.
struct PolicyTerms {
  double log_prob = 0.0;
  double entropy = 0.0;
};
PolicyTerms EvaluatePolicyTerms(ScoreRow scores, const ActionMask& mask, int action);

class NonFiniteLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UpdateDiagnostics {
  LossStats loss;  // averaged over minibatches
  double learning_rate = 0.0;
  double grad_norm = 0.0;
};

// update_epochs passes over shuffled minibatches; one optimiser step per
// minibatch. Throws NonFiniteLossError on a non-finite loss or gradient.
UpdateDiagnostics PpoUpdate(ActorCritic& agent, const PathTable& table, Adam& optimizer, const TrajectoryBuffer& buffer,
                            const PpoHyperparams& hp, std::int64_t& optimizer_step, std::mt19937_64& rng);

struct TrainingConfig {
  PpoHyperparams ppo;
  AgentConfig agent;
  int episode_length = 2000;
  std::uint64_t seed = 0;
};

struct UpdateLog {
  std::int64_t update = 0;
  std::int64_t env_steps = 0;
  // Accepted counts of episodes that ended during this update.
  std::vector<int> episode_accepted;
  double mean_accepted = 0.0;
  double std_accepted = 0.0;
  double mean_reward = 0.0;
  UpdateDiagnostics diagnostics;
};

// Synchronous PPO over num_envs independent environments: every env steps
// with the current parameters, then one update runs.
class PpoTrainer {
 public:
  PpoTrainer(std::shared_ptr<const PathTable> table, TrainingConfig config);

  UpdateLog Step();
  void Train(const std::function<void(const UpdateLog&)>& on_update, std::optional<std::int64_t> max_updates = std::nullopt);

  ActorCritic& agent() { return agent_; }
  const TrainingConfig& config() const { return config_; }
  std::int64_t updates_done() const { return update_; }

 private:
  EpisodeConfig EpisodeFor(int env) const;

  std::shared_ptr<const PathTable> table_;
  TrainingConfig config_;
  ActorCritic agent_;
  Adam optimizer_;
  std::vector<NetworkState> envs_;
  std::vector<std::int64_t> episode_counter_;
  std::vector<CounterRng> action_rng_;
  std::mt19937_64 shuffle_rng_;
  std::int64_t update_ = 0;
  std::int64_t optimizer_step_ = 0;
  std::int64_t env_steps_ = 0;
};

}  // namespace lightpath::agent
