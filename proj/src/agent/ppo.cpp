#include "lightpath/agent/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace lightpath::agent {

void PpoHyperparams::Validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in [0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw std::invalid_argument("gae_lambda must be in [0, 1]");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (update_epochs < 1 || rollout_length < 1 || num_envs < 1 || minibatches < 1 || micro_batch < 1) {
    throw std::invalid_argument("epochs, rollout length, envs, minibatches and micro-batch must be >= 1");
  }
  if (total_timesteps < 1) throw std::invalid_argument("total timesteps must be >= 1");
  if (static_cast<std::int64_t>(rollout_length) * num_envs < minibatches) {
    throw std::invalid_argument("fewer transitions per update than minibatches");
  }
  if (!(clip_epsilon > 0.0)) throw std::invalid_argument("clip epsilon must be positive");
  if (!(warmup_steps_fraction >= 0.0 && warmup_steps_fraction < 1.0)) {
    throw std::invalid_argument("warmup fraction must be in [0, 1)");
  }
  if (!(warmup_peak_multiplier > 0.0) || !(warmup_end_fraction >= 0.0)) {
    throw std::invalid_argument("bad warmup multipliers");
  }
}

std::int64_t PpoHyperparams::NumUpdates() const {
  const std::int64_t per_update = static_cast<std::int64_t>(rollout_length) * num_envs;
  return std::max<std::int64_t>(1, total_timesteps / per_update);
}

std::int64_t PpoHyperparams::ScheduleSteps() const { return NumUpdates() * update_epochs * minibatches; }

double LearningRate(std::int64_t step, const PpoHyperparams& hp) {
  const double base = hp.learning_rate;
  if (hp.lr_schedule == LrScheduleKind::kConstant) return base;
  const std::int64_t total = hp.ScheduleSteps();
  const auto warmup = static_cast<std::int64_t>(std::floor(hp.warmup_steps_fraction * static_cast<double>(total)));
  const double peak = base * hp.warmup_peak_multiplier;
  const double end = base * hp.warmup_end_fraction;
  step = std::clamp<std::int64_t>(step, 0, total - 1);
  if (step < warmup) return base + (peak - base) * static_cast<double>(step) / static_cast<double>(warmup);
  const std::int64_t decay = total - 1 - warmup;
  const double progress = decay > 0 ? static_cast<double>(step - warmup) / static_cast<double>(decay) : 1.0;
  return end + (peak - end) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

GaeResult ComputeGae(std::span<const double> rewards, std::span<const double> values,
                     std::span<const std::uint8_t> done, double last_value, double gamma, double lambda) {
  const std::size_t T = rewards.size();
  if (values.size() != T || done.size() != T) throw std::invalid_argument("ComputeGae: length mismatch");
  GaeResult out;
  out.advantages.assign(T, 0.0);
  out.returns.assign(T, 0.0);
  double running = 0.0;
  for (std::size_t i = T; i-- > 0;) {
    const double next_value = i + 1 < T ? values[i + 1] : last_value;
    const double live = done[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * live - values[i];
    running = delta + gamma * lambda * live * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

TrajectoryBuffer::TrajectoryBuffer(int num_envs, int rollout_length)
    : num_envs_(num_envs), rollout_length_(rollout_length), counts_(static_cast<std::size_t>(num_envs), 0) {
  if (num_envs < 1 || rollout_length < 1) throw std::invalid_argument("TrajectoryBuffer: bad shape");
  transitions_.resize(static_cast<std::size_t>(num_envs) * rollout_length);
}

void TrajectoryBuffer::Add(int env, Transition t) {
  int& n = counts_.at(static_cast<std::size_t>(env));
  if (n >= rollout_length_) throw std::logic_error("TrajectoryBuffer: env row is full");
  transitions_[static_cast<std::size_t>(env) * rollout_length_ + n] = std::move(t);
  ++n;
  advantages_.clear();
  returns_.clear();
}

bool TrajectoryBuffer::full() const {
  return std::all_of(counts_.begin(), counts_.end(), [&](int n) { return n == rollout_length_; });
}

void TrajectoryBuffer::ComputeAdvantages(std::span<const double> last_values, double gamma, double lambda) {
  if (!full()) throw std::logic_error("TrajectoryBuffer: rollout incomplete");
  if (last_values.size() != static_cast<std::size_t>(num_envs_)) throw std::invalid_argument("one bootstrap value per env");
  advantages_.assign(transitions_.size(), 0.0);
  returns_.assign(transitions_.size(), 0.0);
  std::vector<double> rewards(static_cast<std::size_t>(rollout_length_));
  std::vector<double> values(rewards.size());
  std::vector<std::uint8_t> done(rewards.size());
  for (int e = 0; e < num_envs_; ++e) {
    const std::size_t base = static_cast<std::size_t>(e) * rollout_length_;
    for (int t = 0; t < rollout_length_; ++t) {
      const Transition& tr = transitions_[base + t];
      rewards[t] = tr.reward;
      values[t] = tr.value;
      done[t] = tr.done ? 1 : 0;
    }
    const GaeResult gae = ComputeGae(rewards, values, done, last_values[static_cast<std::size_t>(e)], gamma, lambda);
    std::copy(gae.advantages.begin(), gae.advantages.end(), advantages_.begin() + static_cast<std::ptrdiff_t>(base));
    std::copy(gae.returns.begin(), gae.returns.end(), returns_.begin() + static_cast<std::ptrdiff_t>(base));
  }
}

void TrajectoryBuffer::Clear() {
  std::fill(counts_.begin(), counts_.end(), 0);
  advantages_.clear();
  returns_.clear();
}

Adam::Adam(const ParameterStore& params, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  for (const Parameter& p : params) {
    m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

void Adam::Step(ParameterStore& params, double learning_rate) {
  if (params.size() != m_.size()) throw std::logic_error("Adam: parameter count changed");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  std::size_t i = 0;
  for (Parameter& p : params) {
    Matrix& m = m_[i];
    Matrix& v = v_[i];
    ++i;
    m = beta1_ * m + (1.0 - beta1_) * p.grad;
    v = beta2_ * v + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon_);
  }
}

namespace {

// Masked log-softmax pieces for one sample: probabilities and log
// probabilities of the valid cells, zero elsewhere.
struct SoftmaxRow {
  std::vector<double> prob;
  std::vector<double> log_prob;
  double entropy = 0.0;
};

SoftmaxRow MaskedLogSoftmax(ScoreRow scores, const ActionMask& mask) {
  const int S = mask.channels();
  SoftmaxRow row;
  row.prob.assign(scores.size(), 0.0);
  row.log_prob.assign(scores.size(), 0.0);
  double max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask(static_cast<int>(i) / S, static_cast<int>(i) % S)) max = std::max(max, scores[i]);
  }
  if (!std::isfinite(max)) throw std::invalid_argument("masked softmax over an empty mask");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask(static_cast<int>(i) / S, static_cast<int>(i) % S)) total += std::exp(scores[i] - max);
  }
  const double log_total = std::log(total) + max;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!mask(static_cast<int>(i) / S, static_cast<int>(i) % S)) continue;
    row.log_prob[i] = scores[i] - log_total;
    row.prob[i] = std::exp(row.log_prob[i]);
    row.entropy -= row.prob[i] * row.log_prob[i];
  }
  return row;
}

}  // namespace

PolicyTerms EvaluatePolicyTerms(ScoreRow scores, const ActionMask& mask, int action) {
  const SoftmaxRow row = MaskedLogSoftmax(scores, mask);
  PolicyTerms t;
  t.entropy = row.entropy;
  if (action >= 0) {
    if (row.prob.at(static_cast<std::size_t>(action)) <= 0.0) throw std::invalid_argument("action outside the mask");
    t.log_prob = row.log_prob[static_cast<std::size_t>(action)];
  }
  return t;
}

Var PpoLoss(Tape& tape, Var scores, Var values, std::span<const PpoSample> samples, int k, int channels,
            const PpoHyperparams& hp, double policy_count, double sample_count, LossStats* stats) {
  const Matrix& s = tape.value(scores);
  const Matrix& v = tape.value(values);
  const int cells = k * channels;
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (s.rows() != n * k || s.cols() != channels || v.rows() != n || v.cols() != 1) {
    throw std::invalid_argument("PpoLoss: head shapes do not match the samples");
  }
  if (!(sample_count > 0.0)) throw std::invalid_argument("PpoLoss: sample count must be positive");

  // Loss and its gradient are computed together; backward only rescales.
  Matrix score_grad = Matrix::Zero(s.rows(), s.cols());
  Matrix value_grad = Matrix::Zero(v.rows(), 1);
  LossStats local;
  for (Eigen::Index g = 0; g < n; ++g) {
    const PpoSample& sample = samples[static_cast<std::size_t>(g)];
    const double value_error = v(g, 0) - sample.target;
    local.value_loss += 0.5 * value_error * value_error / sample_count;
    value_grad(g, 0) = hp.value_coef * value_error / sample_count;

    if (sample.action < 0) continue;
    if (sample.mask == nullptr) throw std::invalid_argument("PpoLoss: policy sample without a mask");
    const ScoreRow row_scores(s.data() + g * cells, static_cast<std::size_t>(cells));
    const SoftmaxRow row = MaskedLogSoftmax(row_scores, *sample.mask);
    const auto a = static_cast<std::size_t>(sample.action);
    if (row.prob.at(a) <= 0.0) throw std::invalid_argument("PpoLoss: action outside the mask");

    const double log_ratio = row.log_prob[a] - sample.old_log_prob;
    const double ratio = std::exp(log_ratio);
    const double A = sample.advantage;
    const double clipped = std::clamp(ratio, 1.0 - hp.clip_epsilon, 1.0 + hp.clip_epsilon);
    const double unclipped_term = ratio * A;
    const double clipped_term = clipped * A;
    // d(-min(rA, clip(r)A))/d log_prob; zero when the clipped branch is active.
    const double d_logp = unclipped_term <= clipped_term ? -unclipped_term : 0.0;
    local.policy_loss += -std::min(unclipped_term, clipped_term) / policy_count;
    local.entropy += row.entropy / policy_count;
    local.approx_kl += ((ratio - 1.0) - log_ratio) / policy_count;
    if (std::abs(ratio - 1.0) > hp.clip_epsilon) local.clip_fraction += 1.0 / policy_count;

    double* grad = score_grad.data() + g * cells;
    for (std::size_t i = 0; i < static_cast<std::size_t>(cells); ++i) {
      if (row.prob[i] <= 0.0 && i != a) continue;
      const double p = row.prob[i];
      const double dlogp_di = (i == a ? 1.0 : 0.0) - p;
      const double dentropy_di = -p * (row.log_prob[i] + row.entropy);
      grad[i] = (d_logp * dlogp_di - hp.entropy_coef * dentropy_di) / policy_count;
    }
  }
  local.total = local.policy_loss + hp.value_coef * local.value_loss - hp.entropy_coef * local.entropy;
  if (stats != nullptr) {
    stats->policy_loss += local.policy_loss;
    stats->value_loss += local.value_loss;
    stats->entropy += local.entropy;
    stats->clip_fraction += local.clip_fraction;
    stats->approx_kl += local.approx_kl;
    stats->total += local.total;
  }

  Matrix out(1, 1);
  out(0, 0) = local.total;
  return tape.Record(std::move(out), {scores, values},
                     [scores, values, sg = std::move(score_grad), vg = std::move(value_grad)](Tape& t, const Matrix& g) {
                       const double up = g(0, 0);
                       t.Accumulate(scores, sg * up);
                       t.Accumulate(values, vg * up);
                     });
}

UpdateDiagnostics PpoUpdate(ActorCritic& agent, const PathTable& table, Adam& optimizer, const TrajectoryBuffer& buffer,
                            const PpoHyperparams& hp, std::int64_t& optimizer_step, std::mt19937_64& rng) {
  if (!buffer.has_advantages()) throw std::logic_error("PpoUpdate: advantages not computed");
  const std::size_t total = buffer.size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t mb_count = static_cast<std::size_t>(hp.minibatches);

  UpdateDiagnostics diag;
  int steps = 0;
  for (int epoch = 0; epoch < hp.update_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t mb = 0; mb < mb_count; ++mb) {
      const std::size_t begin = total * mb / mb_count;
      const std::size_t end = total * (mb + 1) / mb_count;
      if (begin == end) continue;

      // Advantage normalisation over the minibatch's policy samples.
      double sum = 0.0;
      double sq = 0.0;
      double policy_count = 0.0;
      for (std::size_t j = begin; j < end; ++j) {
        const std::size_t i = order[j];
        if (buffer.at(i).action < 0) continue;
        sum += buffer.advantage(i);
        sq += buffer.advantage(i) * buffer.advantage(i);
        policy_count += 1.0;
      }
      const double mean = policy_count > 0 ? sum / policy_count : 0.0;
      const double var = policy_count > 0 ? std::max(0.0, sq / policy_count - mean * mean) : 0.0;
      const double scale = 1.0 / (std::sqrt(var) + 1e-8);

      agent.params().ZeroGrad();
      LossStats stats;
      for (std::size_t chunk = begin; chunk < end; chunk += static_cast<std::size_t>(hp.micro_batch)) {
        const std::size_t chunk_end = std::min(end, chunk + static_cast<std::size_t>(hp.micro_batch));
        std::vector<const GraphObservation*> obs;
        std::vector<PpoSample> samples;
        for (std::size_t j = chunk; j < chunk_end; ++j) {
          const std::size_t i = order[j];
          const Transition& tr = buffer.at(i);
          obs.push_back(&tr.observation);
          PpoSample s;
          s.action = tr.action;
          s.old_log_prob = tr.log_prob;
          s.advantage = (buffer.advantage(i) - mean) * scale;
          s.target = buffer.target(i);
          s.mask = &tr.mask;
          samples.push_back(s);
        }
        const GraphBatch batch = BuildGraphBatch(table, obs);
        Tape tape;
        const ActorCritic::Heads heads = agent.Forward(tape, batch);
        const Var loss = PpoLoss(tape, heads.scores, heads.values, samples, agent.k(), agent.channels(), hp,
                                 std::max(policy_count, 1.0), static_cast<double>(end - begin), &stats);
        tape.Backward(loss);
      }
      if (!std::isfinite(stats.total)) throw NonFiniteLossError("non-finite PPO loss");
      const double norm = agent.params().GradNorm();
      if (!std::isfinite(norm)) throw NonFiniteLossError("non-finite gradient");
      if (norm > hp.max_grad_norm) agent.params().ScaleGrad(hp.max_grad_norm / norm);
      const double lr = LearningRate(optimizer_step, hp);
      optimizer.Step(agent.params(), lr);
      ++optimizer_step;
      if (!agent.params().AllFinite()) throw NonFiniteLossError("non-finite parameters after update");

      diag.loss.policy_loss += stats.policy_loss;
      diag.loss.value_loss += stats.value_loss;
      diag.loss.entropy += stats.entropy;
      diag.loss.clip_fraction += stats.clip_fraction;
      diag.loss.approx_kl += stats.approx_kl;
      diag.loss.total += stats.total;
      diag.grad_norm += norm;
      diag.learning_rate = lr;
      ++steps;
    }
  }
  if (steps > 0) {
    const double inv = 1.0 / steps;
    diag.loss.policy_loss *= inv;
    diag.loss.value_loss *= inv;
    diag.loss.entropy *= inv;
    diag.loss.clip_fraction *= inv;
    diag.loss.approx_kl *= inv;
    diag.loss.total *= inv;
    diag.grad_norm *= inv;
  }
  return diag;
}

PpoTrainer::PpoTrainer(std::shared_ptr<const PathTable> table, TrainingConfig config)
    : table_(std::move(table)),
      config_(std::move(config)),
      agent_(*table_, config_.agent, CounterRng::Mix(config_.seed ^ 0x5eedULL)),
      optimizer_(agent_.params(), 0.9, 0.999, config_.ppo.adam_epsilon),
      shuffle_rng_(CounterRng::Mix(config_.seed ^ 0x50ff1eULL)) {
  config_.ppo.Validate();
  if (config_.episode_length < 1) throw std::invalid_argument("episode length must be >= 1");
  const int n = config_.ppo.num_envs;
  episode_counter_.assign(static_cast<std::size_t>(n), 0);
  for (int e = 0; e < n; ++e) {
    envs_.emplace_back(table_, EpisodeFor(e));
    action_rng_.emplace_back(CounterRng::Mix(config_.seed + 0xAC710000ULL + static_cast<std::uint64_t>(e)));
  }
}

EpisodeConfig PpoTrainer::EpisodeFor(int env) const {
  EpisodeConfig ec;
  ec.request_count = config_.episode_length;
  ec.termination = Termination::kFixedLength;
  const std::uint64_t stream = CounterRng::Mix(config_.seed * 0x100000001B3ULL + static_cast<std::uint64_t>(env));
  ec.seed = CounterRng::Mix(stream + static_cast<std::uint64_t>(episode_counter_[static_cast<std::size_t>(env)]));
  return ec;
}

UpdateLog PpoTrainer::Step() {
  const PpoHyperparams& hp = config_.ppo;
  const int n = hp.num_envs;
  const int k = table_->k();
  const int S = table_->channel_count();
  TrajectoryBuffer buffer(n, hp.rollout_length);
  UpdateLog log;
  double reward_sum = 0.0;

  std::vector<GraphObservation> obs(static_cast<std::size_t>(n));
  std::vector<ActionMask> masks(static_cast<std::size_t>(n), ActionMask(k, S));
  std::vector<const GraphObservation*> obs_ptr(static_cast<std::size_t>(n));
  std::vector<const ActionMask*> mask_ptr(static_cast<std::size_t>(n));
  std::vector<double> uniforms(static_cast<std::size_t>(n));
  ActionMask all_valid(k, S);
  for (int r = 0; r < k; ++r) all_valid.row(r).set();

  auto observe = [&] {
    for (int e = 0; e < n; ++e) {
      const auto i = static_cast<std::size_t>(e);
      obs[i] = EncodeObservation(envs_[i], config_.agent.observation);
      if (hp.action_masking) {
        ComputeActionMask(envs_[i], masks[i]);
      } else {
        // Only the request's own candidate paths exist.
        masks[i] = all_valid;
        const int paths = static_cast<int>(table_->path_count(obs[i].pair));
        for (int r = paths; r < k; ++r) masks[i].row(r).reset();
      }
      obs_ptr[i] = &obs[i];
      mask_ptr[i] = &masks[i];
    }
  };

  for (int t = 0; t < hp.rollout_length; ++t) {
    observe();
    for (int e = 0; e < n; ++e) uniforms[static_cast<std::size_t>(e)] = action_rng_[static_cast<std::size_t>(e)].Uniform();
    const auto decisions = agent_.Act(*table_, obs_ptr, mask_ptr, ActorCritic::Mode::kSample, uniforms);
    for (int e = 0; e < n; ++e) {
      const auto i = static_cast<std::size_t>(e);
      const ActorCritic::Decision& d = decisions[i];
      NetworkState& env = envs_[i];
      const StepResult result = d.action ? ApplyAction(env, *d.action) : RejectRequest(env);
      Transition tr;
      tr.observation = std::move(obs[i]);
      tr.mask = masks[i];
      tr.action = d.index;
      tr.log_prob = d.log_prob;
      tr.value = d.value;
      tr.reward = result.reward;
      tr.done = IsTerminated(env);
      reward_sum += result.reward;
      if (tr.done) {
        log.episode_accepted.push_back(env.accepted());
        ++episode_counter_[i];
        env = NetworkState(table_, EpisodeFor(e));
      }
      buffer.Add(e, std::move(tr));
    }
    env_steps_ += n;
  }

  observe();
  const auto tail = agent_.Act(*table_, obs_ptr, mask_ptr, ActorCritic::Mode::kGreedy);
  std::vector<double> last_values(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) last_values[static_cast<std::size_t>(e)] = tail[static_cast<std::size_t>(e)].value;
  buffer.ComputeAdvantages(last_values, hp.gamma, hp.gae_lambda);

  log.diagnostics = PpoUpdate(agent_, *table_, optimizer_, buffer, hp, optimizer_step_, shuffle_rng_);
  ++update_;
  log.update = update_;
  log.env_steps = env_steps_;
  log.mean_reward = reward_sum / (static_cast<double>(n) * hp.rollout_length);
  if (!log.episode_accepted.empty()) {
    double sum = 0.0;
    for (int a : log.episode_accepted) sum += a;
    log.mean_accepted = sum / static_cast<double>(log.episode_accepted.size());
    double var = 0.0;
    for (int a : log.episode_accepted) var += (a - log.mean_accepted) * (a - log.mean_accepted);
    log.std_accepted = std::sqrt(var / static_cast<double>(log.episode_accepted.size()));
  }
  return log;
}

void PpoTrainer::Train(const std::function<void(const UpdateLog&)>& on_update, std::optional<std::int64_t> max_updates) {
  std::int64_t updates = config_.ppo.NumUpdates();
  if (max_updates) updates = std::min(updates, *max_updates);
  while (update_ < updates) {
    const UpdateLog log = Step();
    if (on_update) on_update(log);
  }
}

}  // namespace lightpath::agent
