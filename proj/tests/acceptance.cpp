// Acceptance suite: one PASS/FAIL line per criterion. Exit status reflects
// the gated criteria only; conditional and documented ones are reported.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "lightpath/agent/gat.hpp"
#include "lightpath/agent/observation.hpp"
#include "lightpath/agent/policy.hpp"
#include "lightpath/agent/ppo.hpp"
#include "lightpath/harness/episode.hpp"
#include "lightpath/harness/setup.hpp"
#include "lightpath/harness/stats.hpp"
#include "lightpath/harness/sweep.hpp"
#include "lightpath/heuristics.hpp"
#include "test_util.hpp"

namespace lightpath {
namespace {

using agent::ActorCritic;
using harness::HeuristicPolicy;

enum class Gate { kGated, kConditional, kDocumented };

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

std::vector<std::uint64_t> Seeds(int n) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

NetworkState PlayRandom(std::shared_ptr<const PathTable> table, std::uint64_t seed, int steps) {
  NetworkState state(table, EpisodeConfig{steps + 1, Termination::kFixedLength, seed});
  CounterRng rng(seed + 99);
  for (int i = 0; i < steps; ++i) {
    const ActionMask mask = ComputeActionMask(state);
    std::vector<Action> valid;
    for (int k = 0; k < mask.k(); ++k) {
      for (int s = 0; s < mask.channels(); ++s) {
        if (mask(k, s)) valid.push_back({k, s});
      }
    }
    valid.empty() ? RejectRequest(state) : ApplyAction(state, valid[rng.Below(valid.size())]);
  }
  return state;
}

// 1
Verdict MaskOracle() {
  const std::vector<std::shared_ptr<const PathTable>> tables = {
      testing::MakeTable(testing::Triangle(), 2, 3),
      testing::MakeTable(testing::House(), 3, 5),
      testing::MakeTable(testing::Ring(6), 2, 4, 0.0005),
      harness::BuildLab({"ring5", "", 2, PathOrdering::kHops, 4, 100}).table,
  };
  std::mt19937_64 rng(1);
  int states = 0;
  int cells = 0;
  int mismatches = 0;
  for (const auto& table : tables) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      NetworkState state(table, EpisodeConfig{100, Termination::kFixedLength, seed});
      while (!IsTerminated(state)) {
        const ActionMask mask = ComputeActionMask(state);
        for (int p = 0; p < mask.k(); ++p) {
          for (int s = 0; s < mask.channels(); ++s) {
            const bool oracle = ClassifyAction(state, {p, s}).kind != ActionKind::kInvalid;
            mismatches += oracle != mask(p, s);
            ++cells;
          }
        }
        ++states;
        std::uniform_int_distribution<int> pk(0, mask.k() - 1);
        std::uniform_int_distribution<int> sc(0, mask.channels() - 1);
        Action a{pk(rng), sc(rng)};
        if (mask.any() && rng() % 4 != 0) {
          while (!mask(a.path, a.channel)) a = {pk(rng), sc(rng)};
        }
        ApplyAction(state, a);
      }
    }
  }
  return {mismatches == 0 && states >= 1000,
          Fmt("%d states on %zu topologies, %d cells, %d mismatches", states, tables.size(), cells, mismatches)};
}

// 2 and 3 share one NSFNET KSP-FF episode.
std::pair<Verdict, Verdict> NsfnetSweep() {
  const auto table = harness::BuildLab({}).table;
  NetworkState state(table, EpisodeConfig{10000, Termination::kFixedLength, 0});
  const std::size_t links = table->topology().link_count();
  std::vector<LightpathId> before(links * static_cast<std::size_t>(state.channels()));
  int steps = 0;
  int invariant_failures = 0;
  int monotone_failures = 0;
  int count_failures = 0;
  int heuristic_failures = 0;
  std::string first_error;
  while (!IsTerminated(state)) {
    for (LinkId l = 0; l < links; ++l) {
      for (int s = 0; s < state.channels(); ++s) before[l * state.channels() + s] = state.occupancy(l, s);
    }
    const ActionMask mask = ComputeActionMask(state);
    for (HeuristicKind kind : {HeuristicKind::kKspFf, HeuristicKind::kFfKsp}) {
      const auto a = RunHeuristic(kind, mask);
      if (a.has_value() != mask.any()) ++heuristic_failures;
      if (a && ClassifyAction(state, *a).kind == ActionKind::kInvalid) ++heuristic_failures;
    }
    const auto a = KspFf(mask);
    a ? ApplyAction(state, *a) : RejectRequest(state);
    ++steps;
    if (const auto v = CheckInvariants(state)) {
      if (first_error.empty()) first_error = *v;
      ++invariant_failures;
    }
    if (state.accepted() + state.blocked() != steps || state.processed() != steps) ++count_failures;
    for (LinkId l = 0; l < links; ++l) {
      for (int s = 0; s < state.channels(); ++s) {
        const LightpathId was = before[l * state.channels() + s];
        if (was != kFreeChannel && state.occupancy(l, s) != was) ++monotone_failures;
      }
    }
  }
  Verdict conservation{steps == 10000 && invariant_failures + monotone_failures + count_failures == 0,
                       Fmt("%d steps, %d accepted, invariant/count/monotone failures %d/%d/%d", steps, state.accepted(),
                           invariant_failures, count_failures, monotone_failures)};
  if (!first_error.empty()) conservation.detail += " (" + first_error + ")";
  Verdict completeness{heuristic_failures == 0,
                       Fmt("%d steps x 2 heuristics, %d block/mask or validity disagreements", steps, heuristic_failures)};
  return {conservation, completeness};
}

// 4
Verdict KOneEquivalence() {
  const auto table = harness::BuildLab({"nsfnet_deeprmsa", "", 1}).table;
  int disagreements = 0;
  long steps = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    NetworkState a(table, EpisodeConfig{25000, Termination::kFixedLength, seed});
    NetworkState b(table, EpisodeConfig{25000, Termination::kFixedLength, seed});
    while (!IsTerminated(a)) {
      const auto x = KspFf(ComputeActionMask(a));
      const auto y = FfKsp(ComputeActionMask(b));
      disagreements += x != y;
      x ? ApplyAction(a, *x) : RejectRequest(a);
      y ? ApplyAction(b, *y) : RejectRequest(b);
      ++steps;
    }
    disagreements += a.accepted() != b.accepted();
  }
  harness::SweepSpec spec;
  const harness::Lab lab = harness::BuildLab({"nsfnet_deeprmsa", "", 1});
  spec.topology = lab.topology;
  spec.nsr = lab.nsr;
  spec.transmission = lab.transmission;
  spec.methods = {HeuristicKind::kKspFf, HeuristicKind::kFfKsp};
  spec.k_values = {1};
  spec.orderings = {PathOrdering::kHops};
  spec.lengths = {{0}, {10000}, {15000}, {20000}, {25000}};
  spec.seeds = Seeds(100);
  const auto rows = harness::RunSweep(spec);
  const std::size_t half = rows.size() / 2;
  int row_mismatches = 0;
  for (std::size_t i = 0; i < half; ++i) {
    row_mismatches += rows[i].accepted != rows[half + i].accepted || rows[i].blocked != rows[half + i].blocked;
  }
  std::string means;
  for (const auto& [key, s] : harness::SummarizeSweep(rows)) {
    if (key.method == "ksp_ff") means += Fmt(" %.0f", s.mean);
  }
  return {disagreements == 0 && row_mismatches == 0,
          Fmt("%ld paired steps, %d action disagreements; 100-seed K=1 cells identical (%d mismatches), means", steps,
              disagreements, row_mismatches) +
              means + " vs reference 4309 6797 7830 8568 9191"};
}

// 5
Verdict CapacityChecks() {
  const TransmissionConfig cfg;
  const double unit = CapacityFromNsr(1.0, cfg);
  const auto table = harness::BuildLab({}).table;
  const harness::Lab lab = harness::BuildLab({});
  int monotone_failures = 0;
  int order_failures = 0;
  int checked = 0;
  std::mt19937_64 rng(5);
  for (PairIndex p = 0; p < table->pair_count(); ++p) {
    for (const CandidatePath& path : table->paths(p)) {
      std::vector<LinkId> links = path.links;
      double previous = std::numeric_limits<double>::infinity();
      for (std::size_t n = 1; n <= links.size(); ++n) {
        const double c = PathCapacity(table->topology(), std::span(links).first(n), lab.nsr, cfg);
        monotone_failures += !(c < previous);
        previous = c;
      }
      std::shuffle(links.begin(), links.end(), rng);
      order_failures += std::abs(PathCapacity(table->topology(), links, lab.nsr, cfg) - path.capacity_gbps) > 1e-9 * path.capacity_gbps;
      ++checked;
    }
  }
  return {unit == 200.0 && monotone_failures == 0 && order_failures == 0,
          Fmt("sum NSR 1 -> %.6f Gbps; %d NSFNET paths: %d extension and %d order failures", unit, checked,
              monotone_failures, order_failures)};
}

agent::AgentConfig SmallAgent(int latent) {
  agent::AgentConfig c;
  c.latent = latent;
  c.message_passing_steps = 2;
  c.mlp_layers = 2;
  return c;
}

// 6
Verdict GaeAndGradients() {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution boundary(0.05);
  double gae_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int T = 150;
    std::vector<double> r(T), v(T);
    std::vector<std::uint8_t> d(T);
    for (int t = 0; t < T; ++t) {
      r[t] = normal(rng);
      v[t] = normal(rng);
      d[t] = boundary(rng);
    }
    const double last = normal(rng);
    const double gamma = 0.919, lambda = 0.984;
    const auto g = agent::ComputeGae(r, v, d, last, gamma, lambda);
    for (int t = 0; t < T; ++t) {
      double adv = 0.0, weight = 1.0;
      for (int l = t; l < T; ++l) {
        const double next = l + 1 < T ? v[l + 1] : last;
        adv += weight * (r[l] + (d[l] ? 0.0 : gamma * next) - v[l]);
        if (d[l]) break;
        weight *= gamma * lambda;
      }
      gae_err = std::max({gae_err, std::abs(g.advantages[t] - adv), std::abs(g.returns[t] - adv - v[t])});
    }
  }

  const auto table = testing::MakeTable(testing::Triangle(), 2, 3);
  ActorCritic net(*table, SmallAgent(4), 31);
  net.params().at(net.policy_head_weight()).value *= 100.0;
  std::vector<NetworkState> states;
  std::vector<agent::GraphObservation> obs;
  std::vector<ActionMask> masks;
  for (int i = 0; i < 8; ++i) {
    states.push_back(PlayRandom(table, 100 + i, 2 + i));
    obs.push_back(agent::EncodeObservation(states.back(), net.config().observation));
    masks.push_back(ComputeActionMask(states.back()));
  }
  std::vector<const agent::GraphObservation*> op;
  std::vector<const ActionMask*> mp;
  std::vector<double> u;
  CounterRng ur(5);
  for (int i = 0; i < 8; ++i) {
    op.push_back(&obs[i]);
    mp.push_back(&masks[i]);
    u.push_back(ur.Uniform());
  }
  const auto decisions = net.Act(*table, op, mp, ActorCritic::Mode::kSample, u);
  std::vector<agent::PpoSample> samples;
  double policy_count = 0;
  for (int i = 0; i < 8; ++i) {
    agent::PpoSample s;
    s.action = decisions[i].index;
    s.old_log_prob = decisions[i].log_prob + 0.4 * normal(rng);
    s.advantage = normal(rng);
    s.target = normal(rng);
    s.mask = &masks[i];
    policy_count += s.action >= 0;
    samples.push_back(s);
  }
  const agent::GraphBatch batch = agent::BuildGraphBatch(*table, op);
  const agent::PpoHyperparams hp;
  auto loss = [&](bool backward) {
    agent::Tape tape(backward);
    const auto heads = net.Forward(tape, batch);
    const agent::Var l = agent::PpoLoss(tape, heads.scores, heads.values, samples, 2, 3, hp,
                                        std::max(1.0, policy_count), 8.0);
    if (backward) tape.Backward(l);
    return tape.value(l)(0, 0);
  };
  net.params().ZeroGrad();
  loss(true);
  double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
  const double h = 1e-6;
  for (agent::Parameter& p : net.params()) {
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      const double analytic = p.grad.data()[i];
      const double saved = p.value.data()[i];
      p.value.data()[i] = saved + h;
      const double up = loss(false);
      p.value.data()[i] = saved - h;
      const double down = loss(false);
      p.value.data()[i] = saved;
      const double numeric = (up - down) / (2 * h);
      diff += (analytic - numeric) * (analytic - numeric);
      norm_a += analytic * analytic;
      norm_n += numeric * numeric;
    }
  }
  const double rel = std::sqrt(diff) / std::max(std::sqrt(norm_a), std::sqrt(norm_n));
  return {gae_err < 1e-10 && norm_a > 0 && rel < 1e-4,
          Fmt("GAE max abs error %.2e over 50 x 150 steps; PPO loss gradient relative error %.2e", gae_err, rel)};
}

// 7
Verdict MaskedSampling() {
  const auto table = testing::MakeTable(testing::House(), 3, 8, 0.0005);
  ActorCritic net(*table, SmallAgent(8), 7);
  net.params().at(net.policy_head_weight()).value *= 50.0;
  long draws = 0;
  long invalid = 0;
  int states = 0;
  CounterRng rng(77);
  for (int i = 0; draws < 1'000'000; ++i) {
    const NetworkState state = PlayRandom(table, 500 + i, 3 * (i % 40));
    const ActionMask mask = ComputeActionMask(state);
    if (!mask.any()) continue;
    ++states;
    const auto obs = agent::EncodeObservation(state, net.config().observation);
    const agent::GraphObservation* po = &obs;
    agent::Tape tape(false);
    const auto heads = net.Forward(tape, agent::BuildGraphBatch(*table, std::span(&po, 1)));
    const agent::Matrix& scores = tape.value(heads.scores);
    const std::vector<double> flat(scores.data(), scores.data() + scores.size());
    const auto probs = agent::MaskedSoftmax(flat, mask);
    for (int d = 0; d < 5000; ++d) {
      const double u = d == 0 ? std::nextafter(1.0, 0.0) : (d == 1 ? 0.0 : rng.Uniform());
      const Action a = agent::IndexToAction(agent::SampleIndex(probs, u), table->channel_count());
      invalid += !mask(a.path, a.channel) || ClassifyAction(state, a).kind == ActionKind::kInvalid;
      ++draws;
    }
  }
  return {draws >= 1'000'000 && invalid == 0, Fmt("%ld draws over %d states, %ld invalid", draws, states, invalid)};
}

// 8
Verdict PermutationEquivariance() {
  const auto base = testing::House();
  const auto table_a = testing::MakeTable(base, 3, 4, 0.002, PathOrdering::kLength);
  double worst = 0.0;
  int cases = 0;
  const std::vector<std::vector<int>> perms = {{3, 0, 4, 1, 2}, {4, 3, 2, 1, 0}, {1, 2, 3, 4, 0}};
  for (const auto& perm : perms) {
    const int E = static_cast<int>(base->link_count());
    std::vector<std::tuple<int, int, double>> links(E);
    std::vector<int> link_perm;
    for (int e = 0; e < E; ++e) {
      const Link& l = base->link(e);
      links[E - 1 - e] = {perm[l.b], perm[l.a], l.length_km};
      link_perm.push_back(E - 1 - e);
    }
    const auto table_b = testing::MakeTable(testing::MakeTopology(5, links), 3, 4, 0.002, PathOrdering::kLength);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      ActorCritic net(*table_a, SmallAgent(8), 21 + seed);
      const NetworkState state = PlayRandom(table_a, 8 + seed, 10 + 5 * static_cast<int>(seed));
      const auto a = agent::EncodeObservation(state, net.config().observation);
      agent::GraphObservation b = a;
      for (int v = 0; v < 5; ++v) b.node.row(perm[v]) = a.node.row(v);
      for (int e = 0; e < E; ++e) b.edge.row(link_perm[e]) = a.edge.row(e);
      const auto [s, d] = table_a->topology().pair_nodes(a.pair);
      b.pair = table_b->topology().pair_index(perm[s], perm[d]);
      const agent::GraphObservation* pa = &a;
      const agent::GraphObservation* pb = &b;
      agent::Tape ta(false), tb(false);
      const auto ha = net.Forward(ta, agent::BuildGraphBatch(*table_a, std::span(&pa, 1)));
      const auto hb = net.Forward(tb, agent::BuildGraphBatch(*table_b, std::span(&pb, 1)));
      for (int v = 0; v < 5; ++v) {
        worst = std::max(worst, (ta.value(ha.policy_gat.node).row(v) - tb.value(hb.policy_gat.node).row(perm[v])).cwiseAbs().maxCoeff());
        worst = std::max(worst, (ta.value(ha.value_gat.node).row(v) - tb.value(hb.value_gat.node).row(perm[v])).cwiseAbs().maxCoeff());
      }
      for (int e = 0; e < E; ++e) {
        worst = std::max(worst, (ta.value(ha.policy_gat.edge).row(e) - tb.value(hb.policy_gat.edge).row(link_perm[e])).cwiseAbs().maxCoeff());
      }
      worst = std::max(worst, std::abs(ta.value(ha.values)(0, 0) - tb.value(hb.values)(0, 0)));
      worst = std::max(worst, (ta.value(ha.scores) - tb.value(hb.scores)).cwiseAbs().maxCoeff());
      ++cases;
    }
  }
  return {worst < 1e-6, Fmt("%d isomorphic graph pairs, max deviation %.2e (node, edge, value, K x S scores)", cases, worst)};
}

harness::SweepSpec NsfnetSpec() {
  const harness::Lab lab = harness::BuildLab({});
  harness::SweepSpec spec;
  spec.topology = lab.topology;
  spec.nsr = lab.nsr;
  spec.transmission = lab.transmission;
  spec.seeds = Seeds(100);
  return spec;
}

bool Within(double got, double want, double rel) { return std::abs(got - want) <= rel * want; }

// 9
Verdict TableSpotCells() {
  harness::SweepSpec spec = NsfnetSpec();
  spec.methods = {HeuristicKind::kKspFf, HeuristicKind::kFfKsp};
  spec.k_values = {1, 2, 3, 4, 5};
  spec.orderings = {PathOrdering::kHops};
  spec.lengths = {{0}, {10000}, {15000}, {20000}, {25000}};
  std::map<harness::CellKey, double> mean;
  for (const auto& [key, s] : harness::SummarizeSweep(harness::RunSweep(spec))) mean[key] = s.mean;
  auto cell = [&](const char* m, int k, const char* len) { return mean.at({m, "hops", k, len}); };

  bool pass = true;
  std::ostringstream d;
  const double k5 = cell("ksp_ff", 5, "10000");
  const double k3 = cell("ksp_ff", 3, "15000");
  const double fb = cell("ff_ksp", 2, "first_blocking");
  pass &= Within(k5, 7094, 0.03) && Within(k3, 8172, 0.03) && Within(fb, 5509, 0.03);
  d << Fmt("ksp_ff K5/10k %.1f (7094), ksp_ff K3/15k %.1f (8172), ff_ksp K2/first_blocking %.1f (5509)", k5, k3, fb);
  for (const char* len : {"15000", "20000", "25000"}) {
    int best_k = 1;
    for (int k = 2; k <= 5; ++k) {
      if (cell("ksp_ff", k, len) > cell("ksp_ff", best_k, len)) best_k = k;
    }
    if (best_k != 3) {
      pass = false;
      d << Fmt("; argmax K at %s is %d (%.1f vs K3 %.1f)", len, best_k, cell("ksp_ff", best_k, len), cell("ksp_ff", 3, len));
    }
  }
  for (const auto& [key, m] : mean) {
    if (key.episode_length == "first_blocking" && m > fb) {
      pass = false;
      d << "; " << key.method << " K" << key.k << " first_blocking beats ff_ksp K2";
    }
  }
  return {pass, d.str()};
}

// 10
Verdict OrderingEffect() {
  harness::SweepSpec spec = NsfnetSpec();
  spec.methods = {HeuristicKind::kKspFf};
  spec.k_values = {5};
  spec.orderings = {PathOrdering::kHops, PathOrdering::kLength};
  spec.lengths = {{10000}};
  std::map<std::string, double> mean;
  for (const auto& [key, s] : harness::SummarizeSweep(harness::RunSweep(spec))) mean[key.ordering] = s.mean;
  const double gap = 100.0 * (mean.at("hops") / mean.at("length") - 1.0);
  return {std::abs(gap - 6.0) <= 2.0,
          Fmt("hops %.1f vs length %.1f: %+.2f%% (target 6 +- 2 pp)", mean.at("hops"), mean.at("length"), gap)};
}

// 11
Verdict DeskTraining() {
  const harness::Lab lab = harness::BuildLab({"ring5", "", 2, PathOrdering::kHops, 4, 100});
  agent::TrainingConfig cfg;
  cfg.ppo.total_timesteps = 100'000;
  cfg.ppo.num_envs = 10;
  cfg.ppo.rollout_length = 50;
  cfg.ppo.update_epochs = 4;
  cfg.ppo.learning_rate = 3e-4;
  cfg.ppo.max_grad_norm = 10.0;
  cfg.agent.latent = 32;
  cfg.agent.message_passing_steps = 2;
  cfg.episode_length = 50;
  cfg.seed = 0;
  const auto start = std::chrono::steady_clock::now();
  agent::PpoTrainer trainer(lab.table, cfg);
  trainer.Train([](const agent::UpdateLog&) {});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto net = std::make_shared<ActorCritic>(trainer.agent());
  const harness::AgentPolicy agent_policy(net, "agent");
  const EpisodeConfig eval{50, Termination::kFixedLength, 0};
  const auto seeds = Seeds(100);
  auto mean_of = [&](const harness::Policy& p) {
    const auto results = harness::EvaluatePolicy(p, lab.table, eval, seeds);
    double sum = 0;
    for (const auto& r : results) sum += r.accepted;
    return sum / static_cast<double>(results.size());
  };
  const double trained = mean_of(agent_policy);
  const double random = mean_of(harness::RandomValidPolicy());
  const double ksp = mean_of(HeuristicPolicy(HeuristicKind::kKspFf));
  const std::int64_t steps = trainer.updates_done() * cfg.ppo.num_envs * cfg.ppo.rollout_length;
  return {steps <= 100'000 && trained >= 1.2 * random && trained >= 0.95 * ksp,
          Fmt("%lld steps in %.0f s; agent %.2f, random %.2f (x%.3f, need 1.2), ksp_ff %.2f (%.1f%%, need 95)",
              static_cast<long long>(steps), secs, trained, random, trained / random, ksp, 100.0 * trained / ksp)};
}

// 12
Verdict FullScaleTargets() {
  const agent::PpoHyperparams hp;
  const bool campaign_defaults = hp.total_timesteps == 200'000'000 && hp.num_envs == 100 && hp.rollout_length == 150 &&
                              hp.update_epochs == 10 && hp.gamma == 0.919 && hp.gae_lambda == 0.984 &&
                              hp.learning_rate == 1.943e-05;
  return {campaign_defaults,
          Fmt("targets +85 mean accepted and 91/100 paired wins vs ksp_ff hops on NSFNET, crossover near 60M steps; "
              "default campaign is %lld updates of %d steps (not run)",
              static_cast<long long>(hp.NumUpdates()), hp.num_envs * hp.rollout_length)};
}

}  // namespace
}  // namespace lightpath

int main() {
  using namespace lightpath;
  struct Entry {
    int id;
    const char* name;
    Gate gate;
    std::function<Verdict()> run;
  };
  std::pair<Verdict, Verdict> sweep;
  bool sweep_done = false;
  auto nsfnet = [&](bool second) {
    if (!sweep_done) {
      sweep = NsfnetSweep();
      sweep_done = true;
    }
    return second ? sweep.second : sweep.first;
  };
  const std::vector<Entry> entries = {
      {1, "mask oracle equivalence", Gate::kGated, MaskOracle},
      {2, "state conservation", Gate::kGated, [&] { return nsfnet(false); }},
      {3, "heuristic completeness", Gate::kGated, [&] { return nsfnet(true); }},
      {4, "K=1 equivalence", Gate::kGated, KOneEquivalence},
      {5, "capacity formula", Gate::kGated, CapacityChecks},
      {6, "GAE and PPO gradients", Gate::kGated, GaeAndGradients},
      {7, "masked sampling", Gate::kGated, MaskedSampling},
      {8, "permutation equivariance", Gate::kGated, PermutationEquivariance},
      {9, "heuristic spot cells", Gate::kConditional, TableSpotCells},
      {10, "ordering effect", Gate::kConditional, OrderingEffect},
      {11, "desk-scale learning", Gate::kGated, DeskTraining},
      {12, "full-scale targets", Gate::kDocumented, FullScaleTargets},
  };
  int gated_failures = 0;
  for (const Entry& e : entries) {
    Verdict o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const char* status = o.pass ? "PASS" : "FAIL";
    const char* note = e.gate == Gate::kConditional ? " [conditional on NSR calibration, not gated]"
                       : e.gate == Gate::kDocumented ? " [documented, not gated]"
                                                     : "";
    std::cout << "criterion " << e.id << " " << status << ": " << e.name << note << " - " << o.detail << std::endl;
    if (e.gate == Gate::kGated && !o.pass) ++gated_failures;
  }
  std::cout << (gated_failures == 0 ? "acceptance: all gated criteria passed" : "acceptance: gated failures present")
            << std::endl;
  return gated_failures == 0 ? 0 : 1;
}
