#include "lightpath/harness/episode.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace lightpath::harness {

std::optional<Action> HeuristicPolicy::Choose(const NetworkState&, const ActionMask& mask) { return RunHeuristic(kind_, mask); }

std::optional<Action> RandomValidPolicy::Choose(const NetworkState&, const ActionMask& mask) {
  const std::size_t n = mask.count();
  if (n == 0) return std::nullopt;
  std::size_t pick = rng_.Below(n);
  for (int k = 0; k < mask.k(); ++k) {
    const std::size_t c = mask.row(k).count();
    if (pick >= c) {
      pick -= c;
      continue;
    }
    std::size_t s = mask.row(k).find_first();
    while (pick-- > 0) s = mask.row(k).find_next(s);
    return Action{k, static_cast<int>(s)};
  }
  return std::nullopt;
}

std::optional<Action> AgentPolicy::Choose(const NetworkState& state, const ActionMask& mask) {
  const agent::GraphObservation obs = agent::EncodeObservation(state, net_->config().observation);
  const agent::GraphObservation* obs_ptr = &obs;
  const ActionMask* mask_ptr = &mask;
  const double u = mode_ == agent::ActorCritic::Mode::kSample ? rng_.Uniform() : 0.0;
  const auto decisions = net_->Act(state.table(), std::span(&obs_ptr, 1), std::span(&mask_ptr, 1), mode_,
                                   mode_ == agent::ActorCritic::Mode::kSample ? std::span<const double>(&u, 1)
                                                                             : std::span<const double>());
  return decisions.front().action;
}

namespace {

std::uint64_t HashStep(std::uint64_t h, const ServiceRequest& r) {
  return CounterRng::Mix(h ^ ((static_cast<std::uint64_t>(r.source) << 32) | r.destination));
}

}  // namespace

EpisodeResult RunEpisode(Policy& policy, std::shared_ptr<const PathTable> table, const EpisodeConfig& config,
                         std::vector<TraceStep>* trace) {
  config.Validate();
  NetworkState state(table, config);
  ActionMask mask;
  policy.Reset(config.seed);
  EpisodeResult result;
  result.seed = config.seed;
  result.policy = policy.id();
  std::uint64_t hash = 0x1F0E5EEDULL;
  while (!IsTerminated(state)) {
    const ServiceRequest request = state.request();
    hash = HashStep(hash, request);
    ComputeActionMask(state, mask);
    std::optional<Action> action;
    if (mask.any()) action = policy.Choose(state, mask);
    const StepResult step = action ? ApplyAction(state, *action) : RejectRequest(state);
    if (trace != nullptr) {
      TraceStep t;
      t.step = state.processed() - 1;
      t.source = request.source;
      t.destination = request.destination;
      t.outcome = step.outcome;
      if (action) {
        t.path = action->path;
        t.channel = action->channel;
      }
      t.lightpath = step.lightpath;
      trace->push_back(t);
    }
  }
  result.accepted = state.accepted();
  result.blocked = state.blocked();
  result.first_block_step = state.first_block_step();
  result.throughput_gbps = result.accepted * table->request_size_gbps();
  result.request_hash = hash;
  return result;
}

std::vector<EpisodeResult> RunEpisodePrefixes(Policy& policy, std::shared_ptr<const PathTable> table,
                                              const std::vector<int>& lengths, std::uint64_t seed) {
  if (lengths.empty()) throw std::invalid_argument("RunEpisodePrefixes: no lengths");
  EpisodeConfig config;
  config.request_count = *std::max_element(lengths.begin(), lengths.end());
  config.seed = seed;
  config.Validate();
  NetworkState state(table, config);
  ActionMask mask;
  policy.Reset(seed);
  std::vector<EpisodeResult> out(lengths.size());
  std::uint64_t hash = 0x1F0E5EEDULL;
  auto snapshot = [&] {
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (lengths[i] != state.processed()) continue;
      EpisodeResult& r = out[i];
      r.seed = seed;
      r.policy = policy.id();
      r.accepted = state.accepted();
      r.blocked = state.blocked();
      r.first_block_step = state.first_block_step();
      r.throughput_gbps = r.accepted * table->request_size_gbps();
      r.request_hash = hash;
    }
  };
  while (!IsTerminated(state)) {
    hash = HashStep(hash, state.request());
    ComputeActionMask(state, mask);
    std::optional<Action> action;
    if (mask.any()) action = policy.Choose(state, mask);
    if (action) {
      ApplyAction(state, *action);
    } else {
      RejectRequest(state);
    }
    snapshot();
  }
  return out;
}

void WriteTraceCsv(const std::filesystem::path& path, const std::vector<TraceStep>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "step,source,destination,outcome,path,channel,lightpath\n";
  for (const TraceStep& t : trace) {
    out << t.step << ',' << t.source << ',' << t.destination << ',' << ToString(t.outcome) << ',' << t.path << ','
        << t.channel << ',' << t.lightpath << '\n';
  }
}

std::uint64_t SeedBase() {
  const char* env = std::getenv("LIGHTPATH_LAB_SEED_BASE");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("LIGHTPATH_LAB_SEED_BASE is not an unsigned integer: ") + env);
  }
}

std::vector<std::uint64_t> CampaignSeeds(int count) {
  const std::uint64_t base = SeedBase();
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
  return seeds;
}

}  // namespace lightpath::harness
