#include "lightpath/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lightpath {

void EpisodeConfig::Validate() const {
  if (request_count < 1) throw ValidationError("episode request count must be >= 1");
}

int ScaledEpisodeLength(int evaluation_length, double scale_factor) {
  if (!(scale_factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  return std::max(1, static_cast<int>(std::lround(evaluation_length * scale_factor)));
}

std::string_view ToString(Outcome outcome) {
  switch (outcome) {
    case Outcome::kNewLightpath:
      return "new";
    case Outcome::kReuse:
      return "reuse";
    case Outcome::kBlocked:
      break;
  }
  return "blocked";
}

bool ActionMask::any() const {
  return std::any_of(rows_.begin(), rows_.end(), [](const auto& r) { return r.any(); });
}

std::size_t ActionMask::count() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.count();
  return n;
}

NetworkState::NetworkState(std::shared_ptr<const PathTable> table, const EpisodeConfig& config)
    : table_(std::move(table)), config_(config), channels_(0), rng_(config.seed) {
  if (!table_) throw std::invalid_argument("NetworkState: null path table");
  config_.Validate();
  channels_ = table_->channel_count();
  const std::size_t links = table_->topology().link_count();
  occupancy_.assign(links * static_cast<std::size_t>(channels_), kFreeChannel);
  boost::dynamic_bitset<> all_free(static_cast<std::size_t>(channels_));
  all_free.set();
  free_.assign(links, all_free);
  reusable_.assign(table_->pair_count() * static_cast<std::size_t>(table_->k()),
                   boost::dynamic_bitset<>(static_cast<std::size_t>(channels_)));
  request_ = SampleRequest(*this);
}

ServiceRequest SampleRequest(NetworkState& state) {
  const Topology& topo = state.table_->topology();
  const auto pair = static_cast<PairIndex>(state.rng_.Below(topo.pair_count()));
  const auto [a, b] = topo.pair_nodes(pair);
  return ServiceRequest{a, b, state.table_->request_size_gbps()};
}

Classification ClassifyAction(const NetworkState& state, Action action) {
  const PathTable& table = state.table();
  if (action.path < 0 || action.path >= table.k() || action.channel < 0 || action.channel >= state.channels()) {
    return {};
  }
  const ServiceRequest& req = state.request();
  const PairIndex pair = table.topology().pair_index(req.source, req.destination);
  if (action.path >= table.path_count(pair)) return {};
  const CandidatePath& path = table.path(pair, action.path);

  const LightpathId first = state.occupancy(path.links.front(), action.channel);
  for (LinkId link : path.links) {
    if (state.occupancy(link, action.channel) != first) return {};
  }
  if (first == kFreeChannel) {
    if (path.max_services >= 1) return {ActionKind::kNewLightpath, kFreeChannel};
    return {};
  }
  const Lightpath& lp = state.lightpath(first);
  const CandidatePath& lp_path = table.path(lp.pair, lp.rank);
  auto a = lp_path.links;
  auto b = path.links;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a == b && lp.channel == action.channel && lp.remaining_slots >= 1) {
    return {ActionKind::kReuse, first};
  }
  return {};
}

void ComputeActionMask(const NetworkState& state, ActionMask& mask) {
  const PathTable& table = state.table();
  if (mask.k() != table.k() || mask.channels() != state.channels()) {
    mask = ActionMask(table.k(), state.channels());
  }
  const ServiceRequest& req = state.request();
  const PairIndex pair = table.topology().pair_index(req.source, req.destination);
  const int available = table.path_count(pair);
  for (int rank = 0; rank < table.k(); ++rank) {
    auto& row = mask.row(rank);
    if (rank >= available) {
      row.reset();
      continue;
    }
    const CandidatePath& path = table.path(pair, rank);
    if (path.max_services >= 1) {
      row = state.free_[path.links.front()];
      for (std::size_t i = 1; i < path.links.size(); ++i) row &= state.free_[path.links[i]];
      row |= state.reusable_[state.route_slot(pair, rank)];
    } else {
      row.reset();
    }
  }
}

ActionMask ComputeActionMask(const NetworkState& state) {
  ActionMask mask(state.table().k(), state.channels());
  ComputeActionMask(state, mask);
  return mask;
}

StepResult NetworkState::Finish(StepResult result) {
  if (result.accepted()) {
    ++accepted_;
  } else {
    if (!first_block_step_) first_block_step_ = processed_;
    ++blocked_;
  }
  ++processed_;
  if (!IsTerminated(*this)) request_ = SampleRequest(*this);
  return result;
}

StepResult ApplyAction(NetworkState& state, Action action) {
  if (IsTerminated(state)) throw std::logic_error("ApplyAction: episode already terminated");
  const Classification c = ClassifyAction(state, action);
  const PathTable& table = state.table();
  const std::size_t s = static_cast<std::size_t>(action.channel);
  switch (c.kind) {
    case ActionKind::kInvalid:
      return state.Finish(StepResult{Outcome::kBlocked, -1.0, kFreeChannel});
    case ActionKind::kNewLightpath: {
      const ServiceRequest& req = state.request();
      const PairIndex pair = table.topology().pair_index(req.source, req.destination);
      const CandidatePath& path = table.path(pair, action.path);
      Lightpath lp;
      lp.id = static_cast<LightpathId>(state.lightpaths_.size() + 1);
      lp.pair = pair;
      lp.rank = action.path;
      lp.channel = action.channel;
      lp.initial_slots = path.max_services;
      lp.remaining_slots = path.max_services - 1;
      for (LinkId link : path.links) {
        state.occupancy_[static_cast<std::size_t>(link) * state.channels_ + s] = lp.id;
        state.free_[link].reset(s);
      }
      state.reusable_[state.route_slot(pair, action.path)].set(s, lp.remaining_slots >= 1);
      state.lightpaths_.push_back(lp);
      return state.Finish(StepResult{Outcome::kNewLightpath, 1.0, lp.id});
    }
    case ActionKind::kReuse: {
      Lightpath& lp = state.lightpaths_.at(c.lightpath - 1);
      --lp.remaining_slots;
      if (lp.remaining_slots == 0) state.reusable_[state.route_slot(lp.pair, lp.rank)].reset(s);
      return state.Finish(StepResult{Outcome::kReuse, 1.0, lp.id});
    }
  }
  throw std::logic_error("unreachable");
}

StepResult RejectRequest(NetworkState& state) {
  if (IsTerminated(state)) throw std::logic_error("RejectRequest: episode already terminated");
  return state.Finish(StepResult{Outcome::kBlocked, -1.0, kFreeChannel});
}

bool IsTerminated(const NetworkState& state) {
  const EpisodeConfig& c = state.config();
  if (state.processed() >= c.request_count) return true;
  return c.termination == Termination::kFirstBlocking && state.blocked() >= 1;
}

std::optional<std::string> CheckInvariants(const NetworkState& state) {
  const PathTable& table = state.table();
  const std::size_t links = table.topology().link_count();
  const auto S = static_cast<std::size_t>(state.channels_);

  if (state.accepted_ + state.blocked_ != state.processed_) return "accepted + blocked != processed";

  std::vector<std::size_t> footprint(state.lightpaths_.size() + 1, 0);
  for (std::size_t link = 0; link < links; ++link) {
    for (std::size_t s = 0; s < S; ++s) {
      const LightpathId id = state.occupancy_[link * S + s];
      if (state.free_[link].test(s) != (id == kFreeChannel)) return "free-channel bitset out of sync with occupancy";
      if (id == kFreeChannel) continue;
      if (id > state.lightpaths_.size()) return "occupancy holds an unregistered lightpath ID";
      ++footprint[id];
    }
  }

  long carried = 0;
  for (std::size_t i = 0; i < state.lightpaths_.size(); ++i) {
    const Lightpath& lp = state.lightpaths_[i];
    if (lp.id != i + 1) return "lightpath IDs are not sequential";
    const CandidatePath& path = table.path(lp.pair, lp.rank);
    if (lp.initial_slots != path.max_services) return "lightpath initial slots differ from path capacity";
    if (lp.remaining_slots < 0 || lp.remaining_slots >= lp.initial_slots) return "lightpath remaining slots out of range";
    for (LinkId link : path.links) {
      if (state.occupancy(link, lp.channel) != lp.id) return "lightpath " + std::to_string(lp.id) + " missing from a path link";
    }
    if (footprint[lp.id] != path.links.size()) return "lightpath " + std::to_string(lp.id) + " occupies cells outside its path";
    const bool reusable = state.reusable_[state.route_slot(lp.pair, lp.rank)].test(static_cast<std::size_t>(lp.channel));
    if (reusable != (lp.remaining_slots >= 1)) return "reuse bitset out of sync with remaining slots";
    carried += lp.initial_slots - lp.remaining_slots;
  }
  if (carried != state.accepted_) return "services carried on lightpaths != accepted count";
  return std::nullopt;
}

}  // namespace lightpath
