#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "lightpath/path_table.hpp"
#include "lightpath/rng.hpp"

namespace lightpath {

using LightpathId = std::uint32_t;
inline constexpr LightpathId kFreeChannel = 0;

struct ServiceRequest {
  NodeId source = 0;
  NodeId destination = 0;
  double size_gbps = 100.0;

  bool operator==(const ServiceRequest&) const = default;
};

struct Action {
  int path = 0;
  int channel = 0;

  bool operator==(const Action&) const = default;
};

enum class Termination { kFixedLength, kFirstBlocking };

struct EpisodeConfig {
  int request_count = 10000;
  Termination termination = Termination::kFixedLength;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Training episodes are the evaluation length times the scale factor.
int ScaledEpisodeLength(int evaluation_length, double scale_factor);

struct Lightpath {
  LightpathId id = 0;
  PairIndex pair = 0;
  int rank = 0;
  int channel = 0;
  int initial_slots = 0;
  int remaining_slots = 0;
};

enum class ActionKind { kNewLightpath, kReuse, kInvalid };

struct Classification {
  ActionKind kind = ActionKind::kInvalid;
  LightpathId lightpath = kFreeChannel;  // set for kReuse
};

enum class Outcome { kNewLightpath, kReuse, kBlocked };

std::string_view ToString(Outcome outcome);

struct StepResult {
  Outcome outcome = Outcome::kBlocked;
  double reward = -1.0;
  LightpathId lightpath = kFreeChannel;

  bool accepted() const { return outcome != Outcome::kBlocked; }
};

// K x S validity grid, one bitset row per candidate path rank.
class ActionMask {
 public:
  ActionMask() = default;
  ActionMask(int k, int channels) : k_(k), channels_(channels), rows_(static_cast<std::size_t>(k), boost::dynamic_bitset<>(static_cast<std::size_t>(channels))) {}

  int k() const { return k_; }
  int channels() const { return channels_; }
  bool operator()(int path, int channel) const { return rows_[static_cast<std::size_t>(path)].test(static_cast<std::size_t>(channel)); }
  const boost::dynamic_bitset<>& row(int path) const { return rows_[static_cast<std::size_t>(path)]; }
  boost::dynamic_bitset<>& row(int path) { return rows_[static_cast<std::size_t>(path)]; }
  bool any() const;
  std::size_t count() const;

  bool operator==(const ActionMask&) const = default;

 private:
  int k_ = 0;
  int channels_ = 0;
  std::vector<boost::dynamic_bitset<>> rows_;
};

// Complete mutable state of one RWA-LR episode. Owned by exactly one
// environment; the path table is shared and immutable.
class NetworkState {
 public:
  // Empty grid, zero counters, request stream seeded from config.seed, first
  // request drawn.
  NetworkState(std::shared_ptr<const PathTable> table, const EpisodeConfig& config);

  const PathTable& table() const { return *table_; }
  const std::shared_ptr<const PathTable>& table_ptr() const { return table_; }
  const EpisodeConfig& config() const { return config_; }

  LightpathId occupancy(LinkId link, int channel) const {
    return occupancy_[static_cast<std::size_t>(link) * channels_ + static_cast<std::size_t>(channel)];
  }
  int channels() const { return channels_; }
  const std::vector<Lightpath>& lightpaths() const { return lightpaths_; }
  // Lightpath IDs start at 1 and are never recycled.
  const Lightpath& lightpath(LightpathId id) const { return lightpaths_.at(id - 1); }

  const ServiceRequest& request() const { return request_; }
  int processed() const { return processed_; }
  int accepted() const { return accepted_; }
  int blocked() const { return blocked_; }
  std::optional<int> first_block_step() const { return first_block_step_; }

 private:
  friend ServiceRequest SampleRequest(NetworkState& state);
  friend ActionMask ComputeActionMask(const NetworkState& state);
  friend void ComputeActionMask(const NetworkState& state, ActionMask& mask);
  friend StepResult ApplyAction(NetworkState& state, Action action);
  friend StepResult RejectRequest(NetworkState& state);
  friend std::optional<std::string> CheckInvariants(const NetworkState& state);

  std::size_t route_slot(PairIndex pair, int rank) const { return static_cast<std::size_t>(pair) * table_->k() + static_cast<std::size_t>(rank); }
  StepResult Finish(StepResult result);

  std::shared_ptr<const PathTable> table_;
  EpisodeConfig config_;
  int channels_;
  std::vector<LightpathId> occupancy_;
  // Free channels per link, and channels holding a lightpath with spare
  // slots per (pair, rank).
  std::vector<boost::dynamic_bitset<>> free_;
  std::vector<boost::dynamic_bitset<>> reusable_;
  std::vector<Lightpath> lightpaths_;
  CounterRng rng_;
  ServiceRequest request_;
  int processed_ = 0;
  int accepted_ = 0;
  int blocked_ = 0;
  std::optional<int> first_block_step_;
};

// Uniform unordered node pair, source is the lower node index. Advances the
// request stream.
ServiceRequest SampleRequest(NetworkState& state);

// Cell-by-cell definition of action validity for the current request.
Classification ClassifyAction(const NetworkState& state, Action action);

// Same answer as ClassifyAction over every cell, from per-link free-channel
// bitsets and per-route reuse bitsets.
ActionMask ComputeActionMask(const NetworkState& state);
void ComputeActionMask(const NetworkState& state, ActionMask& mask);

// Serves the current request with `action` (+1) or blocks it (-1, state
// otherwise unchanged). Draws the next request unless the episode ended.
// Throws std::logic_error once terminated.
StepResult ApplyAction(NetworkState& state, Action action);

// Blocks the current request without attempting an allocation.
StepResult RejectRequest(NetworkState& state);

bool IsTerminated(const NetworkState& state);

// Returns a description of the first violated state invariant, if any.
std::optional<std::string> CheckInvariants(const NetworkState& state);

}  // namespace lightpath
