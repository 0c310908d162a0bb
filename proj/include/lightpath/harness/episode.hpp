#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lightpath/agent/policy.hpp"
#include "lightpath/environment.hpp"
#include "lightpath/heuristics.hpp"

namespace lightpath::harness {

// Something that picks an action for the current request. Reset() is called
// with the episode seed before the first step so stochastic policies replay.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string id() const = 0;
  virtual void Reset(std::uint64_t /*episode_seed*/) {}
  // nullopt blocks the request. Only called when the mask has a valid cell.
  virtual std::optional<Action> Choose(const NetworkState& state, const ActionMask& mask) = 0;
  // Independent copy for running another episode concurrently.
  virtual std::unique_ptr<Policy> Clone() const = 0;
};

class HeuristicPolicy : public Policy {
 public:
  explicit HeuristicPolicy(HeuristicKind kind) : kind_(kind) {}
  std::string id() const override { return std::string(ToString(kind_)); }
  std::optional<Action> Choose(const NetworkState& state, const ActionMask& mask) override;
  std::unique_ptr<Policy> Clone() const override { return std::make_unique<HeuristicPolicy>(kind_); }

 private:
  HeuristicKind kind_;
};

// Uniform over the valid cells of the mask.
class RandomValidPolicy : public Policy {
 public:
  std::string id() const override { return "random"; }
  void Reset(std::uint64_t episode_seed) override { rng_ = CounterRng(episode_seed ^ 0x7A11D0ULL); }
  std::optional<Action> Choose(const NetworkState& state, const ActionMask& mask) override;
  std::unique_ptr<Policy> Clone() const override { return std::make_unique<RandomValidPolicy>(*this); }

 private:
  CounterRng rng_;
};

// Trained actor-critic; argmax of the masked distribution by default. The
// network is shared between clones and only read.
class AgentPolicy : public Policy {
 public:
  AgentPolicy(std::shared_ptr<agent::ActorCritic> net, std::string id,
              agent::ActorCritic::Mode mode = agent::ActorCritic::Mode::kGreedy)
      : net_(std::move(net)), id_(std::move(id)), mode_(mode) {}
  std::string id() const override { return id_; }
  void Reset(std::uint64_t episode_seed) override { rng_ = CounterRng(episode_seed ^ 0xA9E47ULL); }
  std::optional<Action> Choose(const NetworkState& state, const ActionMask& mask) override;
  std::unique_ptr<Policy> Clone() const override { return std::make_unique<AgentPolicy>(*this); }

 private:
  std::shared_ptr<agent::ActorCritic> net_;
  std::string id_;
  agent::ActorCritic::Mode mode_;
  CounterRng rng_;
};

struct EpisodeResult {
  std::uint64_t seed = 0;
  std::string policy;
  int accepted = 0;
  int blocked = 0;
  std::optional<int> first_block_step;
  double throughput_gbps = 0.0;
  // Hash of the (source, destination) sequence the episode consumed.
  std::uint64_t request_hash = 0;

  int processed() const { return accepted + blocked; }
};

struct TraceStep {
  int step = 0;
  NodeId source = 0;
  NodeId destination = 0;
  Outcome outcome = Outcome::kBlocked;
  int path = -1;
  int channel = -1;
  LightpathId lightpath = kFreeChannel;
};

EpisodeResult RunEpisode(Policy& policy, std::shared_ptr<const PathTable> table, const EpisodeConfig& config,
                         std::vector<TraceStep>* trace = nullptr);

// One fixed-length run of max(lengths) requests, reporting the counters as
// they stood after each requested length. Equivalent to separate episodes of
// each length because the request stream and policy are deterministic.
std::vector<EpisodeResult> RunEpisodePrefixes(Policy& policy, std::shared_ptr<const PathTable> table,
                                              const std::vector<int>& lengths, std::uint64_t seed);

void WriteTraceCsv(const std::filesystem::path& path, const std::vector<TraceStep>& trace);

// Request cap used for first-blocking episodes, which otherwise run until
// the first rejection.
inline constexpr int kFirstBlockingCap = 10'000'000;

// Campaign seeds: base + i, where base comes from LIGHTPATH_LAB_SEED_BASE
// (default 0).
std::uint64_t SeedBase();
std::vector<std::uint64_t> CampaignSeeds(int count);

}  // namespace lightpath::harness
