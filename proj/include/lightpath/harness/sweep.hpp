#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lightpath/harness/episode.hpp"
#include "lightpath/harness/stats.hpp"
#include "lightpath/physical_layer.hpp"

namespace lightpath::harness {

// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions are
// rethrown on the caller after all workers stop.
void ParallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

int DefaultThreads();

// 0 requests means first-blocking termination.
struct EpisodeLength {
  int requests = 10000;

  bool first_blocking() const { return requests == 0; }
  std::string label() const { return first_blocking() ? "first_blocking" : std::to_string(requests); }
  static EpisodeLength Parse(const std::string& text);
  auto operator<=>(const EpisodeLength&) const = default;
};

struct SweepSpec {
  std::shared_ptr<const Topology> topology;
  NsrModel nsr = NsrModel::ClosedForm(ClosedFormGnParams{});
  TransmissionConfig transmission;
  double request_size_gbps = 100.0;
  std::vector<HeuristicKind> methods;
  std::vector<int> k_values;
  std::vector<PathOrdering> orderings;
  std::vector<EpisodeLength> lengths;
  std::vector<std::uint64_t> seeds;
  int threads = 1;
};

struct SweepRow {
  std::string method;
  std::string ordering;
  int k = 0;
  std::string episode_length;
  std::uint64_t seed = 0;
  int accepted = 0;
  int blocked = 0;
  std::optional<int> first_block_step;

  bool operator==(const SweepRow&) const = default;
};

// Rows ordered by method, ordering, k, length, then seed regardless of
// thread scheduling.
std::vector<SweepRow> RunSweep(const SweepSpec& spec);

struct CellKey {
  std::string method;
  std::string ordering;
  int k = 0;
  std::string episode_length;
  auto operator<=>(const CellKey&) const = default;
};

std::vector<std::pair<CellKey, Summary>> SummarizeSweep(const std::vector<SweepRow>& rows);

struct PairedRow {
  std::uint64_t seed = 0;
  int accepted_a = 0;
  int accepted_b = 0;
  int delta = 0;  // a - b

  bool operator==(const PairedRow&) const = default;
};

struct PairedSummary {
  std::vector<PairedRow> rows;
  double mean_delta = 0.0;
  int wins = 0;  // a strictly ahead
  int losses = 0;
  int ties = 0;
  double mean_throughput_gain_gbps = 0.0;
};

// Both policies replay each seed's request sequence; a mismatch in the
// consumed (source, destination) trace throws std::logic_error.
PairedSummary PairedEval(const Policy& a, const Policy& b, std::shared_ptr<const PathTable> table,
                         const EpisodeConfig& base, const std::vector<std::uint64_t>& seeds, int threads = 1);

// Mean accepted over seeds for one policy, in parallel.
std::vector<EpisodeResult> EvaluatePolicy(const Policy& policy, std::shared_ptr<const PathTable> table,
                                          const EpisodeConfig& base, const std::vector<std::uint64_t>& seeds,
                                          int threads = 1);

}  // namespace lightpath::harness
