#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lightpath/physical_layer.hpp"
#include "lightpath/topology.hpp"

namespace lightpath {

// Ranked candidate paths for every unordered node pair, with capacities fixed
// at build time. Paths run from the lower to the higher node index. Shared
// read-only by every environment.
class PathTable {
 public:
  static std::shared_ptr<const PathTable> Build(std::shared_ptr<const Topology> topology, int k,
                                                PathOrdering ordering, const NsrModel& nsr,
                                                const TransmissionConfig& transmission,
                                                double request_size_gbps);

  const Topology& topology() const { return *topology_; }
  const std::shared_ptr<const Topology>& topology_ptr() const { return topology_; }
  int k() const { return k_; }
  PathOrdering ordering() const { return ordering_; }
  const TransmissionConfig& transmission() const { return transmission_; }
  int channel_count() const { return transmission_.channel_count; }
  double request_size_gbps() const { return request_size_gbps_; }

  // Actual number of paths held for the pair (<= k).
  int path_count(PairIndex pair) const { return static_cast<int>(paths_.at(pair).size()); }
  std::span<const CandidatePath> paths(PairIndex pair) const { return paths_.at(pair); }
  const CandidatePath& path(PairIndex pair, int rank) const { return paths_.at(pair).at(static_cast<std::size_t>(rank)); }
  std::size_t pair_count() const { return paths_.size(); }

  // Largest max_services over all paths; used to normalise observations.
  int max_services_bound() const { return max_services_bound_; }

  // Stable 64-bit FNV-1a fingerprint of topology, ordering, k, grid, request
  // size and every path with its capacity.
  std::uint64_t Fingerprint() const;

 private:
  PathTable() = default;

  std::shared_ptr<const Topology> topology_;
  int k_ = 0;
  PathOrdering ordering_ = PathOrdering::kHops;
  TransmissionConfig transmission_;
  double request_size_gbps_ = 100.0;
  int max_services_bound_ = 0;
  std::vector<std::vector<CandidatePath>> paths_;
};

}  // namespace lightpath
