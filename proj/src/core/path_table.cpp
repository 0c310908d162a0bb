#include "lightpath/path_table.hpp"

#include <bit>
#include <cstring>
#include <string_view>

namespace lightpath {

namespace {

class Fnv1a {
 public:
  void Add(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001B3ULL;
    }
  }
  void Add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= (v >> (8 * i)) & 0xFF;
      hash_ *= 0x100000001B3ULL;
    }
  }
  void Add(double v) { Add(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
};

}  // namespace

std::shared_ptr<const PathTable> PathTable::Build(std::shared_ptr<const Topology> topology, int k,
                                                  PathOrdering ordering, const NsrModel& nsr,
                                                  const TransmissionConfig& transmission,
                                                  double request_size_gbps) {
  if (!topology) throw std::invalid_argument("PathTable::Build: null topology");
  if (k < 1) throw std::invalid_argument("PathTable::Build: k must be >= 1");
  if (!(request_size_gbps > 0.0)) throw std::invalid_argument("PathTable::Build: request size must be positive");
  transmission.Validate();
  nsr.Validate(*topology);

  std::shared_ptr<PathTable> table(new PathTable());
  table->topology_ = topology;
  table->k_ = k;
  table->ordering_ = ordering;
  table->transmission_ = transmission;
  table->request_size_gbps_ = request_size_gbps;
  table->paths_.resize(topology->pair_count());
  for (PairIndex pair = 0; pair < topology->pair_count(); ++pair) {
    const auto [a, b] = topology->pair_nodes(pair);
    auto paths = KShortestPaths(*topology, a, b, k, ordering);
    for (CandidatePath& p : paths) {
      p.capacity_gbps = PathCapacity(*topology, p.links, nsr, transmission);
      p.max_services = MaxServices(p.capacity_gbps, request_size_gbps);
      table->max_services_bound_ = std::max(table->max_services_bound_, p.max_services);
    }
    table->paths_[pair] = std::move(paths);
  }
  return table;
}

std::uint64_t PathTable::Fingerprint() const {
  Fnv1a h;
  h.Add(std::string_view("lightpath-path-table/1"));
  for (const auto& name : topology_->names()) {
    h.Add(name);
    h.Add(std::string_view("\0", 1));
  }
  for (const Link& l : topology_->links()) {
    h.Add(std::uint64_t{l.a});
    h.Add(std::uint64_t{l.b});
    h.Add(l.length_km);
  }
  h.Add(static_cast<std::uint64_t>(k_));
  h.Add(ToString(ordering_));
  h.Add(static_cast<std::uint64_t>(transmission_.channel_count));
  h.Add(transmission_.symbol_rate_gbaud);
  h.Add(request_size_gbps_);
  for (const auto& pair_paths : paths_) {
    h.Add(static_cast<std::uint64_t>(pair_paths.size()));
    for (const auto& p : pair_paths) {
      for (LinkId id : p.links) h.Add(std::uint64_t{id});
      h.Add(p.capacity_gbps);
    }
  }
  return h.value();
}

}  // namespace lightpath
