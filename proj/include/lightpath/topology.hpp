#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lightpath {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;
using PairIndex = std::uint32_t;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Link {
  NodeId a;
  NodeId b;
  double length_km;
};

// Undirected, connected, simple graph of fiber links. Immutable once built.
class Topology {
 public:
  // Throws ValidationError on self-loops, duplicate links, non-positive or
  // non-finite lengths, unknown endpoints, or a disconnected graph.
  Topology(std::vector<std::string> node_names, std::vector<Link> links);

  std::size_t node_count() const { return names_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t pair_count() const { return node_count() * (node_count() - 1) / 2; }

  const Link& link(LinkId id) const { return links_.at(id); }
  const std::vector<Link>& links() const { return links_; }
  const std::string& name(NodeId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<NodeId> find(std::string_view name) const;
  std::optional<LinkId> link_between(NodeId a, NodeId b) const;

  // (neighbour, link) pairs in ascending neighbour order.
  const std::vector<std::pair<NodeId, LinkId>>& adjacent(NodeId v) const { return adjacency_.at(v); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }

  // Dense index of the unordered pair {a, b}, a != b.
  PairIndex pair_index(NodeId a, NodeId b) const;
  std::pair<NodeId, NodeId> pair_nodes(PairIndex index) const;

 private:
  std::vector<std::string> names_;
  std::vector<Link> links_;
  std::vector<std::vector<std::pair<NodeId, LinkId>>> adjacency_;
};

// {"nodes": [...], "links": [{"a": .., "b": .., "length_km": ..}, ...]}
Topology ParseTopology(std::string_view json_text);
Topology LoadTopology(const std::filesystem::path& file);

enum class PathOrdering { kHops, kLength };

std::string_view ToString(PathOrdering ordering);
PathOrdering ParsePathOrdering(std::string_view text);

struct CandidatePath {
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;
  double length_km = 0.0;
  double capacity_gbps = 0.0;
  // Whole request-size services one lightpath on this path can carry.
  int max_services = 0;

  int hops() const { return static_cast<int>(links.size()); }
};

// Strict weak order used for ranking: declared criterion first, the other
// criterion second, lexicographic node sequence last.
bool PathRanksBefore(const CandidatePath& lhs, const CandidatePath& rhs, PathOrdering ordering);

// Up to k loopless paths from src to dst, the k best under PathRanksBefore.
// Yen's algorithm over a Dijkstra core with lexicographic (primary, secondary)
// costs, extended past k while the cost ties with the k-th path, then
// re-ranked by the full key.
std::vector<CandidatePath> KShortestPaths(const Topology& topology, NodeId src, NodeId dst, int k,
                                          PathOrdering ordering);

}  // namespace lightpath
