#include "lightpath/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

namespace lightpath {

Topology::Topology(std::vector<std::string> node_names, std::vector<Link> links)
    : names_(std::move(node_names)), links_(std::move(links)), adjacency_(names_.size()) {
  if (names_.size() < 2) throw ValidationError("topology needs at least two nodes");
  {
    auto sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("duplicate node name");
    }
  }
  for (LinkId id = 0; id < links_.size(); ++id) {
    const Link& l = links_[id];
    if (l.a >= names_.size() || l.b >= names_.size()) {
      throw ValidationError("link " + std::to_string(id) + " references an unknown node");
    }
    if (l.a == l.b) throw ValidationError("self-loop at node " + names_[l.a]);
    if (!(l.length_km > 0.0) || !std::isfinite(l.length_km)) {
      throw ValidationError("link " + names_[l.a] + "-" + names_[l.b] + " has non-positive or non-finite length");
    }
    for (const auto& [n, other] : adjacency_[l.a]) {
      if (n == l.b) throw ValidationError("duplicate link " + names_[l.a] + "-" + names_[l.b]);
    }
    adjacency_[l.a].emplace_back(l.b, id);
    adjacency_[l.b].emplace_back(l.a, id);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());

  std::vector<bool> seen(names_.size(), false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (const auto& [n, id] : adjacency_[v]) {
      if (!seen[n]) {
        seen[n] = true;
        ++reached;
        stack.push_back(n);
      }
    }
  }
  if (reached != names_.size()) throw ValidationError("topology is disconnected");
}

std::optional<NodeId> Topology::find(std::string_view name) const {
  for (NodeId i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<LinkId> Topology::link_between(NodeId a, NodeId b) const {
  for (const auto& [n, id] : adjacency_.at(a)) {
    if (n == b) return id;
  }
  return std::nullopt;
}

PairIndex Topology::pair_index(NodeId a, NodeId b) const {
  if (a == b || a >= node_count() || b >= node_count()) {
    throw std::out_of_range("pair_index: invalid node pair");
  }
  if (a > b) std::swap(a, b);
  const std::size_t n = node_count();
  // Row-major over the strict upper triangle.
  return static_cast<PairIndex>(a * (2 * n - a - 1) / 2 + (b - a - 1));
}

std::pair<NodeId, NodeId> Topology::pair_nodes(PairIndex index) const {
  const std::size_t n = node_count();
  std::size_t a = 0;
  std::size_t row = n - 1;
  std::size_t remaining = index;
  while (remaining >= row) {
    remaining -= row;
    ++a;
    --row;
  }
  return {static_cast<NodeId>(a), static_cast<NodeId>(a + 1 + remaining)};
}

Topology ParseTopology(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("topology: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("links") || !doc["nodes"].is_array() ||
      !doc["links"].is_array()) {
    throw ParseError("topology: expected an object with \"nodes\" and \"links\" arrays");
  }
  std::vector<std::string> names;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_string()) throw ParseError("topology: node identifiers must be strings");
    names.push_back(n.get<std::string>());
  }
  auto index_of = [&](const std::string& name) -> NodeId {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ValidationError("topology: link endpoint '" + name + "' is not a node");
    return static_cast<NodeId>(it - names.begin());
  };
  std::vector<Link> links;
  for (const auto& l : doc["links"]) {
    if (!l.is_object() || !l.contains("a") || !l.contains("b") || !l.contains("length_km") ||
        !l["a"].is_string() || !l["b"].is_string() || !l["length_km"].is_number()) {
      throw ParseError("topology: each link needs string \"a\", \"b\" and numeric \"length_km\"");
    }
    links.push_back({index_of(l["a"].get<std::string>()), index_of(l["b"].get<std::string>()),
                     l["length_km"].get<double>()});
  }
  return Topology(std::move(names), std::move(links));
}

Topology LoadTopology(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open topology file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseTopology(buffer.str());
}

std::string_view ToString(PathOrdering ordering) {
  return ordering == PathOrdering::kHops ? "hops" : "length";
}

PathOrdering ParsePathOrdering(std::string_view text) {
  if (text == "hops") return PathOrdering::kHops;
  if (text == "length") return PathOrdering::kLength;
  throw ParseError("unknown path ordering '" + std::string(text) + "' (expected hops|length)");
}

namespace {

struct Cost {
  double primary = 0.0;
  double secondary = 0.0;

  Cost operator+(const Cost& o) const { return {primary + o.primary, secondary + o.secondary}; }
  bool operator<(const Cost& o) const { return std::tie(primary, secondary) < std::tie(o.primary, o.secondary); }
  bool operator==(const Cost& o) const = default;
};

Cost LinkCost(const Link& link, PathOrdering ordering) {
  return ordering == PathOrdering::kHops ? Cost{1.0, link.length_km} : Cost{link.length_km, 1.0};
}

Cost PathCost(const Topology& topology, const std::vector<LinkId>& links, PathOrdering ordering) {
  Cost c;
  for (LinkId id : links) c = c + LinkCost(topology.link(id), ordering);
  return c;
}

bool CostTies(const Cost& a, const Cost& b) {
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)}); };
  return close(a.primary, b.primary) && close(a.secondary, b.secondary);
}

struct Route {
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;
};

std::optional<Route> Dijkstra(const Topology& topology, NodeId src, NodeId dst, PathOrdering ordering,
                              const std::vector<bool>& link_removed, const std::vector<bool>& node_removed) {
  const std::size_t n = topology.node_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<Cost> dist(n, Cost{kInf, kInf});
  std::vector<std::optional<std::pair<NodeId, LinkId>>> pred(n);
  std::vector<bool> done(n, false);
  using Entry = std::tuple<Cost, NodeId>;
  auto greater = [](const Entry& x, const Entry& y) { return std::tie(std::get<0>(y), std::get<1>(y)) < std::tie(std::get<0>(x), std::get<1>(x)); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(greater)> queue(greater);
  dist[src] = Cost{};
  queue.emplace(Cost{}, src);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (done[v]) continue;
    done[v] = true;
    if (v == dst) break;
    for (const auto& [w, id] : topology.adjacent(v)) {
      if (link_removed[id] || node_removed[w] || done[w]) continue;
      const Cost nd = d + LinkCost(topology.link(id), ordering);
      if (nd < dist[w]) {
        dist[w] = nd;
        pred[w] = std::make_pair(v, id);
        queue.emplace(nd, w);
      }
    }
  }
  if (!done[dst]) return std::nullopt;
  Route route;
  for (NodeId v = dst; v != src; v = pred[v]->first) {
    route.nodes.push_back(v);
    route.links.push_back(pred[v]->second);
  }
  route.nodes.push_back(src);
  std::reverse(route.nodes.begin(), route.nodes.end());
  std::reverse(route.links.begin(), route.links.end());
  return route;
}

CandidatePath ToCandidate(const Topology& topology, Route route) {
  CandidatePath p;
  p.nodes = std::move(route.nodes);
  p.links = std::move(route.links);
  for (LinkId id : p.links) p.length_km += topology.link(id).length_km;
  return p;
}

}  // namespace

bool PathRanksBefore(const CandidatePath& lhs, const CandidatePath& rhs, PathOrdering ordering) {
  const int lh = lhs.hops();
  const int rh = rhs.hops();
  if (ordering == PathOrdering::kHops) {
    return std::tie(lh, lhs.length_km, lhs.nodes) < std::tie(rh, rhs.length_km, rhs.nodes);
  }
  return std::tie(lhs.length_km, lh, lhs.nodes) < std::tie(rhs.length_km, rh, rhs.nodes);
}

std::vector<CandidatePath> KShortestPaths(const Topology& topology, NodeId src, NodeId dst, int k,
                                          PathOrdering ordering) {
  if (src == dst) throw std::invalid_argument("KShortestPaths: src == dst");
  if (k < 1) throw std::invalid_argument("KShortestPaths: k must be >= 1");
  if (src >= topology.node_count() || dst >= topology.node_count()) {
    throw std::out_of_range("KShortestPaths: node out of range");
  }

  const std::size_t n = topology.node_count();
  std::vector<bool> no_links(topology.link_count(), false);
  std::vector<bool> no_nodes(n, false);

  std::vector<Route> accepted;
  auto first = Dijkstra(topology, src, dst, ordering, no_links, no_nodes);
  if (!first) return {};
  accepted.push_back(std::move(*first));

  // Candidates keyed by (cost, node sequence) so the pop order is deterministic.
  std::set<std::tuple<Cost, std::vector<NodeId>, std::vector<LinkId>>> candidates;

  for (;;) {
    const Route& last = accepted.back();
    for (std::size_t i = 0; i + 1 < last.nodes.size(); ++i) {
      const NodeId spur = last.nodes[i];
      std::vector<bool> link_removed(topology.link_count(), false);
      std::vector<bool> node_removed(n, false);
      for (const Route& p : accepted) {
        if (p.nodes.size() > i + 1 && std::equal(last.nodes.begin(), last.nodes.begin() + i + 1, p.nodes.begin())) {
          link_removed[p.links[i]] = true;
        }
      }
      for (std::size_t j = 0; j < i; ++j) node_removed[last.nodes[j]] = true;

      auto spur_route = Dijkstra(topology, spur, dst, ordering, link_removed, node_removed);
      if (!spur_route) continue;
      Route total;
      total.nodes.assign(last.nodes.begin(), last.nodes.begin() + i);
      total.nodes.insert(total.nodes.end(), spur_route->nodes.begin(), spur_route->nodes.end());
      total.links.assign(last.links.begin(), last.links.begin() + i);
      total.links.insert(total.links.end(), spur_route->links.begin(), spur_route->links.end());
      candidates.emplace(PathCost(topology, total.links, ordering), total.nodes, total.links);
    }

    // Drop candidates that were already accepted via another spur.
    while (!candidates.empty()) {
      const auto& nodes = std::get<1>(*candidates.begin());
      const bool duplicate = std::any_of(accepted.begin(), accepted.end(), [&](const Route& r) { return r.nodes == nodes; });
      if (!duplicate) break;
      candidates.erase(candidates.begin());
    }
    if (candidates.empty()) break;

    const Cost next_cost = std::get<0>(*candidates.begin());
    if (static_cast<int>(accepted.size()) >= k) {
      const Cost kth = PathCost(topology, accepted[static_cast<std::size_t>(k) - 1].links, ordering);
      if (!CostTies(next_cost, kth)) break;
    }
    auto node = candidates.extract(candidates.begin());
    accepted.push_back(Route{std::move(std::get<1>(node.value())), std::move(std::get<2>(node.value()))});
  }

  std::vector<CandidatePath> paths;
  paths.reserve(accepted.size());
  for (auto& r : accepted) paths.push_back(ToCandidate(topology, std::move(r)));
  std::stable_sort(paths.begin(), paths.end(),
                   [ordering](const CandidatePath& x, const CandidatePath& y) { return PathRanksBefore(x, y, ordering); });
  if (static_cast<int>(paths.size()) > k) paths.resize(static_cast<std::size_t>(k));
  return paths;
}

}  // namespace lightpath
