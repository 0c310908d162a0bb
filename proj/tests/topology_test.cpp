#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "lightpath/path_table.hpp"
#include "lightpath/topology.hpp"
#include "test_util.hpp"

namespace lightpath {
namespace {

using testing::MakeTopology;

TEST(TopologyTest, ParsesNamesAndLinks) {
  const Topology t = ParseTopology(R"({"nodes": ["x", "y", "z"],
      "links": [{"a": "x", "b": "y", "length_km": 10}, {"a": "z", "b": "y", "length_km": 5.5}]})");
  EXPECT_EQ(t.node_count(), 3u);
  EXPECT_EQ(t.link_count(), 2u);
  EXPECT_EQ(t.find("z"), NodeId{2});
  EXPECT_FALSE(t.find("w").has_value());
  EXPECT_EQ(t.link_between(1, 2), LinkId{1});
  EXPECT_EQ(t.link_between(2, 1), LinkId{1});
  EXPECT_FALSE(t.link_between(0, 2).has_value());
  EXPECT_EQ(t.degree(1), 2u);
  EXPECT_DOUBLE_EQ(t.link(1).length_km, 5.5);
}

TEST(TopologyTest, RejectsMalformedInput) {
  EXPECT_THROW(ParseTopology("{not json"), ParseError);
  EXPECT_THROW(ParseTopology(R"({"nodes": ["a"]})"), ParseError);
  auto bad = [](const char* links, const char* nodes = R"(["a", "b", "c"])") {
    return std::string(R"({"nodes": )") + nodes + R"(, "links": )" + links + "}";
  };
  EXPECT_THROW(ParseTopology(bad(R"([{"a": "a", "b": "a", "length_km": 1}, {"a": "b", "b": "c", "length_km": 1}])")),
               ValidationError);
  EXPECT_THROW(ParseTopology(bad(R"([{"a": "a", "b": "q", "length_km": 1}])")), ValidationError);
  EXPECT_THROW(ParseTopology(bad(R"([{"a": "a", "b": "b", "length_km": 0}, {"a": "b", "b": "c", "length_km": 1}])")),
               ValidationError);
  EXPECT_THROW(ParseTopology(bad(R"([{"a": "a", "b": "b", "length_km": 1}, {"a": "b", "b": "a", "length_km": 2},
                                    {"a": "b", "b": "c", "length_km": 1}])")),
               ValidationError);
  EXPECT_THROW(ParseTopology(bad(R"([{"a": "a", "b": "b", "length_km": 1}])")), ValidationError);
  EXPECT_THROW(ParseTopology(bad(R"([{"a": "a", "b": "b", "length_km": 1}])", R"(["a", "a"])")), ValidationError);
}

TEST(TopologyTest, PairIndexRoundTrips) {
  const auto t = testing::House();
  std::set<PairIndex> seen;
  for (NodeId a = 0; a < 5; ++a) {
    for (NodeId b = a + 1; b < 5; ++b) {
      const PairIndex p = t->pair_index(a, b);
      EXPECT_EQ(p, t->pair_index(b, a));
      EXPECT_EQ(t->pair_nodes(p), std::make_pair(a, b));
      seen.insert(p);
    }
  }
  EXPECT_EQ(seen.size(), t->pair_count());
  EXPECT_EQ(*seen.rbegin(), t->pair_count() - 1);
}

TEST(TopologyTest, BundledNsfnetLoads) {
  const Topology t = LoadTopology(std::filesystem::path(LIGHTPATH_TEST_DATA_DIR) / "nsfnet_deeprmsa.json");
  EXPECT_EQ(t.node_count(), 14u);
  EXPECT_EQ(t.link_count(), 22u);
}

// All loopless paths by depth-first search, ranked by the documented key.
std::vector<CandidatePath> AllSimplePaths(const Topology& t, NodeId src, NodeId dst) {
  std::vector<CandidatePath> out;
  std::vector<NodeId> nodes{src};
  std::vector<LinkId> links;
  std::vector<bool> on_path(t.node_count(), false);
  on_path[src] = true;
  std::function<void(NodeId)> dfs = [&](NodeId v) {
    if (v == dst) {
      CandidatePath p;
      p.nodes = nodes;
      p.links = links;
      for (LinkId l : links) p.length_km += t.link(l).length_km;
      out.push_back(p);
      return;
    }
    for (const auto& [w, l] : t.adjacent(v)) {
      if (on_path[w]) continue;
      on_path[w] = true;
      nodes.push_back(w);
      links.push_back(l);
      dfs(w);
      nodes.pop_back();
      links.pop_back();
      on_path[w] = false;
    }
  };
  dfs(src);
  return out;
}

void SortByKey(std::vector<CandidatePath>& paths, PathOrdering ordering) {
  std::sort(paths.begin(), paths.end(), [&](const CandidatePath& a, const CandidatePath& b) {
    const auto ka = ordering == PathOrdering::kHops ? std::make_tuple(a.links.size() * 1.0, a.length_km, a.nodes)
                                                    : std::make_tuple(a.length_km, a.links.size() * 1.0, a.nodes);
    const auto kb = ordering == PathOrdering::kHops ? std::make_tuple(b.links.size() * 1.0, b.length_km, b.nodes)
                                                    : std::make_tuple(b.length_km, b.links.size() * 1.0, b.nodes);
    return ka < kb;
  });
}

std::shared_ptr<const Topology> RandomConnected(std::mt19937_64& rng, int n, int extra, bool integer_lengths) {
  std::uniform_real_distribution<double> len(50, 500);
  std::uniform_int_distribution<int> small(1, 3);
  std::vector<std::tuple<int, int, double>> links;
  std::set<std::pair<int, int>> used;
  auto length = [&] { return integer_lengths ? 100.0 * small(rng) : std::round(len(rng)); };
  for (int v = 1; v < n; ++v) {
    const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    links.emplace_back(u, v, length());
    used.insert({u, v});
  }
  for (int i = 0; i < extra; ++i) {
    int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
    int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!used.insert({a, b}).second) continue;
    links.emplace_back(a, b, length());
  }
  return MakeTopology(n, links);
}

TEST(KShortestPathsTest, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    // Integer lengths on half the graphs force ties in both keys.
    const auto t = RandomConnected(rng, 5 + trial % 4, 6, trial % 2 == 0);
    for (PathOrdering ordering : {PathOrdering::kHops, PathOrdering::kLength}) {
      for (NodeId s = 0; s < t->node_count(); ++s) {
        for (NodeId d = s + 1; d < t->node_count(); ++d) {
          auto oracle = AllSimplePaths(*t, s, d);
          SortByKey(oracle, ordering);
          for (int k : {1, 3, 6}) {
            const auto got = KShortestPaths(*t, s, d, k, ordering);
            ASSERT_EQ(got.size(), std::min<std::size_t>(k, oracle.size()));
            for (std::size_t i = 0; i < got.size(); ++i) {
              EXPECT_EQ(got[i].nodes, oracle[i].nodes) << "trial " << trial << " rank " << i;
              EXPECT_EQ(got[i].links, oracle[i].links);
              EXPECT_DOUBLE_EQ(got[i].length_km, oracle[i].length_km);
            }
          }
        }
      }
    }
  }
}

TEST(KShortestPathsTest, RingHasExactlyTwoPaths) {
  const auto t = testing::Ring(6);
  const auto paths = KShortestPaths(*t, 0, 2, 5, PathOrdering::kHops);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[0].hops(), 2);
  EXPECT_EQ(paths[1].hops(), 4);
}

TEST(KShortestPathsTest, InvalidArguments) {
  const auto t = testing::Triangle();
  EXPECT_THROW(KShortestPaths(*t, 1, 1, 2, PathOrdering::kHops), std::invalid_argument);
  EXPECT_THROW(KShortestPaths(*t, 0, 1, 0, PathOrdering::kHops), std::invalid_argument);
}

TEST(PathTableTest, HoldsRankedPathsPerPair) {
  const auto table = testing::MakeTable(testing::House(), 3, 8);
  EXPECT_EQ(table->pair_count(), 10u);
  for (PairIndex p = 0; p < table->pair_count(); ++p) {
    const auto [a, b] = table->topology().pair_nodes(p);
    const auto paths = table->paths(p);
    ASSERT_GE(paths.size(), 1u);
    EXPECT_LE(paths.size(), 3u);
    for (std::size_t r = 0; r < paths.size(); ++r) {
      EXPECT_EQ(paths[r].nodes.front(), a);
      EXPECT_EQ(paths[r].nodes.back(), b);
      EXPECT_GT(paths[r].capacity_gbps, 0.0);
      if (r > 0) {
        EXPECT_TRUE(PathRanksBefore(paths[r - 1], paths[r], PathOrdering::kHops));
      }
    }
  }
}

TEST(PathTableTest, FingerprintTracksConfiguration) {
  const auto topo = testing::House();
  const auto a = testing::MakeTable(topo, 3, 8);
  const auto b = testing::MakeTable(topo, 3, 8);
  EXPECT_EQ(a->Fingerprint(), b->Fingerprint());
  EXPECT_NE(a->Fingerprint(), testing::MakeTable(topo, 2, 8)->Fingerprint());
  EXPECT_NE(a->Fingerprint(), testing::MakeTable(topo, 3, 9)->Fingerprint());
  EXPECT_NE(a->Fingerprint(), testing::MakeTable(topo, 3, 8, 0.003)->Fingerprint());
  EXPECT_NE(a->Fingerprint(), testing::MakeTable(topo, 3, 8, 0.002, PathOrdering::kLength)->Fingerprint());
}

TEST(PathOrderingTest, ParsesNames) {
  EXPECT_EQ(ParsePathOrdering("hops"), PathOrdering::kHops);
  EXPECT_EQ(ParsePathOrdering("length"), PathOrdering::kLength);
  EXPECT_THROW(ParsePathOrdering("km"), ParseError);
}

}  // namespace
}  // namespace lightpath
