#include "lightpath/agent/observation.hpp"

#include <algorithm>

namespace lightpath::agent {

int NodeFeatureCount() { return 3; }

int EdgeFeatureCount(int channels, const ObservationConfig& config) {
  return config.capacity_features ? 2 * channels : channels;
}

int GlobalFeatureCount(int nodes) { return 2 * nodes + 1; }

GraphObservation EncodeObservation(const NetworkState& state, const ObservationConfig& config) {
  const PathTable& table = state.table();
  const Topology& topo = table.topology();
  const auto n = static_cast<Eigen::Index>(topo.node_count());
  const auto e = static_cast<Eigen::Index>(topo.link_count());
  const int S = state.channels();
  const ServiceRequest& req = state.request();

  GraphObservation obs;
  obs.pair = topo.pair_index(req.source, req.destination);

  std::size_t max_degree = 1;
  for (NodeId v = 0; v < topo.node_count(); ++v) max_degree = std::max(max_degree, topo.degree(v));
  obs.node = FeatureMatrix::Zero(n, NodeFeatureCount());
  for (NodeId v = 0; v < topo.node_count(); ++v) {
    obs.node(v, 0) = static_cast<float>(topo.degree(v)) / static_cast<float>(max_degree);
  }
  obs.node(req.source, 1) = 1.0f;
  obs.node(req.destination, 2) = 1.0f;

  obs.edge = FeatureMatrix::Zero(e, EdgeFeatureCount(S, config));
  for (LinkId link = 0; link < topo.link_count(); ++link) {
    for (int s = 0; s < S; ++s) {
      const LightpathId id = state.occupancy(link, s);
      if (id == kFreeChannel) continue;
      obs.edge(link, s) = 1.0f;
      if (config.capacity_features) {
        const Lightpath& lp = state.lightpath(id);
        obs.edge(link, S + s) = static_cast<float>(lp.remaining_slots) / static_cast<float>(lp.initial_slots);
      }
    }
  }

  obs.global = FeatureMatrix::Zero(1, GlobalFeatureCount(static_cast<int>(n)));
  obs.global(0, req.source) = 1.0f;
  obs.global(0, n + req.destination) = 1.0f;
  obs.global(0, 2 * n) = static_cast<float>(req.size_gbps / table.request_size_gbps());
  return obs;
}

}  // namespace lightpath::agent
