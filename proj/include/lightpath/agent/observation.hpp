#pragma once

#include <Eigen/Dense>

#include "lightpath/environment.hpp"

namespace lightpath::agent {

using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ObservationConfig {
  // Appends per-channel remaining lightpath capacity (remaining / initial
  // slots, 0 on free channels) to the binary occupancy edge features.
  bool capacity_features = true;
};

// Graph view of one decision point. Node features: normalised degree,
// is-source, is-destination. Edge features: channel occupancy (1 where a
// lightpath holds the channel), optionally followed by remaining capacity.
// Global features: one-hot source, one-hot destination, normalised size.
struct GraphObservation {
  FeatureMatrix node;
  FeatureMatrix edge;
  FeatureMatrix global;  // 1 row
  PairIndex pair = 0;
};

int NodeFeatureCount();
int EdgeFeatureCount(int channels, const ObservationConfig& config);
int GlobalFeatureCount(int nodes);

GraphObservation EncodeObservation(const NetworkState& state, const ObservationConfig& config);

}  // namespace lightpath::agent
