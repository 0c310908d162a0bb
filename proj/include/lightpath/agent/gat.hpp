#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "lightpath/agent/autodiff.hpp"
#include "lightpath/agent/observation.hpp"
#include "lightpath/path_table.hpp"

namespace lightpath::agent {

// Disjoint union of same-topology graphs, with the row maps the message
// passing and readouts need. Row maps are referenced by the tape, so a batch
// must outlive any Backward() over a forward pass that used it.
struct GraphBatch {
  int graphs = 0;
  int nodes_per_graph = 0;
  int edges_per_graph = 0;
  int k = 0;

  Matrix node_features;    // graphs*N x F_node
  Matrix edge_features;    // graphs*E x F_edge
  Matrix global_features;  // graphs x F_global

  RowMap edge_from_endpoints;  // sum of both endpoint nodes
  RowMap edge_from_global;
  RowMap node_from_global;
  // Incidences: one row per (node, incident edge).
  RowMap incidence_from_node;
  RowMap incidence_from_edge;
  std::vector<int> incidence_node;
  RowMap node_from_incidence;
  RowMap graph_node_mean;
  // graphs*K rows: mean over each candidate path's links.
  RowMap path_from_edges;
};

GraphBatch BuildGraphBatch(const PathTable& table, std::span<const GraphObservation* const> observations);

struct GatConfig {
  int node_features = 3;
  int edge_features = 0;
  int global_features = 0;
  int latent = 128;
  int message_passing_steps = 3;
  int mlp_layers = 2;
};

class Linear {
 public:
  Linear() = default;
  Linear(ParameterStore& store, const std::string& name, int in, int out, std::mt19937_64& rng, double gain = 1.0);

  Var operator()(Tape& tape, ParameterStore& store, Var x) const;

  std::size_t weight() const { return weight_; }
  std::size_t bias() const { return bias_; }

 private:
  std::size_t weight_ = 0;
  std::size_t bias_ = 0;
};

// tanh after every layer.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParameterStore& store, const std::string& name, int in, int width, int layers, std::mt19937_64& rng);

  Var operator()(Tape& tape, ParameterStore& store, Var x) const;

 private:
  std::vector<Linear> layers_;
};

struct GatOutput {
  Var node;    // graphs*N x latent
  Var edge;    // graphs*E x latent
  Var global;  // graphs x latent
  std::vector<Var> attention;  // per round, one weight per incidence
};

// Edge-feature graph attention network. Each round: edges concatenate their
// own latent with the summed endpoint latents and the global latent and pass
// through an MLP; a learned attention vector scores every (node, incident
// edge) pair, scores are softmax-normalised over each node's incident edges,
// and the weighted edge messages are summed at nodes; nodes concatenate
// their latent, the aggregate and the global latent and pass through an MLP.
class GatNetwork {
 public:
  GatNetwork() = default;
  GatNetwork(const GatConfig& config, ParameterStore& store, const std::string& prefix, std::mt19937_64& rng);

  GatOutput Forward(Tape& tape, ParameterStore& store, const GraphBatch& batch) const;

  const GatConfig& config() const { return config_; }

 private:
  GatConfig config_;
  Mlp node_encoder_;
  Mlp edge_encoder_;
  Mlp global_encoder_;
  std::vector<Mlp> edge_update_;
  std::vector<Linear> attention_;
  std::vector<Mlp> node_update_;
};

}  // namespace lightpath::agent
