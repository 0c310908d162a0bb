#include "lightpath/agent/gat.hpp"

#include <cmath>
#include <stdexcept>

namespace lightpath::agent {

GraphBatch BuildGraphBatch(const PathTable& table, std::span<const GraphObservation* const> observations) {
  const Topology& topo = table.topology();
  GraphBatch b;
  b.graphs = static_cast<int>(observations.size());
  b.nodes_per_graph = static_cast<int>(topo.node_count());
  b.edges_per_graph = static_cast<int>(topo.link_count());
  b.k = table.k();
  if (b.graphs == 0) throw std::invalid_argument("BuildGraphBatch: empty batch");

  const int N = b.nodes_per_graph;
  const int E = b.edges_per_graph;
  const GraphObservation& first = *observations.front();
  b.node_features.resize(b.graphs * N, first.node.cols());
  b.edge_features.resize(b.graphs * E, first.edge.cols());
  b.global_features.resize(b.graphs, first.global.cols());

  b.edge_from_endpoints.out_rows = b.graphs * E;
  b.edge_from_global.out_rows = b.graphs * E;
  b.node_from_global.out_rows = b.graphs * N;
  b.incidence_from_node.out_rows = b.graphs * 2 * E;
  b.incidence_from_edge.out_rows = b.graphs * 2 * E;
  b.node_from_incidence.out_rows = b.graphs * N;
  b.graph_node_mean.out_rows = b.graphs;
  b.path_from_edges.out_rows = b.graphs * b.k;

  for (int g = 0; g < b.graphs; ++g) {
    const GraphObservation& obs = *observations[static_cast<std::size_t>(g)];
    if (obs.node.rows() != N || obs.edge.rows() != E || obs.node.cols() != b.node_features.cols() ||
        obs.edge.cols() != b.edge_features.cols() || obs.global.cols() != b.global_features.cols()) {
      throw std::invalid_argument("BuildGraphBatch: observation shape mismatch");
    }
    b.node_features.middleRows(g * N, N) = obs.node.cast<double>();
    b.edge_features.middleRows(g * E, E) = obs.edge.cast<double>();
    b.global_features.row(g) = obs.global.row(0).cast<double>();

    const int n0 = g * N;
    const int e0 = g * E;
    for (int v = 0; v < N; ++v) {
      b.node_from_global.Add(n0 + v, g);
      b.graph_node_mean.Add(g, n0 + v, 1.0 / N);
    }
    for (int e = 0; e < E; ++e) {
      const Link& l = topo.link(static_cast<LinkId>(e));
      b.edge_from_endpoints.Add(e0 + e, n0 + static_cast<int>(l.a));
      b.edge_from_endpoints.Add(e0 + e, n0 + static_cast<int>(l.b));
      b.edge_from_global.Add(e0 + e, g);
      for (NodeId end : {l.a, l.b}) {
        const int inc = static_cast<int>(b.incidence_node.size());
        b.incidence_from_node.Add(inc, n0 + static_cast<int>(end));
        b.incidence_from_edge.Add(inc, e0 + e);
        b.incidence_node.push_back(n0 + static_cast<int>(end));
        b.node_from_incidence.Add(n0 + static_cast<int>(end), inc);
      }
    }
    const auto paths = table.paths(obs.pair);
    for (int k = 0; k < static_cast<int>(paths.size()); ++k) {
      const CandidatePath& p = paths[static_cast<std::size_t>(k)];
      for (LinkId link : p.links) b.path_from_edges.Add(g * b.k + k, e0 + static_cast<int>(link), 1.0 / p.hops());
    }
  }
  return b;
}

Linear::Linear(ParameterStore& store, const std::string& name, int in, int out, std::mt19937_64& rng, double gain) {
  // Glorot-normal weights, zero bias.
  std::normal_distribution<double> normal(0.0, gain * std::sqrt(2.0 / (in + out)));
  Matrix w(in, out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
  weight_ = store.Add(name + "/w", std::move(w));
  bias_ = store.Add(name + "/b", Matrix::Zero(1, out));
}

Var Linear::operator()(Tape& tape, ParameterStore& store, Var x) const {
  return AddRow(tape, MatMul(tape, x, tape.Param(store, weight_)), tape.Param(store, bias_));
}

Mlp::Mlp(ParameterStore& store, const std::string& name, int in, int width, int layers, std::mt19937_64& rng) {
  if (layers < 1) throw std::invalid_argument("Mlp: need at least one layer");
  for (int i = 0; i < layers; ++i) {
    layers_.emplace_back(store, name + "/" + std::to_string(i), i == 0 ? in : width, width, rng);
  }
}

Var Mlp::operator()(Tape& tape, ParameterStore& store, Var x) const {
  for (const Linear& layer : layers_) x = Tanh(tape, layer(tape, store, x));
  return x;
}

GatNetwork::GatNetwork(const GatConfig& config, ParameterStore& store, const std::string& prefix, std::mt19937_64& rng)
    : config_(config) {
  const int d = config.latent;
  const int L = config.mlp_layers;
  if (d < 1 || config.message_passing_steps < 1) throw std::invalid_argument("GatNetwork: bad config");
  node_encoder_ = Mlp(store, prefix + "/node_encoder", config.node_features, d, L, rng);
  edge_encoder_ = Mlp(store, prefix + "/edge_encoder", config.edge_features, d, L, rng);
  global_encoder_ = Mlp(store, prefix + "/global_encoder", config.global_features, d, L, rng);
  for (int r = 0; r < config.message_passing_steps; ++r) {
    const std::string round = prefix + "/round" + std::to_string(r);
    edge_update_.emplace_back(store, round + "/edge_mlp", 3 * d, d, L, rng);
    attention_.emplace_back(store, round + "/attention", 2 * d, 1, rng);
    node_update_.emplace_back(store, round + "/node_mlp", 3 * d, d, L, rng);
  }
}

GatOutput GatNetwork::Forward(Tape& tape, ParameterStore& store, const GraphBatch& batch) const {
  GatOutput out;
  Var node = node_encoder_(tape, store, tape.Constant(batch.node_features));
  Var edge = edge_encoder_(tape, store, tape.Constant(batch.edge_features));
  const Var global = global_encoder_(tape, store, tape.Constant(batch.global_features));
  const Var global_at_edges = MapRows(tape, global, batch.edge_from_global);
  const Var global_at_nodes = MapRows(tape, global, batch.node_from_global);
  const int total_nodes = batch.graphs * batch.nodes_per_graph;

  for (std::size_t r = 0; r < edge_update_.size(); ++r) {
    const Var endpoints = MapRows(tape, node, batch.edge_from_endpoints);
    const Var message = edge_update_[r](tape, store, ConcatCols(tape, {edge, endpoints, global_at_edges}));

    const Var message_at_incidence = MapRows(tape, message, batch.incidence_from_edge);
    const Var node_at_incidence = MapRows(tape, node, batch.incidence_from_node);
    const Var score = LeakyRelu(tape, attention_[r](tape, store, ConcatCols(tape, {node_at_incidence, message_at_incidence})));
    const Var weight = SegmentSoftmax(tape, score, batch.incidence_node, total_nodes);
    out.attention.push_back(weight);

    const Var aggregate = MapRows(tape, ScaleRows(tape, message_at_incidence, weight), batch.node_from_incidence);
    node = node_update_[r](tape, store, ConcatCols(tape, {node, aggregate, global_at_nodes}));
    edge = message;
  }
  out.node = node;
  out.edge = edge;
  out.global = global;
  return out;
}

}  // namespace lightpath::agent
