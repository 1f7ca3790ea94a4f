#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace snnlab {

// Raised when an operation receives structurally invalid input (cycles,
// self-loops, out-of-range vertices, bad generator parameters).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  int u = 0;
  int v = 0;
  auto operator<=>(const Edge&) const = default;
};

// Simple undirected graph: no self-loops, no parallel edges.
class UndirectedGraph {
 public:
  explicit UndirectedGraph(int vertex_count);
  static UndirectedGraph from_edges(int vertex_count, std::span<const Edge> edges);

  int vertex_count() const { return n_; }
  std::size_t edge_count() const { return edge_count_; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }

  bool has_edge(int u, int v) const;
  void add_edge(int u, int v);
  void remove_edge(int u, int v);

  // All edges as (min, max) pairs in lexicographic order.
  std::vector<Edge> edges() const;
  // Dense symmetric 0/1 adjacency matrix, row-major n*n.
  std::vector<std::uint8_t> adjacency_matrix() const { return matrix_; }

 private:
  void check_vertex(int v) const;

  int n_;
  std::size_t edge_count_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<std::uint8_t> matrix_;
};

// Directed graph whose every edge (u, v) satisfies u < v, hence acyclic.
class Dag {
 public:
  Dag(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  // Sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& predecessors(int v) const { return pred_[v]; }
  const std::vector<int>& successors(int v) const { return succ_[v]; }
  int in_degree(int v) const { return static_cast<int>(pred_[v].size()); }
  int out_degree(int v) const { return static_cast<int>(succ_[v].size()); }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> pred_;
  std::vector<std::vector<int>> succ_;
};

struct LayeredDag {
  Dag dag;
  std::vector<int> layer_index;           // per vertex
  std::vector<std::vector<int>> layers;   // vertices per layer, ascending ids
  std::vector<int> sources;               // in-degree 0
  std::vector<int> sinks;                 // out-degree 0

  int layer_count() const { return static_cast<int>(layers.size()); }
};

struct WsParams {
  int size = 0;
  int nei = 0;
  double p = 0.0;
};

struct GraphMetrics {
  int vertex_count = 0;
  std::size_t edge_count = 0;
  double density_undirected = 0.0;
  double density_directed = 0.0;
  // Path-based metrics below are over the largest connected component when
  // `disconnected` is set.
  bool disconnected = false;
  int component_size = 0;
  int diameter = 0;
  double avg_path_length = 0.0;
  double avg_eccentricity = 0.0;
  double avg_betweenness = 0.0;   // normalized by (n-1)(n-2)/2
  double avg_closeness = 0.0;     // (n-1) / sum of distances
  std::map<int, int> degree_distribution;       // degree -> vertex count
  std::map<int, long> path_length_distribution;  // hops -> unordered pair count
  // Per-vertex centralities of the analysed component, indexed by vertex id;
  // vertices outside the component hold 0.
  std::vector<double> betweenness;
  std::vector<double> closeness;
  std::vector<int> eccentricity;
};

// Watts-Strogatz small-world graph: ring lattice with each vertex joined to
// its `nei` nearest neighbours on either side, then each lattice edge
// (u, u+k) rewired with probability p to (u, w), w uniform over vertices that
// are neither u nor already adjacent to u. Deterministic for a given seed.
UndirectedGraph generate_ws(const WsParams& params, std::uint64_t seed);

// Orients every edge {i, j}, i < j, as i -> j (lower-triangular adjacency).
Dag to_dag(const UndirectedGraph& g);

// Forgets edge directions.
UndirectedGraph to_undirected(const Dag& d);

// Assigns layer 0 to in-degree-0 vertices and 1 + max(predecessor layer) to
// every other vertex, visiting a vertex only once all its predecessors have
// an index.
LayeredDag layer_dag(const Dag& d);

// Layered DAG of fully connected consecutive layers, vertex ids assigned in
// layer order. Used for the dense pruning baseline.
LayeredDag dense_layered_dag(std::span<const int> layer_units);

GraphMetrics compute_metrics(const UndirectedGraph& g);

// Connected components as vertex lists; components in order of smallest id.
std::vector<std::vector<int>> connected_components(const UndirectedGraph& g);

}  // namespace snnlab
