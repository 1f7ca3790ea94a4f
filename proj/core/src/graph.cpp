#include "snnlab/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "snnlab/seeding.hpp"

namespace snnlab {

UndirectedGraph::UndirectedGraph(int vertex_count) : n_(vertex_count) {
  if (vertex_count < 0) throw StructuralError("negative vertex count");
  adj_.resize(n_);
  matrix_.assign(static_cast<std::size_t>(n_) * n_, 0);
}

UndirectedGraph UndirectedGraph::from_edges(int vertex_count, std::span<const Edge> edges) {
  UndirectedGraph g(vertex_count);
  for (const Edge& e : edges) g.add_edge(e.u, e.v);
  return g;
}

void UndirectedGraph::check_vertex(int v) const {
  if (v < 0 || v >= n_) throw StructuralError("vertex " + std::to_string(v) + " out of range");
}

bool UndirectedGraph::has_edge(int u, int v) const {
  check_vertex(u);
  check_vertex(v);
  return matrix_[static_cast<std::size_t>(u) * n_ + v] != 0;
}

void UndirectedGraph::add_edge(int u, int v) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) throw StructuralError("self-loop on vertex " + std::to_string(u));
  if (has_edge(u, v)) {
    throw StructuralError("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
  }
  matrix_[static_cast<std::size_t>(u) * n_ + v] = 1;
  matrix_[static_cast<std::size_t>(v) * n_ + u] = 1;
  adj_[u].push_back(v);
  adj_[v].push_back(u);
  ++edge_count_;
}

void UndirectedGraph::remove_edge(int u, int v) {
  if (!has_edge(u, v)) {
    throw StructuralError("no edge " + std::to_string(u) + "-" + std::to_string(v));
  }
  matrix_[static_cast<std::size_t>(u) * n_ + v] = 0;
  matrix_[static_cast<std::size_t>(v) * n_ + u] = 0;
  std::erase(adj_[u], v);
  std::erase(adj_[v], u);
  --edge_count_;
}

std::vector<Edge> UndirectedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int u = 0; u < n_; ++u) {
    for (int v : adj_[u]) {
      if (u < v) out.push_back({u, v});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dag::Dag(int vertex_count, std::vector<Edge> edges) : n_(vertex_count), edges_(std::move(edges)) {
  if (n_ < 0) throw StructuralError("negative vertex count");
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw StructuralError("duplicate directed edge");
  }
  pred_.resize(n_);
  succ_.resize(n_);
  for (const Edge& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_) {
      throw StructuralError("directed edge endpoint out of range");
    }
    if (e.u >= e.v) {
      throw StructuralError("directed edge " + std::to_string(e.u) + "->" + std::to_string(e.v) +
                            " violates index orientation");
    }
    pred_[e.v].push_back(e.u);
    succ_[e.u].push_back(e.v);
  }
}

UndirectedGraph generate_ws(const WsParams& params, std::uint64_t seed) {
  const int n = params.size;
  const int k = params.nei;
  if (k < 1) throw StructuralError("nei must be >= 1");
  if (n < 2 * k + 1) throw StructuralError("size must be >= 2*nei + 1");
  if (!(params.p >= 0.0 && params.p <= 1.0)) throw StructuralError("p must lie in [0, 1]");

  UndirectedGraph g(n);
  for (int j = 1; j <= k; ++j) {
    for (int u = 0; u < n; ++u) g.add_edge(u, (u + j) % n);
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int j = 1; j <= k; ++j) {
    for (int u = 0; u < n; ++u) {
      if (coin(rng) >= params.p) continue;
      if (g.degree(u) >= n - 1) continue;  // no admissible target
      int w = pick(rng);
      while (w == u || g.has_edge(u, w)) w = pick(rng);
      g.remove_edge(u, (u + j) % n);
      g.add_edge(u, w);
    }
  }
  return g;
}

Dag to_dag(const UndirectedGraph& g) { return Dag(g.vertex_count(), g.edges()); }

UndirectedGraph to_undirected(const Dag& d) {
  return UndirectedGraph::from_edges(d.vertex_count(), d.edges());
}

LayeredDag layer_dag(const Dag& d) {
  const int n = d.vertex_count();
  LayeredDag out{d, std::vector<int>(n, -1), {}, {}, {}};

  // Kahn-style sweep: a vertex becomes ready once all predecessors are indexed.
  std::vector<int> pending(n);
  std::queue<int> ready;
  for (int v = 0; v < n; ++v) {
    pending[v] = d.in_degree(v);
    if (pending[v] == 0) {
      out.layer_index[v] = 0;
      ready.push(v);
    }
  }
  int assigned = 0;
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop();
    ++assigned;
    for (int w : d.successors(v)) {
      if (--pending[w] == 0) {
        int idx = 0;
        for (int s : d.predecessors(w)) idx = std::max(idx, out.layer_index[s]);
        out.layer_index[w] = idx + 1;
        ready.push(w);
      }
    }
  }
  if (assigned != n) throw StructuralError("cycle detected while layering");

  int layer_count = 0;
  for (int idx : out.layer_index) layer_count = std::max(layer_count, idx + 1);
  out.layers.resize(layer_count);
  for (int v = 0; v < n; ++v) {
    out.layers[out.layer_index[v]].push_back(v);
    if (d.in_degree(v) == 0) out.sources.push_back(v);
    if (d.out_degree(v) == 0) out.sinks.push_back(v);
  }
  return out;
}

LayeredDag dense_layered_dag(std::span<const int> layer_units) {
  std::vector<Edge> edges;
  int offset = 0;
  int total = 0;
  for (int u : layer_units) {
    if (u < 1) throw StructuralError("dense layer needs at least one unit");
    total += u;
  }
  for (std::size_t l = 0; l + 1 < layer_units.size(); ++l) {
    const int next = offset + layer_units[l];
    for (int a = 0; a < layer_units[l]; ++a) {
      for (int b = 0; b < layer_units[l + 1]; ++b) edges.push_back({offset + a, next + b});
    }
    offset = next;
  }
  return layer_dag(Dag(total, std::move(edges)));
}

std::vector<std::vector<int>> connected_components(const UndirectedGraph& g) {
  const int n = g.vertex_count();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> members{s};
    comp[s] = static_cast<int>(out.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (int w : g.neighbors(members[i])) {
        if (comp[w] < 0) {
          comp[w] = comp[s];
          members.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

GraphMetrics compute_metrics(const UndirectedGraph& g) {
  const int n = g.vertex_count();
  GraphMetrics m;
  m.vertex_count = n;
  m.edge_count = g.edge_count();
  if (n >= 2) {
    const double pairs = static_cast<double>(n) * (n - 1);
    m.density_undirected = static_cast<double>(m.edge_count) / (pairs / 2.0);
    m.density_directed = static_cast<double>(m.edge_count) / pairs;
  }
  for (int v = 0; v < n; ++v) ++m.degree_distribution[g.degree(v)];
  m.betweenness.assign(n, 0.0);
  m.closeness.assign(n, 0.0);
  m.eccentricity.assign(n, 0);
  if (n == 0) return m;

  const auto components = connected_components(g);
  m.disconnected = components.size() > 1;
  const std::vector<int>* largest = &components.front();
  for (const auto& c : components) {
    if (c.size() > largest->size()) largest = &c;
  }
  const std::vector<int>& comp = *largest;
  const int c = static_cast<int>(comp.size());
  m.component_size = c;

  // Brandes accumulation with unweighted BFS from every component vertex.
  std::vector<int> dist(n, -1);
  std::vector<double> sigma(n, 0.0);
  std::vector<double> delta(n, 0.0);
  std::vector<std::vector<int>> preds(n);
  std::vector<int> order;
  order.reserve(c);
  double sum_all_distances = 0.0;
  long ecc_sum = 0;
  for (int s : comp) {
    for (int v : comp) {
      dist[v] = -1;
      sigma[v] = 0.0;
      delta[v] = 0.0;
      preds[v].clear();
    }
    order.clear();
    dist[s] = 0;
    sigma[s] = 1.0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      order.push_back(v);
      for (int w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    long dist_sum = 0;
    int ecc = 0;
    for (int v : comp) {
      dist_sum += dist[v];
      ecc = std::max(ecc, dist[v]);
      if (v > s) ++m.path_length_distribution[dist[v]];
    }
    m.eccentricity[s] = ecc;
    ecc_sum += ecc;
    sum_all_distances += static_cast<double>(dist_sum);
    m.closeness[s] = dist_sum > 0 ? static_cast<double>(c - 1) / static_cast<double>(dist_sum) : 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (int v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) m.betweenness[w] += delta[w];
    }
  }

  // Each unordered pair was counted from both endpoints.
  const double norm = c > 2 ? static_cast<double>(c - 1) * (c - 2) / 2.0 : 0.0;
  double btw_sum = 0.0;
  double clo_sum = 0.0;
  for (int v : comp) {
    m.betweenness[v] = norm > 0.0 ? (m.betweenness[v] / 2.0) / norm : 0.0;
    btw_sum += m.betweenness[v];
    clo_sum += m.closeness[v];
    m.diameter = std::max(m.diameter, m.eccentricity[v]);
  }
  m.avg_betweenness = btw_sum / c;
  m.avg_closeness = clo_sum / c;
  m.avg_eccentricity = static_cast<double>(ecc_sum) / c;
  m.avg_path_length = c > 1 ? sum_all_distances / (static_cast<double>(c) * (c - 1)) : 0.0;
  return m;
}

}  // namespace snnlab
