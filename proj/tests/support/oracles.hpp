#pragma once

// Brute-force reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "snnlab/attack.hpp"
#include "snnlab/data.hpp"
#include "snnlab/graph.hpp"
#include "snnlab/network.hpp"

namespace oracle {

inline constexpr int kInf = std::numeric_limits<int>::max() / 4;

inline std::vector<std::vector<int>> floyd_warshall(const snnlab::UndirectedGraph& g) {
  const int n = g.vertex_count();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// Enumerates every simple path from s to t of exactly `len` hops and counts,
// per vertex, how many of them pass through it as an interior vertex.
inline void count_paths(const snnlab::UndirectedGraph& g, int at, int t, int len, std::vector<int>& path,
                        std::vector<char>& on_path, long& total, std::vector<long>& through) {
  if (static_cast<int>(path.size()) - 1 == len) {
    if (at == t) {
      ++total;
      for (std::size_t i = 1; i + 1 < path.size(); ++i) ++through[path[i]];
    }
    return;
  }
  for (int w : g.neighbors(at)) {
    if (on_path[w]) continue;
    on_path[w] = 1;
    path.push_back(w);
    count_paths(g, w, t, len, path, on_path, total, through);
    path.pop_back();
    on_path[w] = 0;
  }
}

struct Metrics {
  std::vector<int> component;  // largest component vertex set (ties: lowest min id)
  double density = 0;
  double avg_path_length = 0;
  double avg_eccentricity = 0;
  int diameter = 0;
  std::vector<double> betweenness;
  std::vector<double> closeness;
  std::vector<int> eccentricity;
};

inline Metrics metrics(const snnlab::UndirectedGraph& g) {
  const int n = g.vertex_count();
  const auto d = floyd_warshall(g);
  Metrics m;
  m.density = n > 1 ? 2.0 * static_cast<double>(g.edge_count()) / (static_cast<double>(n) * (n - 1)) : 0.0;
  // components from the distance matrix
  std::vector<char> seen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<int> comp;
    for (int v = 0; v < n; ++v) {
      if (d[s][v] < kInf) {
        comp.push_back(v);
        seen[v] = 1;
      }
    }
    if (comp.size() > m.component.size()) m.component = comp;
  }
  const auto& c = m.component;
  const int k = static_cast<int>(c.size());
  m.betweenness.assign(n, 0.0);
  m.closeness.assign(n, 0.0);
  m.eccentricity.assign(n, 0);
  double sum = 0;
  long pairs = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      sum += d[c[i]][c[j]];
      ++pairs;
      m.diameter = std::max(m.diameter, d[c[i]][c[j]]);
      long total = 0;
      std::vector<long> through(n, 0);
      std::vector<int> path{c[i]};
      std::vector<char> on_path(n, 0);
      on_path[c[i]] = 1;
      count_paths(g, c[i], c[j], d[c[i]][c[j]], path, on_path, total, through);
      for (int v = 0; v < n; ++v) m.betweenness[v] += static_cast<double>(through[v]) / static_cast<double>(total);
    }
  }
  m.avg_path_length = pairs ? sum / static_cast<double>(pairs) : 0.0;
  if (k > 2) {
    const double norm = (k - 1.0) * (k - 2.0) / 2.0;
    for (double& b : m.betweenness) b /= norm;
  } else {
    std::fill(m.betweenness.begin(), m.betweenness.end(), 0.0);
  }
  double ecc_sum = 0;
  for (int v : c) {
    int ecc = 0;
    long dist = 0;
    for (int w : c) {
      ecc = std::max(ecc, d[v][w]);
      dist += d[v][w];
    }
    m.eccentricity[v] = ecc;
    ecc_sum += ecc;
    m.closeness[v] = dist > 0 ? (k - 1.0) / static_cast<double>(dist) : 0.0;
  }
  m.avg_eccentricity = k ? ecc_sum / k : 0.0;
  return m;
}

// 1 - 6 sum d^2 / (n (n^2 - 1)); valid without ties.
inline double spearman_no_ties(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto rank = [n](const std::vector<double>& v) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = 1;
      for (std::size_t j = 0; j < n; ++j) r[i] += v[j] < v[i] ? 1 : 0;
    }
    return r;
  };
  const auto rx = rank(x), ry = rank(y);
  double d2 = 0;
  for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
}

// Tau-b from explicit pair classification.
inline double kendall_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  long c = 0, d = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double a = x[i] - x[j], b = y[i] - y[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) ++tx;
      else if (b == 0) ++ty;
      else if ((a > 0) == (b > 0)) ++c;
      else ++d;
    }
  }
  return static_cast<double>(c - d) / std::sqrt(static_cast<double>(c + d + tx) * static_cast<double>(c + d + ty));
}

// Random Erdos-Renyi graph.
inline snnlab::UndirectedGraph random_graph(int n, double p, std::mt19937_64& rng) {
  snnlab::UndirectedGraph g(n);
  std::bernoulli_distribution coin(p);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) g.add_edge(u, v);
  return g;
}

// Random layered network from a random DAG with at least one skip group.
inline snnlab::MaskedNetwork random_network(std::mt19937_64& rng, int max_hidden, int input_dim, int output_dim) {
  std::uniform_int_distribution<int> size_dist(4, max_hidden);
  for (;;) {
    const int n = size_dist(rng);
    auto g = random_graph(n, 0.3, rng);
    auto ld = snnlab::layer_dag(snnlab::to_dag(g));
    auto net = snnlab::build_network(ld, input_dim, output_dim);
    bool skip = false;
    for (const auto& grp : net.groups) {
      if (grp.source != snnlab::kInputLayer && grp.target != net.output_layer() && grp.target - grp.source > 1) skip = true;
    }
    if (!skip) continue;
    snnlab::init_weights(net, snnlab::InitMethod::kHeUniform, rng());
    std::normal_distribution<double> noise(0.0, 0.1);
    for (auto& b : net.biases)
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = noise(rng);
    net.touch();
    return net;
  }
}

// Class c images light up a class-specific block of pixels (plus noise), so a
// small network can fit them quickly.
inline snnlab::Dataset synthetic_digits(std::size_t n, int classes, std::uint64_t seed) {
  snnlab::Dataset ds;
  ds.split = "synthetic";
  ds.pixels.assign(n * 784, 0.0f);
  ds.labels.resize(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 0.3f);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
    ds.labels[i] = c;
    float* img = ds.pixels.data() + i * 784;
    for (int p = 0; p < 784; ++p) img[p] = u(rng);
    const int r0 = (c % 4) * 7, c0 = (c / 4) * 7;
    for (int r = r0; r < r0 + 7; ++r)
      for (int q = c0; q < c0 + 7; ++q) img[r * 28 + q] = 1.0f;
  }
  return ds;
}

}  // namespace oracle
