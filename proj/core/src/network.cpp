#include "snnlab/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "snnlab/seeding.hpp"

namespace snnlab {

std::string_view to_string(InitMethod m) {
  switch (m) {
    case InitMethod::kGlorotNormal: return "G_N";
    case InitMethod::kGlorotUniform: return "G_U";
    case InitMethod::kHeNormal: return "He_N";
    case InitMethod::kHeUniform: return "He_U";
    case InitMethod::kNormal: return "N";
    case InitMethod::kUniform: return "U";
  }
  return "?";
}

InitMethod parse_init_method(std::string_view name) {
  for (InitMethod m : kAllInitMethods) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown init method '" + std::string(name) + "'");
}

int MaskedNetwork::units(int layer) const {
  if (layer == kInputLayer) return input_dim;
  if (layer == output_layer()) return output_dim;
  return layer_units.at(layer);
}

void MaskedNetwork::enforce_masks() {
  for (WeightGroup& g : groups) g.weights = g.weights.cwiseProduct(g.mask);
  touch();
}

void MaskedNetwork::reindex() {
  incoming_.assign(hidden_layers() + 1, {});
  for (std::size_t i = 0; i < groups.size(); ++i) {
    incoming_.at(groups[i].target).push_back(static_cast<int>(i));
  }
  touch();
}

MaskedNetwork build_network(const LayeredDag& ld, int input_dim, int output_dim) {
  if (ld.dag.vertex_count() == 0) throw StructuralError("cannot build a network from an empty DAG");
  if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("input/output dims must be >= 1");

  MaskedNetwork net;
  net.input_dim = input_dim;
  net.output_dim = output_dim;
  net.vertex_count = ld.dag.vertex_count();
  net.layer_vertices = ld.layers;
  for (const auto& layer : ld.layers) net.layer_units.push_back(static_cast<int>(layer.size()));
  const int out = net.output_layer();

  std::vector<int> position(ld.dag.vertex_count());
  for (const auto& layer : ld.layers) {
    for (std::size_t i = 0; i < layer.size(); ++i) position[layer[i]] = static_cast<int>(i);
  }

  // Keyed by (target, source) so iteration yields the storage order.
  std::map<std::pair<int, int>, WeightGroup> by_key;
  auto group = [&](int source, int target) -> WeightGroup& {
    auto [it, inserted] = by_key.try_emplace({target, source});
    if (inserted) {
      WeightGroup& g = it->second;
      g.source = source;
      g.target = target;
      g.weights = Eigen::MatrixXd::Zero(net.units(target), net.units(source));
      g.mask = Eigen::MatrixXd::Zero(net.units(target), net.units(source));
    }
    return it->second;
  };

  group(kInputLayer, 0).mask.setOnes();
  for (const Edge& e : ld.dag.edges()) {
    const int s = ld.layer_index[e.u];
    const int t = ld.layer_index[e.v];
    group(s, t).mask(position[e.v], position[e.u]) = 1.0;
  }
  for (int v : ld.sinks) {
    group(ld.layer_index[v], out).mask.col(position[v]).setOnes();
  }

  for (auto& [key, g] : by_key) net.groups.push_back(std::move(g));
  for (int l = 0; l <= out; ++l) net.biases.push_back(Eigen::VectorXd::Zero(net.units(l)));
  net.reindex();
  return net;
}

void init_weights(MaskedNetwork& net, InitMethod method, std::uint64_t seed) {
  Rng rng(seed);
  const double gain = std::sqrt(2.0);
  for (WeightGroup& g : net.groups) {
    const double fan_in = static_cast<double>(g.weights.cols());
    const double fan_out = static_cast<double>(g.weights.rows());
    bool normal = false;
    double scale = 0.0;  // std for normal, bound for uniform
    switch (method) {
      case InitMethod::kGlorotNormal:
        normal = true;
        scale = gain * std::sqrt(2.0 / (fan_in + fan_out));
        break;
      case InitMethod::kGlorotUniform:
        scale = gain * std::sqrt(6.0 / (fan_in + fan_out));
        break;
      case InitMethod::kHeNormal:
        normal = true;
        scale = gain / std::sqrt(fan_in);
        break;
      case InitMethod::kHeUniform:
        scale = gain * std::sqrt(3.0 / fan_in);
        break;
      case InitMethod::kNormal:
        normal = true;
        scale = 0.1;
        break;
      case InitMethod::kUniform:
        scale = 0.1;
        break;
    }
    std::normal_distribution<double> nd(0.0, scale);
    std::uniform_real_distribution<double> ud(-scale, scale);
    for (Eigen::Index r = 0; r < g.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.weights.cols(); ++c) {
        g.weights(r, c) = normal ? nd(rng) : ud(rng);
      }
    }
  }
  for (Eigen::VectorXd& b : net.biases) b.setZero();
  net.enforce_masks();
}

std::size_t param_count(const MaskedNetwork& net) {
  std::size_t n = 0;
  for (const WeightGroup& g : net.groups) n += g.active();
  for (const Eigen::VectorXd& b : net.biases) n += static_cast<std::size_t>(b.size());
  return n;
}

std::size_t hidden_connection_count(const MaskedNetwork& net) {
  std::size_t n = 0;
  for (const WeightGroup& g : net.groups) {
    if (net.is_hidden_group(g)) n += g.active();
  }
  return n;
}

std::size_t prune_random(MaskedNetwork& net, double alpha, std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  struct Slot {
    int group;
    Eigen::Index row;
    Eigen::Index col;
  };
  std::vector<Slot> active;
  for (std::size_t gi = 0; gi < net.groups.size(); ++gi) {
    const WeightGroup& g = net.groups[gi];
    if (!net.is_hidden_group(g)) continue;
    for (Eigen::Index c = 0; c < g.mask.cols(); ++c) {
      for (Eigen::Index r = 0; r < g.mask.rows(); ++r) {
        if (g.mask(r, c) != 0.0) active.push_back({static_cast<int>(gi), r, c});
      }
    }
  }
  const auto count = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(active.size())));
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, active.size() - 1);
    std::swap(active[i], active[pick(rng)]);
    const Slot& s = active[i];
    net.groups[s.group].mask(s.row, s.col) = 0.0;
    net.groups[s.group].weights(s.row, s.col) = 0.0;
  }
  net.touch();
  return count;
}

Dag network_to_graph(const MaskedNetwork& net) {
  std::vector<Edge> edges;
  for (const WeightGroup& g : net.groups) {
    if (!net.is_hidden_group(g)) continue;
    for (Eigen::Index c = 0; c < g.mask.cols(); ++c) {
      for (Eigen::Index r = 0; r < g.mask.rows(); ++r) {
        if (g.mask(r, c) != 0.0) {
          edges.push_back({net.layer_vertices[g.source][c], net.layer_vertices[g.target][r]});
        }
      }
    }
  }
  return Dag(net.vertex_count, std::move(edges));
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

ForwardCache forward(const MaskedNetwork& net, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != net.input_dim) {
    throw std::invalid_argument("input has " + std::to_string(inputs.rows()) + " rows, expected " +
                                std::to_string(net.input_dim));
  }
  ForwardCache cache;
  cache.net = &net;
  cache.revision = net.revision();
  cache.input = inputs;
  const int layers = net.hidden_layers();
  const Eigen::Index batch = inputs.cols();
  cache.pre.resize(layers);
  cache.act.resize(layers);

  auto accumulate = [&](int target) {
    Eigen::MatrixXd z(net.units(target), batch);
    z.colwise() = net.biases[target];
    for (int gi : net.incoming(target)) {
      const WeightGroup& g = net.groups[gi];
      const Eigen::MatrixXd& src = g.source == kInputLayer ? cache.input : cache.act[g.source];
      z.noalias() += g.weights * src;
    }
    return z;
  };

  for (int l = 0; l < layers; ++l) {
    cache.pre[l] = accumulate(l);
    cache.act[l] = cache.pre[l].cwiseMax(0.0);
  }
  cache.logits = accumulate(net.output_layer());
  cache.probabilities.resize(net.output_dim, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    cache.probabilities.col(b) = softmax(cache.logits.col(b));
  }
  return cache;
}

ForwardResult forward(const MaskedNetwork& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_dim) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) + " entries, expected " +
                                std::to_string(net.input_dim));
  }
  Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), net.input_dim);
  ForwardResult r{{}, {}, forward(net, in)};
  r.logits = r.cache.logits.col(0);
  r.probabilities = r.cache.probabilities.col(0);
  return r;
}

namespace {

void check_cache(const MaskedNetwork& net, const ForwardCache& cache) {
  if (cache.net != &net || cache.revision != net.revision()) {
    throw std::logic_error("stale forward cache: network changed since forward()");
  }
}

void check_labels(const MaskedNetwork& net, const ForwardCache& cache, std::span<const int> labels) {
  if (static_cast<int>(labels.size()) != cache.batch()) {
    throw std::invalid_argument("label count does not match batch size");
  }
  for (int y : labels) {
    if (y < 0 || y >= net.output_dim) throw std::invalid_argument("label out of range");
  }
}

}  // namespace

Gradients backward(const MaskedNetwork& net, const ForwardCache& cache, std::span<const int> labels,
                   bool want_input_grad) {
  check_cache(net, cache);
  check_labels(net, cache, labels);
  const int layers = net.hidden_layers();
  const Eigen::Index batch = cache.batch();

  Gradients grads;
  grads.weights.resize(net.groups.size());
  grads.biases.resize(net.biases.size());
  if (want_input_grad) grads.input = Eigen::MatrixXd::Zero(net.input_dim, batch);

  std::vector<Eigen::MatrixXd> upstream(layers);
  for (int l = 0; l < layers; ++l) upstream[l] = Eigen::MatrixXd::Zero(net.layer_units[l], batch);

  Eigen::MatrixXd delta = cache.probabilities;
  for (Eigen::Index b = 0; b < batch; ++b) delta(labels[b], b) -= 1.0;
  delta /= static_cast<double>(batch);

  for (int t = layers; t >= 0; --t) {
    if (t < layers) {
      // Rectifier derivative taken as 0 at exactly 0.
      delta = upstream[t].cwiseProduct((cache.pre[t].array() > 0.0).cast<double>().matrix());
    }
    grads.biases[t] = delta.rowwise().sum();
    for (int gi : net.incoming(t)) {
      const WeightGroup& g = net.groups[gi];
      const Eigen::MatrixXd& src = g.source == kInputLayer ? cache.input : cache.act[g.source];
      grads.weights[gi] = (delta * src.transpose()).cwiseProduct(g.mask);
      if (g.source == kInputLayer) {
        if (want_input_grad) grads.input.noalias() += g.weights.transpose() * delta;
      } else {
        upstream[g.source].noalias() += g.weights.transpose() * delta;
      }
    }
  }
  return grads;
}

Gradients backward(const MaskedNetwork& net, const ForwardCache& cache, int label,
                   bool want_input_grad) {
  return backward(net, cache, std::span<const int>(&label, 1), want_input_grad);
}

double cross_entropy(const ForwardCache& cache, std::span<const int> labels) {
  if (static_cast<int>(labels.size()) != cache.batch()) {
    throw std::invalid_argument("label count does not match batch size");
  }
  double loss = 0.0;
  for (int b = 0; b < cache.batch(); ++b) {
    // log-softmax from logits for numerical stability
    const auto col = cache.logits.col(b);
    const double m = col.maxCoeff();
    const double lse = m + std::log((col.array() - m).exp().sum());
    loss += lse - col(labels[b]);
  }
  return loss / cache.batch();
}

}  // namespace snnlab
