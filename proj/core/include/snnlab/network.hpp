#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "snnlab/graph.hpp"

namespace snnlab {

inline constexpr int kInputLayer = -1;

// Weights from layer `source` into layer `target`. Layer -1 is the network
// input; layer `MaskedNetwork::output_layer()` is the output. Entries are
// zero wherever the mask is zero.
struct WeightGroup {
  int source = kInputLayer;
  int target = 0;
  Eigen::MatrixXd weights;  // target_units x source_units
  Eigen::MatrixXd mask;     // 0/1, same shape

  std::size_t active() const { return static_cast<std::size_t>(mask.sum()); }
};

enum class InitMethod { kGlorotNormal, kGlorotUniform, kHeNormal, kHeUniform, kNormal, kUniform };

inline constexpr InitMethod kAllInitMethods[] = {
    InitMethod::kGlorotNormal, InitMethod::kGlorotUniform, InitMethod::kHeNormal,
    InitMethod::kHeUniform,    InitMethod::kNormal,        InitMethod::kUniform};

// Short names: G_N, G_U, He_N, He_U, N, U.
std::string_view to_string(InitMethod m);
InitMethod parse_init_method(std::string_view name);

class MaskedNetwork {
 public:
  int input_dim = 0;
  int output_dim = 0;
  std::vector<int> layer_units;                 // hidden units per layer
  std::vector<std::vector<int>> layer_vertices;  // graph vertex id of each unit
  int vertex_count = 0;                          // hidden vertices in the source graph
  std::vector<WeightGroup> groups;               // sorted by (target, source)
  std::vector<Eigen::VectorXd> biases;           // hidden layers, then output

  int hidden_layers() const { return static_cast<int>(layer_units.size()); }
  int output_layer() const { return hidden_layers(); }
  int units(int layer) const;
  bool is_hidden_group(const WeightGroup& g) const {
    return g.source != kInputLayer && g.target != output_layer();
  }
  // Indices into `groups` with the given target layer.
  const std::vector<int>& incoming(int target) const { return incoming_[target]; }

  // Bumped by every mutation that invalidates forward caches.
  std::uint64_t revision() const { return revision_; }
  void touch() { ++revision_; }
  void enforce_masks();
  // Rebuilds the incoming-group index after `groups` is edited externally.
  void reindex();

 private:
  std::vector<std::vector<int>> incoming_;
  std::uint64_t revision_ = 0;
};

// Builds a masked feed-forward network from a layered DAG: the input feeds
// every layer-0 unit densely, each DAG edge becomes one mask entry of the
// group joining its endpoints' layers, and sinks of any layer feed the output
// densely. Weights and biases start at zero.
MaskedNetwork build_network(const LayeredDag& ld, int input_dim, int output_dim);

void init_weights(MaskedNetwork& net, InitMethod method, std::uint64_t seed);

// Ones over all masks plus every bias entry.
std::size_t param_count(const MaskedNetwork& net);

// Ones over hidden-to-hidden masks.
std::size_t hidden_connection_count(const MaskedNetwork& net);

// Zeroes floor(alpha * hidden_connection_count) hidden mask entries chosen
// uniformly without replacement. Returns the number pruned.
std::size_t prune_random(MaskedNetwork& net, double alpha, std::uint64_t seed);

// One vertex per hidden unit (original vertex ids), one edge per active
// hidden mask entry.
Dag network_to_graph(const MaskedNetwork& net);

// Activations of a batch, one column per sample.
struct ForwardCache {
  std::uint64_t revision = 0;
  const MaskedNetwork* net = nullptr;
  Eigen::MatrixXd input;                   // input_dim x batch
  std::vector<Eigen::MatrixXd> pre;        // hidden pre-activations
  std::vector<Eigen::MatrixXd> act;        // hidden rectified activations
  Eigen::MatrixXd logits;                  // output_dim x batch
  Eigen::MatrixXd probabilities;           // softmax of logits

  int batch() const { return static_cast<int>(input.cols()); }
};

ForwardCache forward(const MaskedNetwork& net, const Eigen::MatrixXd& inputs);

struct ForwardResult {
  Eigen::VectorXd logits;
  Eigen::VectorXd probabilities;
  ForwardCache cache;
};
ForwardResult forward(const MaskedNetwork& net, std::span<const double> x);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;  // parallel to net.groups, masked
  std::vector<Eigen::VectorXd> biases;   // parallel to net.biases
  Eigen::MatrixXd input;                 // input_dim x batch; empty unless requested
};

// Gradient of the batch-mean categorical cross-entropy. Throws if the cache
// was produced by a different network revision.
Gradients backward(const MaskedNetwork& net, const ForwardCache& cache, std::span<const int> labels,
                   bool want_input_grad = true);
Gradients backward(const MaskedNetwork& net, const ForwardCache& cache, int label,
                   bool want_input_grad = true);

// Mean cross-entropy of a cached batch.
double cross_entropy(const ForwardCache& cache, std::span<const int> labels);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

}  // namespace snnlab
