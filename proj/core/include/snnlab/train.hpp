#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "snnlab/data.hpp"
#include "snnlab/network.hpp"

namespace snnlab {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 30;
  int batch_size = 128;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

struct AdamState {
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
  long step = 0;

  static AdamState zeros_like(const MaskedNetwork& net);
};

// One bias-corrected Adam update of every weight group and bias; masked
// weight positions are forced back to zero afterwards.
void adam_step(MaskedNetwork& net, const Gradients& grads, AdamState& state, const TrainConfig& cfg);

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;      // mean cross-entropy over the epoch
  double accuracy = 0.0;  // running training accuracy
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mini-batch Adam on cross-entropy for cfg.epochs passes. Batch order for
// epoch e is derived from (cfg.seed, e).
std::vector<EpochStats> train(MaskedNetwork& net, const Dataset& train_set, const TrainConfig& cfg,
                              const std::function<void(const EpochStats&)>& on_epoch = {});

std::vector<int> predict(const MaskedNetwork& net, const Dataset& ds, int batch_size = 1000);

struct EvalReport {
  int classes = 10;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> precision, recall, f1;
  std::vector<std::vector<long>> confusion;  // [truth][predicted]
  // Classes that appear in neither truth nor predictions: F1 reported as 0
  // and left out of the macro mean.
  std::vector<int> absent_classes;
};

EvalReport evaluate_predictions(std::span<const int> truth, std::span<const int> predicted, int classes = 10);
EvalReport evaluate_f1(const MaskedNetwork& net, const Dataset& test_set);

}  // namespace snnlab
