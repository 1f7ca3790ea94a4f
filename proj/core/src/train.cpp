#include "snnlab/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "snnlab/seeding.hpp"

namespace snnlab {

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !(cfg.adam_eps > 0.0)) throw std::invalid_argument("rates must be positive");
  if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 > 0.0 && cfg.beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in (0, 1)");
  }
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
}

AdamState AdamState::zeros_like(const MaskedNetwork& net) {
  AdamState s;
  for (const WeightGroup& g : net.groups) {
    s.m_weights.push_back(Eigen::MatrixXd::Zero(g.weights.rows(), g.weights.cols()));
    s.v_weights.push_back(Eigen::MatrixXd::Zero(g.weights.rows(), g.weights.cols()));
  }
  for (const Eigen::VectorXd& b : net.biases) {
    s.m_biases.push_back(Eigen::VectorXd::Zero(b.size()));
    s.v_biases.push_back(Eigen::VectorXd::Zero(b.size()));
  }
  return s;
}

namespace {

template <typename Param, typename Grad, typename Moment>
void adam_update(Param& theta, const Grad& g, Moment& m, Moment& v, const TrainConfig& cfg, double c1, double c2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  theta.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_eps);
}

}  // namespace

void adam_step(MaskedNetwork& net, const Gradients& grads, AdamState& state, const TrainConfig& cfg) {
  if (grads.weights.size() != net.groups.size() || grads.biases.size() != net.biases.size() ||
      state.m_weights.size() != net.groups.size()) {
    throw std::invalid_argument("gradient/state shapes do not match the network");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < net.groups.size(); ++i) {
    WeightGroup& g = net.groups[i];
    adam_update(g.weights, grads.weights[i], state.m_weights[i], state.v_weights[i], cfg, c1, c2);
    g.weights = g.weights.cwiseProduct(g.mask);
  }
  for (std::size_t i = 0; i < net.biases.size(); ++i) {
    adam_update(net.biases[i], grads.biases[i], state.m_biases[i], state.v_biases[i], cfg, c1, c2);
  }
  net.touch();
}

std::vector<EpochStats> train(MaskedNetwork& net, const Dataset& train_set, const TrainConfig& cfg,
                              const std::function<void(const EpochStats&)>& on_epoch) {
  validate(cfg);
  std::vector<EpochStats> history;
  if (cfg.epochs == 0 || train_set.size() == 0) return history;
  AdamState state = AdamState::zeros_like(net);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    long correct = 0;
    const auto order = batches(train_set.size(), cfg.batch_size,
                               derive_seed(cfg.seed, Stage::kShuffle, {static_cast<std::uint64_t>(epoch)}));
    for (const auto& idx : order) {
      std::vector<int> labels(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) labels[k] = train_set.labels[static_cast<std::size_t>(idx[k])];
      const ForwardCache cache = forward(net, train_set.gather(idx));
      const double loss = cross_entropy(cache, labels);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                               std::to_string(state.step));
      }
      loss_sum += loss * static_cast<double>(idx.size());
      for (int b = 0; b < cache.batch(); ++b) {
        Eigen::Index arg = 0;
        cache.probabilities.col(b).maxCoeff(&arg);
        if (arg == labels[static_cast<std::size_t>(b)]) ++correct;
      }
      const Gradients grads = backward(net, cache, labels, /*want_input_grad=*/false);
      adam_step(net, grads, state, cfg);
    }
    EpochStats stats{epoch + 1, loss_sum / static_cast<double>(train_set.size()),
                     static_cast<double>(correct) / static_cast<double>(train_set.size())};
    history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return history;
}

std::vector<int> predict(const MaskedNetwork& net, const Dataset& ds, int batch_size) {
  std::vector<int> out(ds.size());
  std::vector<int> idx;
  for (std::size_t start = 0; start < ds.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(ds.size(), start + static_cast<std::size_t>(batch_size));
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), static_cast<int>(start));
    const ForwardCache cache = forward(net, ds.gather(idx));
    for (int b = 0; b < cache.batch(); ++b) {
      Eigen::Index arg = 0;
      cache.logits.col(b).maxCoeff(&arg);
      out[start + static_cast<std::size_t>(b)] = static_cast<int>(arg);
    }
  }
  return out;
}

EvalReport evaluate_predictions(std::span<const int> truth, std::span<const int> predicted, int classes) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("truth/prediction length mismatch");
  EvalReport r;
  r.classes = classes;
  r.confusion.assign(classes, std::vector<long>(classes, 0));
  long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= classes || predicted[i] < 0 || predicted[i] >= classes) {
      throw std::invalid_argument("class index out of range");
    }
    ++r.confusion[truth[i]][predicted[i]];
    if (truth[i] == predicted[i]) ++correct;
  }
  r.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
  r.precision.assign(classes, 0.0);
  r.recall.assign(classes, 0.0);
  r.f1.assign(classes, 0.0);
  double f1_sum = 0.0;
  int counted = 0;
  for (int c = 0; c < classes; ++c) {
    long support = 0;
    long predicted_c = 0;
    for (int k = 0; k < classes; ++k) {
      support += r.confusion[c][k];
      predicted_c += r.confusion[k][c];
    }
    if (support == 0 && predicted_c == 0) {
      r.absent_classes.push_back(c);
      continue;
    }
    const double tp = static_cast<double>(r.confusion[c][c]);
    r.precision[c] = predicted_c > 0 ? tp / static_cast<double>(predicted_c) : 0.0;
    r.recall[c] = support > 0 ? tp / static_cast<double>(support) : 0.0;
    const double denom = r.precision[c] + r.recall[c];
    r.f1[c] = denom > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / denom : 0.0;
    f1_sum += r.f1[c];
    ++counted;
  }
  r.macro_f1 = counted > 0 ? f1_sum / counted : 0.0;
  return r;
}

EvalReport evaluate_f1(const MaskedNetwork& net, const Dataset& test_set) {
  const auto pred = predict(net, test_set);
  return evaluate_predictions(test_set.labels, pred, net.output_dim);
}

}  // namespace snnlab
