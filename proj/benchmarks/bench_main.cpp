#include <benchmark/benchmark.h>

#include <random>

#include "snnlab/attack.hpp"
#include "snnlab/experiment.hpp"
#include "snnlab/seeding.hpp"

using namespace snnlab;

namespace {

MaskedNetwork ws_network(int n, int nei, double p) {
  auto net = network_for_graph(generate_ws({n, nei, p}, 7));
  init_weights(net, InitMethod::kHeUniform, 11);
  return net;
}

Eigen::MatrixXd random_inputs(int dim, int count) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(dim, count);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  return x;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  const auto net = ws_network(static_cast<int>(state.range(0)), 2, 0.6);
  const Eigen::MatrixXd x = random_inputs(784, 128);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, x).probabilities.data());
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_Forward)->Arg(100)->Arg(300)->Unit(benchmark::kMicrosecond);

static void BM_ForwardBackward(benchmark::State& state) {
  const auto net = ws_network(static_cast<int>(state.range(0)), 2, 0.6);
  const Eigen::MatrixXd x = random_inputs(784, 128);
  std::vector<int> y(128);
  for (int i = 0; i < 128; ++i) y[i] = i % 10;
  for (auto _ : state) {
    const auto cache = forward(net, x);
    benchmark::DoNotOptimize(backward(net, cache, y).input.data());
  }
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_ForwardBackward)->Arg(100)->Arg(300)->Unit(benchmark::kMicrosecond);

static void BM_ComputeMetrics(benchmark::State& state) {
  const auto g = generate_ws({static_cast<int>(state.range(0)), 2, 0.6}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(compute_metrics(g).avg_betweenness);
}
BENCHMARK(BM_ComputeMetrics)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_LayerDag(benchmark::State& state) {
  const auto g = generate_ws({static_cast<int>(state.range(0)), 2, 0.6}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(layer_dag(to_dag(g)).layers.size());
}
BENCHMARK(BM_LayerDag)->Arg(300)->Unit(benchmark::kMicrosecond);

static void BM_OnePixel(benchmark::State& state) {
  const auto net = ws_network(100, 2, 0.6);
  const Eigen::VectorXd x = random_inputs(784, 1).col(0);
  const int y = argmax(forward(net, std::span<const double>(x.data(), 784)).probabilities);
  DEConfig cfg;
  cfg.pop_size = static_cast<int>(state.range(0));
  cfg.max_iter = 10;
  cfg.early_stop = false;
  for (auto _ : state) {
    cfg.seed += 1;
    benchmark::DoNotOptimize(one_pixel(net, x, y, cfg).confidence);
  }
}
BENCHMARK(BM_OnePixel)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Fgsm(benchmark::State& state) {
  const auto net = ws_network(300, 2, 0.6);
  const Eigen::VectorXd x = random_inputs(784, 1).col(0);
  const int y = argmax(forward(net, std::span<const double>(x.data(), 784)).probabilities);
  for (auto _ : state) benchmark::DoNotOptimize(fgsm(net, x, y, 0.1).confidence);
}
BENCHMARK(BM_Fgsm)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
