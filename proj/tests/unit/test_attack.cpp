#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "snnlab/attack.hpp"
#include "snnlab/measure.hpp"
#include "snnlab/seeding.hpp"

using namespace snnlab;

namespace {

// One hidden unit h = relu(w.x + b); logits = (0, h + shift).
MaskedNetwork threshold_net(std::vector<double> w, double b, double shift) {
  const std::vector<int> units{1};
  auto net = build_network(dense_layered_dag(units), static_cast<int>(w.size()), 2);
  for (std::size_t i = 0; i < w.size(); ++i) net.groups[0].weights(0, static_cast<Eigen::Index>(i)) = w[i];
  net.groups[1].weights << 0.0, 1.0;
  net.biases[0](0) = b;
  net.biases[1] << 0.0, shift;
  net.touch();
  return net;
}

MaskedNetwork constant_net(int input_dim, int classes, int favoured) {
  const std::vector<int> units{1};
  auto net = build_network(dense_layered_dag(units), input_dim, classes);
  net.biases[1](favoured) = 2.0;
  net.touch();
  return net;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

}  // namespace

TEST(Fgsm, SignStep) {
  const auto net = threshold_net({1.0, -1.0}, 1.0, -5.0);
  const auto ex = fgsm(net, vec({0.5, 0.5}), 0, 0.1);
  EXPECT_NEAR(ex.perturbed(0), 0.6, 1e-15);
  EXPECT_NEAR(ex.perturbed(1), 0.4, 1e-15);
  EXPECT_FALSE(ex.success);
}

TEST(Fgsm, ZeroEpsAndClipping) {
  const auto net = threshold_net({1.0, -1.0}, 1.0, -5.0);
  const auto same = fgsm(net, vec({0.5, 0.5}), 0, 0.0);
  EXPECT_EQ(same.perturbed, vec({0.5, 0.5}));
  EXPECT_FALSE(same.success);
  EXPECT_TRUE(fgsm(net, vec({0.5, 0.5}), 1, 0.0).success);
  const auto clipped = fgsm(net, vec({0.95, 0.05}), 0, 0.1);
  EXPECT_DOUBLE_EQ(clipped.perturbed(0), 1.0);
  EXPECT_DOUBLE_EQ(clipped.perturbed(1), 0.0);
}

TEST(Fgsm, ZeroGradientLeavesPixel) {
  const auto net = constant_net(3, 2, 0);
  const auto ex = fgsm(net, vec({0.2, 0.4, 0.6}), 0, 0.3);
  EXPECT_EQ(ex.perturbed, vec({0.2, 0.4, 0.6}));
}

TEST(EpsSearch, Schedule) {
  const auto first = fgsm_eps_search(threshold_net({1.0}, 0.0, -0.3005), vec({0.3}), 0);
  ASSERT_TRUE(first.success);
  EXPECT_NEAR(*first.epsilon_used, 0.001, 1e-15);
  const auto third = fgsm_eps_search(threshold_net({1.0}, 0.0, -0.315), vec({0.3}), 0);
  ASSERT_TRUE(third.success);
  EXPECT_NEAR(*third.epsilon_used, 0.021, 1e-12);
}

TEST(EpsSearch, ConstantClassifierIsCensored) {
  const auto ex = fgsm_eps_search(constant_net(2, 2, 0), vec({0.5, 0.5}), 0);
  EXPECT_FALSE(ex.success);
  EXPECT_FALSE(ex.epsilon_used.has_value());
  const std::vector<AdversarialExample> v{ex};
  EXPECT_EQ(avg_epsilon(v).censored, 1u);
}

TEST(EpsSearch, RejectsMisclassifiedInput) {
  EXPECT_THROW(fgsm_eps_search(constant_net(2, 2, 1), vec({0.5, 0.5}), 0), std::invalid_argument);
}

TEST(OnePixel, CandidateEncoding) {
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(784);
  const auto y = apply_candidate(x, {5, 7, 200});
  EXPECT_DOUBLE_EQ(y(6 * 28 + 4), 200.0 / 255.0);
  EXPECT_DOUBLE_EQ(y.sum(), 200.0 / 255.0);
}

TEST(OnePixel, Fitness) {
  EXPECT_NEAR(one_pixel_fitness(vec({0.3, 0.7}), 0), 0.7, 1e-15);
}

TEST(OnePixel, EarlyStopInInitialPopulation) {
  const auto net = constant_net(784, 10, 3);
  const DEConfig cfg{20, 10, 0.5, 0.9, 1, true};
  const auto ex = one_pixel(net, Eigen::VectorXd::Zero(784), 0, cfg);
  EXPECT_TRUE(ex.success);
  EXPECT_EQ(ex.generations_used, 0);
}

TEST(OnePixel, SinglePixelAndMonotoneTrace) {
  std::mt19937_64 rng(3);
  const auto net = oracle::random_network(rng, 30, 784, 10);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(784, 0.2);
  const int y = argmax(forward(net, std::span<const double>(x.data(), 784)).probabilities);
  const DEConfig cfg{30, 20, 0.5, 0.9, 7, false};
  OnePixelTrace trace;
  const auto ex = one_pixel(net, x, y, cfg, &trace);
  ASSERT_EQ(trace.best_fitness.size(), 21u);
  for (std::size_t i = 1; i < trace.best_fitness.size(); ++i) EXPECT_GE(trace.best_fitness[i], trace.best_fitness[i - 1]);
  EXPECT_LE((ex.perturbed - x).cwiseAbs().cast<bool>().count(), 1);
  const auto c = *ex.candidate;
  EXPECT_EQ(c.px, std::round(c.px));
  EXPECT_GE(c.px, 1);
  EXPECT_LE(c.py, 28);
  EXPECT_GE(c.intensity, 0);
  EXPECT_LE(c.intensity, 255);
}

TEST(DeEvolve, IdenticalPopulationIsFixedPoint) {
  Population pop;
  pop.members.assign(8, Genome{3.0, 4.0, 100.0});
  const BatchFitness fitness = [](const std::vector<Genome>& gs) {
    return std::vector<Evaluation>(gs.size(), Evaluation{0.5, 0});
  };
  pop.scores = fitness(pop.members);
  const DEBounds bounds{{1, 1, 0}, {28, 28, 255}, {true, true, false}};
  Rng rng(1);
  const Population next = de_evolve(pop, fitness, bounds, DEConfig{8, 1, 0.5, 0.9, 1, false}, rng);
  for (const auto& m : next.members) EXPECT_EQ(m, (Genome{3.0, 4.0, 100.0}));
}

TEST(DeEvolve, RejectsTinyPopulation) {
  EXPECT_THROW(validate(DEConfig{3, 1, 0.5, 0.9, 1, true}), std::invalid_argument);
}
