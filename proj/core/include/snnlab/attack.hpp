#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "snnlab/data.hpp"
#include "snnlab/network.hpp"
#include "snnlab/seeding.hpp"

namespace snnlab {

// Single-pixel perturbation. px is the column, py the row, both 1-indexed;
// intensity is on the 0..255 byte scale.
struct PixelCandidate {
  double px = 1;
  double py = 1;
  double intensity = 0;
};

struct AdversarialExample {
  int original_index = -1;
  Eigen::VectorXd perturbed;
  int original_label = 0;
  int predicted_label = 0;  // after the attack
  bool success = false;     // predicted_label != original_label
  double confidence = 0.0;  // probability of predicted_label
  std::optional<double> epsilon_used;
  std::optional<PixelCandidate> candidate;
  std::optional<int> generations_used;
  std::optional<double> fitness;
};

// x~ = clip01(x + eps * sign(dC/dx)), sign(0) = 0.
AdversarialExample fgsm(const MaskedNetwork& net, const Eigen::VectorXd& x, int y, double eps);

// Batched FGSM over dataset images.
std::vector<AdversarialExample> fgsm_batch(const MaskedNetwork& net, const Dataset& ds,
                                           std::span<const int> indices, double eps, int batch_size = 256);

struct EpsSearchConfig {
  double start = 0.001;
  double step = 0.01;
  double cap = 1.0;
};

// Tries eps = start + k*step for k = 0, 1, ... while eps <= cap and returns
// the first eps that flips the prediction. Without a flip, success is false
// and epsilon_used is empty (censored). Requires x to be classified as y.
AdversarialExample fgsm_eps_search(const MaskedNetwork& net, const Eigen::VectorXd& x, int y,
                                   const EpsSearchConfig& cfg = {});

struct DEConfig {
  int pop_size = 500;
  int max_iter = 500;
  double F = 0.5;
  double CR = 0.9;
  std::uint64_t seed = 0;
  bool early_stop = true;
};

void validate(const DEConfig& cfg);

using Genome = std::vector<double>;

struct DEBounds {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integral;  // coordinate rounded to the nearest integer
};

// Score of one genome; `tag` is carried along for the caller (the one-pixel
// attack stores the predicted label there).
struct Evaluation {
  double fitness = 0.0;
  int tag = 0;
};

struct Population {
  std::vector<Genome> members;
  std::vector<Evaluation> scores;

  std::size_t best() const;
};

using BatchFitness = std::function<std::vector<Evaluation>(const std::vector<Genome>&)>;

// Clamps to the bounds and rounds integral coordinates.
void repair(Genome& g, const DEBounds& bounds);

// One generation of DE/rand/1/bin: for each parent i, mutant = a + F(b - c)
// over three distinct members other than i, binomial crossover with one
// forced coordinate, repair, and greedy replacement when the child's fitness
// is >= the parent's (fitness is maximised).
Population de_evolve(const Population& population, const BatchFitness& fitness, const DEBounds& bounds,
                     const DEConfig& cfg, Rng& rng);

// Copy of x with pixel (py, px) replaced by intensity/255.
Eigen::VectorXd apply_candidate(const Eigen::VectorXd& x, const PixelCandidate& c, int rows = 28,
                                int cols = 28);

// 1 - f_y(x(c)).
double one_pixel_fitness(const Eigen::VectorXd& probabilities, int y);

struct OnePixelTrace {
  std::vector<double> best_fitness;  // index 0 is the initial population
};

// Non-targeted one-pixel attack. Initial coordinates ~ round(U(1, 28)),
// intensities ~ N(128, 127) clamped to [0, 255]. Stops after max_iter
// generations, or as soon as some member is misclassified when early_stop is
// set (the best misclassified member is then returned).
AdversarialExample one_pixel(const MaskedNetwork& net, const Eigen::VectorXd& x, int y, const DEConfig& cfg,
                             OnePixelTrace* trace = nullptr, int rows = 28, int cols = 28);

// Indices of the first `count` images (dataset order) the network classifies correctly.
std::vector<int> first_correct(const MaskedNetwork& net, const Dataset& ds, std::size_t count);

int argmax(const Eigen::VectorXd& v);

}  // namespace snnlab
