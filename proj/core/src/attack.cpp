#include "snnlab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace snnlab {

namespace {

Eigen::VectorXd sign_of(const Eigen::VectorXd& g) {
  return g.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Eigen::VectorXd perturb(const Eigen::VectorXd& x, const Eigen::VectorXd& direction, double eps) {
  return (x + eps * direction).cwiseMax(0.0).cwiseMin(1.0);
}

void fill_outcome(AdversarialExample& ex, const Eigen::VectorXd& probabilities) {
  ex.predicted_label = argmax(probabilities);
  ex.success = ex.predicted_label != ex.original_label;
  ex.confidence = probabilities(ex.predicted_label);
}

}  // namespace

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

AdversarialExample fgsm(const MaskedNetwork& net, const Eigen::VectorXd& x, int y, double eps) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  const ForwardResult clean = forward(net, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  const Gradients grads = backward(net, clean.cache, y);
  AdversarialExample ex;
  ex.original_label = y;
  ex.perturbed = perturb(x, sign_of(grads.input.col(0)), eps);
  ex.epsilon_used = eps;
  const ForwardResult adv =
      forward(net, std::span<const double>(ex.perturbed.data(), static_cast<std::size_t>(ex.perturbed.size())));
  fill_outcome(ex, adv.probabilities);
  return ex;
}

std::vector<AdversarialExample> fgsm_batch(const MaskedNetwork& net, const Dataset& ds,
                                           std::span<const int> indices, double eps, int batch_size) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  std::vector<AdversarialExample> out;
  out.reserve(indices.size());
  for (std::size_t start = 0; start < indices.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(indices.size(), start + static_cast<std::size_t>(batch_size));
    const auto chunk = indices.subspan(start, end - start);
    std::vector<int> labels;
    for (int i : chunk) labels.push_back(ds.labels.at(static_cast<std::size_t>(i)));
    const Eigen::MatrixXd x = ds.gather(chunk);
    const ForwardCache cache = forward(net, x);
    const Gradients grads = backward(net, cache, labels);
    Eigen::MatrixXd adv(x.rows(), x.cols());
    for (Eigen::Index b = 0; b < x.cols(); ++b) adv.col(b) = perturb(x.col(b), sign_of(grads.input.col(b)), eps);
    const ForwardCache adv_cache = forward(net, adv);
    for (Eigen::Index b = 0; b < x.cols(); ++b) {
      AdversarialExample ex;
      ex.original_index = chunk[static_cast<std::size_t>(b)];
      ex.original_label = labels[static_cast<std::size_t>(b)];
      ex.perturbed = adv.col(b);
      ex.epsilon_used = eps;
      fill_outcome(ex, adv_cache.probabilities.col(b));
      out.push_back(std::move(ex));
    }
  }
  return out;
}

AdversarialExample fgsm_eps_search(const MaskedNetwork& net, const Eigen::VectorXd& x, int y,
                                   const EpsSearchConfig& cfg) {
  if (!(cfg.start >= 0.0) || !(cfg.step > 0.0)) throw std::invalid_argument("eps search needs start >= 0, step > 0");
  const ForwardResult clean = forward(net, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  if (argmax(clean.probabilities) != y) {
    throw std::invalid_argument("eps search requires a correctly classified input");
  }
  const Eigen::VectorXd direction = sign_of(backward(net, clean.cache, y).input.col(0));

  AdversarialExample ex;
  ex.original_label = y;
  ex.perturbed = x;
  fill_outcome(ex, clean.probabilities);
  if (cfg.cap < cfg.start) return ex;
  const long trials = static_cast<long>(std::floor((cfg.cap - cfg.start) / cfg.step + 1e-9)) + 1;
  constexpr long kChunk = 16;
  for (long k0 = 0; k0 < trials; k0 += kChunk) {
    const long k1 = std::min(trials, k0 + kChunk);
    Eigen::MatrixXd batch(x.size(), k1 - k0);
    for (long k = k0; k < k1; ++k) batch.col(k - k0) = perturb(x, direction, cfg.start + static_cast<double>(k) * cfg.step);
    const ForwardCache cache = forward(net, batch);
    for (long k = k0; k < k1; ++k) {
      const Eigen::VectorXd probs = cache.probabilities.col(k - k0);
      if (argmax(probs) != y) {
        ex.perturbed = batch.col(k - k0);
        ex.epsilon_used = cfg.start + static_cast<double>(k) * cfg.step;
        fill_outcome(ex, probs);
        return ex;
      }
    }
  }
  return ex;  // censored: no flip up to cap
}

void validate(const DEConfig& cfg) {
  if (cfg.pop_size < 4) throw std::invalid_argument("pop_size must be >= 4");
  if (cfg.max_iter < 0) throw std::invalid_argument("max_iter must be >= 0");
  if (!(cfg.F > 0.0)) throw std::invalid_argument("F must be > 0");
  if (!(cfg.CR >= 0.0 && cfg.CR <= 1.0)) throw std::invalid_argument("CR must lie in [0, 1]");
}

std::size_t Population::best() const {
  std::size_t b = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].fitness > scores[b].fitness) b = i;
  }
  return b;
}

void repair(Genome& g, const DEBounds& bounds) {
  for (std::size_t d = 0; d < g.size(); ++d) {
    if (bounds.integral[d]) g[d] = std::round(g[d]);
    g[d] = std::clamp(g[d], bounds.lower[d], bounds.upper[d]);
  }
}

Population de_evolve(const Population& population, const BatchFitness& fitness, const DEBounds& bounds,
                     const DEConfig& cfg, Rng& rng) {
  const std::size_t n = population.members.size();
  if (n < 4) throw std::invalid_argument("DE needs a population of at least 4");
  const std::size_t dims = population.members.front().size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<std::size_t> pick_dim(0, dims - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<Genome> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a, b, c;
    do a = pick(rng); while (a == i);
    do b = pick(rng); while (b == i || b == a);
    do c = pick(rng); while (c == i || c == a || c == b);
    const Genome& pa = population.members[a];
    const Genome& pb = population.members[b];
    const Genome& pc = population.members[c];
    Genome child = population.members[i];
    const std::size_t forced = pick_dim(rng);
    for (std::size_t d = 0; d < dims; ++d) {
      if (d == forced || coin(rng) < cfg.CR) child[d] = pa[d] + cfg.F * (pb[d] - pc[d]);
    }
    repair(child, bounds);
    children[i] = std::move(child);
  }

  const std::vector<Evaluation> child_scores = fitness(children);
  Population next = population;
  for (std::size_t i = 0; i < n; ++i) {
    if (child_scores[i].fitness >= population.scores[i].fitness) {
      next.members[i] = std::move(children[i]);
      next.scores[i] = child_scores[i];
    }
  }
  return next;
}

Eigen::VectorXd apply_candidate(const Eigen::VectorXd& x, const PixelCandidate& c, int rows, int cols) {
  const long col = std::lround(c.px);
  const long row = std::lround(c.py);
  if (col < 1 || col > cols || row < 1 || row > rows) throw std::out_of_range("pixel candidate outside the image");
  if (x.size() != static_cast<Eigen::Index>(rows) * cols) throw std::invalid_argument("image size mismatch");
  Eigen::VectorXd out = x;
  out((row - 1) * cols + (col - 1)) = std::clamp(c.intensity, 0.0, 255.0) / 255.0;
  return out;
}

double one_pixel_fitness(const Eigen::VectorXd& probabilities, int y) { return 1.0 - probabilities(y); }

AdversarialExample one_pixel(const MaskedNetwork& net, const Eigen::VectorXd& x, int y, const DEConfig& cfg,
                             OnePixelTrace* trace, int rows, int cols) {
  validate(cfg);
  const DEBounds bounds{{1.0, 1.0, 0.0},
                        {static_cast<double>(cols), static_cast<double>(rows), 255.0},
                        {true, true, false}};
  const BatchFitness fitness = [&](const std::vector<Genome>& genomes) {
    Eigen::MatrixXd batch(x.size(), static_cast<Eigen::Index>(genomes.size()));
    for (std::size_t k = 0; k < genomes.size(); ++k) {
      batch.col(static_cast<Eigen::Index>(k)) =
          apply_candidate(x, {genomes[k][0], genomes[k][1], genomes[k][2]}, rows, cols);
    }
    const ForwardCache cache = forward(net, batch);
    std::vector<Evaluation> out(genomes.size());
    for (std::size_t k = 0; k < genomes.size(); ++k) {
      const Eigen::VectorXd probs = cache.probabilities.col(static_cast<Eigen::Index>(k));
      out[k] = {one_pixel_fitness(probs, y), argmax(probs)};
    }
    return out;
  };

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> coord_x(1.0, static_cast<double>(cols));
  std::uniform_real_distribution<double> coord_y(1.0, static_cast<double>(rows));
  std::normal_distribution<double> intensity(128.0, 127.0);
  Population pop;
  pop.members.resize(static_cast<std::size_t>(cfg.pop_size));
  for (Genome& g : pop.members) {
    g = {coord_x(rng), coord_y(rng), intensity(rng)};
    repair(g, bounds);
  }
  pop.scores = fitness(pop.members);

  // Best misclassified member, if any.
  auto flipped = [&]() -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pop.scores.size(); ++i) {
      if (pop.scores[i].tag != y && (!best || pop.scores[i].fitness > pop.scores[*best].fitness)) best = i;
    }
    return best;
  };

  if (trace) trace->best_fitness.assign(1, pop.scores[pop.best()].fitness);
  int generation = 0;
  std::optional<std::size_t> winner = cfg.early_stop ? flipped() : std::nullopt;
  while (!winner && generation < cfg.max_iter) {
    pop = de_evolve(pop, fitness, bounds, cfg, rng);
    ++generation;
    if (trace) trace->best_fitness.push_back(pop.scores[pop.best()].fitness);
    if (cfg.early_stop) winner = flipped();
  }
  const std::size_t chosen = winner ? *winner : pop.best();
  const Genome& g = pop.members[chosen];

  AdversarialExample ex;
  ex.original_label = y;
  ex.candidate = PixelCandidate{g[0], g[1], g[2]};
  ex.generations_used = generation;
  ex.fitness = pop.scores[chosen].fitness;
  ex.perturbed = apply_candidate(x, *ex.candidate, rows, cols);
  const ForwardResult adv =
      forward(net, std::span<const double>(ex.perturbed.data(), static_cast<std::size_t>(ex.perturbed.size())));
  fill_outcome(ex, adv.probabilities);
  return ex;
}

std::vector<int> first_correct(const MaskedNetwork& net, const Dataset& ds, std::size_t count) {
  std::vector<int> out;
  constexpr std::size_t kChunk = 500;
  for (std::size_t start = 0; start < ds.size() && out.size() < count; start += kChunk) {
    std::vector<int> idx(std::min(kChunk, ds.size() - start));
    std::iota(idx.begin(), idx.end(), static_cast<int>(start));
    const ForwardCache cache = forward(net, ds.gather(idx));
    for (std::size_t k = 0; k < idx.size() && out.size() < count; ++k) {
      if (argmax(cache.logits.col(static_cast<Eigen::Index>(k))) == ds.labels[static_cast<std::size_t>(idx[k])]) {
        out.push_back(idx[k]);
      }
    }
  }
  return out;
}

}  // namespace snnlab
