#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snnlab/attack.hpp"

namespace snnlab {

// Fraction of attacked (originally correct) samples whose prediction flipped.
// Throws std::domain_error on an empty set.
double error_rate(std::span<const AdversarialExample> outcomes);

// Mean predicted-class probability over successful examples; empty when
// nothing succeeded.
std::optional<double> avg_confidence(std::span<const AdversarialExample> outcomes);

struct EpsilonSummary {
  std::optional<double> mean;  // over successful, uncensored records
  std::size_t successes = 0;
  std::size_t censored = 0;
};
EpsilonSummary avg_epsilon(std::span<const AdversarialExample> outcomes);

// A coefficient that may be undefined (zero rank variance, too few points).
struct Coefficient {
  double value = 0.0;
  bool defined = false;
};

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

Coefficient spearman(std::span<const double> xs, std::span<const double> ys);
// Kendall tau-b.
Coefficient kendall(std::span<const double> xs, std::span<const double> ys);

enum class CohenLabel { kNegligible, kWeak, kModerate, kLarge };
CohenLabel cohen_label(double rho);
std::string_view to_string(CohenLabel label);

// Quantile with linear interpolation between order statistics at (n-1)q.
double quantile(std::span<const double> values, double q);

struct IqrSplit {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> outliers;
  double q1 = 0.0;
  double q3 = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
};

// Tukey fences Q1 - 1.5 IQR and Q3 + 1.5 IQR. Fewer than 4 values: nothing is discarded.
IqrSplit iqr_filter(std::span<const double> values);

enum class OutlierGranularity { kRun, kModel };

struct RunValue {
  int model = 0;
  double value = 0.0;
};

struct ModelMean {
  int model = 0;
  double mean = 0.0;
  std::size_t runs_kept = 0;
  std::size_t runs_total = 0;
};

struct AggregateResult {
  std::vector<ModelMean> models;  // ascending model id; models with no surviving run are absent
  std::vector<int> dropped_models;
  std::size_t kept_runs = 0;
  std::size_t discarded_runs = 0;
};

// Run granularity: IQR over the pooled per-run values, then per-model means
// of surviving runs. Model granularity: per-model means first, then IQR over
// the model means.
AggregateResult aggregate_runs(std::span<const RunValue> runs,
                               OutlierGranularity granularity = OutlierGranularity::kRun);

}  // namespace snnlab
