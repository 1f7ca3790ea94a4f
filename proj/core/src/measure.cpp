#include "snnlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace snnlab {

double error_rate(std::span<const AdversarialExample> outcomes) {
  if (outcomes.empty()) throw std::domain_error("error rate undefined without correctly classified samples");
  const auto flips = std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.success; });
  return static_cast<double>(flips) / static_cast<double>(outcomes.size());
}

std::optional<double> avg_confidence(std::span<const AdversarialExample> outcomes) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : outcomes) {
    if (!o.success) continue;
    sum += o.confidence;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

EpsilonSummary avg_epsilon(std::span<const AdversarialExample> outcomes) {
  EpsilonSummary s;
  double sum = 0.0;
  for (const auto& o : outcomes) {
    if (o.success && o.epsilon_used) {
      sum += *o.epsilon_used;
      ++s.successes;
    } else {
      ++s.censored;
    }
  }
  if (s.successes > 0) s.mean = sum / static_cast<double>(s.successes);
  return s;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

void check_pair(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("correlation inputs differ in length");
}

}  // namespace

Coefficient spearman(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  if (xs.size() < 2) return {};
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return {};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), true};
}

Coefficient kendall(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  if (xs.size() < 2) return {};
  long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      if (dx == 0.0 && dy == 0.0) continue;  // tied in both: counted in neither term
      if (dx == 0.0) {
        ++tied_x;
      } else if (dy == 0.0) {
        ++tied_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n1 = static_cast<double>(concordant + discordant + tied_x);
  const double n2 = static_cast<double>(concordant + discordant + tied_y);
  if (n1 == 0.0 || n2 == 0.0) return {};
  return {std::clamp(static_cast<double>(concordant - discordant) / std::sqrt(n1 * n2), -1.0, 1.0), true};
}

CohenLabel cohen_label(double rho) {
  const double a = std::abs(rho);
  if (a < 0.10) return CohenLabel::kNegligible;
  if (a < 0.30) return CohenLabel::kWeak;
  if (a < 0.50) return CohenLabel::kModerate;
  return CohenLabel::kLarge;
}

std::string_view to_string(CohenLabel label) {
  switch (label) {
    case CohenLabel::kNegligible: return "negligible";
    case CohenLabel::kWeak: return "weak";
    case CohenLabel::kModerate: return "moderate";
    case CohenLabel::kLarge: return "large";
  }
  return "?";
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty data");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

IqrSplit iqr_filter(std::span<const double> values) {
  IqrSplit s;
  if (values.size() < 4) {
    s.kept.resize(values.size());
    std::iota(s.kept.begin(), s.kept.end(), 0);
    return s;
  }
  s.q1 = quantile(values, 0.25);
  s.q3 = quantile(values, 0.75);
  const double iqr = s.q3 - s.q1;
  s.lower_fence = s.q1 - 1.5 * iqr;
  s.upper_fence = s.q3 + 1.5 * iqr;
  for (std::size_t i = 0; i < values.size(); ++i) {
    (values[i] < s.lower_fence || values[i] > s.upper_fence ? s.outliers : s.kept).push_back(i);
  }
  return s;
}

AggregateResult aggregate_runs(std::span<const RunValue> runs, OutlierGranularity granularity) {
  AggregateResult out;
  std::map<int, std::pair<double, std::size_t>> sums;  // model -> (sum, kept)
  std::map<int, std::size_t> totals;
  for (const RunValue& r : runs) ++totals[r.model];

  if (granularity == OutlierGranularity::kRun) {
    std::vector<double> pooled;
    for (const RunValue& r : runs) pooled.push_back(r.value);
    const IqrSplit split = iqr_filter(pooled);
    for (std::size_t i : split.kept) {
      auto& [sum, kept] = sums[runs[i].model];
      sum += runs[i].value;
      ++kept;
    }
    out.kept_runs = split.kept.size();
    out.discarded_runs = split.outliers.size();
  } else {
    for (const RunValue& r : runs) {
      auto& [sum, kept] = sums[r.model];
      sum += r.value;
      ++kept;
    }
    std::vector<int> ids;
    std::vector<double> means;
    for (auto& [m, acc] : sums) {
      ids.push_back(m);
      means.push_back(acc.first / static_cast<double>(acc.second));
    }
    const IqrSplit split = iqr_filter(means);
    for (std::size_t i : split.outliers) {
      out.discarded_runs += sums[ids[i]].second;
      sums.erase(ids[i]);
    }
    out.kept_runs = runs.size() - out.discarded_runs;
  }

  for (auto [model, total] : totals) {
    auto it = sums.find(model);
    if (it == sums.end() || it->second.second == 0) {
      out.dropped_models.push_back(model);
      continue;
    }
    out.models.push_back({model, it->second.first / static_cast<double>(it->second.second), it->second.second, total});
  }
  return out;
}

}  // namespace snnlab
