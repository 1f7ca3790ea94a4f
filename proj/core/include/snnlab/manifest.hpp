#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "snnlab/attack.hpp"
#include "snnlab/graph.hpp"
#include "snnlab/measure.hpp"
#include "snnlab/network.hpp"
#include "snnlab/train.hpp"

namespace snnlab {

inline constexpr int kManifestSchemaVersion = 1;

struct GridSpec {
  std::vector<int> size{250, 300, 350, 400, 500};
  std::vector<int> nei{2, 4, 6, 8, 10, 20};
  std::vector<double> p{0.5, 0.6, 0.7, 0.8, 0.9};
};

// Multipliers applied to the paper-scale budgets; all 1.0 is paper scale.
struct ScaleFactors {
  double epochs = 1.0;
  double train_subset = 1.0;
  double test_subset = 1.0;
  double attack_subset = 1.0;
  double de_budget = 1.0;

  bool paper_scale() const;
  static ScaleFactors uniform(double f);
};

struct FgsmSettings {
  double eps = 0.1;
  bool clip = true;
  int limit = 10000;  // correctly classified test images attacked
};

struct EpsSearchSettings {
  EpsSearchConfig search;
  int limit = 10000;
};

struct OnePixelSettings {
  int pop_size = 500;
  int max_iter = 500;
  double F = 0.5;
  double CR = 0.9;
  bool early_stop = true;
  int subset_size = 100;
  std::string subset_rule = "first_correct";
};

struct PruningSettings {
  std::vector<int> hidden_units{50, 100, 100, 50};
  double alpha = 0.1;
  int steps = 20;
  int retrain_epochs = 5;
  std::string init_method = "He_U";
};

struct ExperimentManifest {
  GridSpec grid;
  int target_graph_count = 100;
  int max_candidates = 5000;
  std::size_t param_low = 50'000;
  std::size_t param_high = 91'000;
  std::vector<InitMethod> init_methods{std::begin(kAllInitMethods), std::end(kAllInitMethods)};
  TrainConfig train;
  int train_limit = 60000;
  int test_limit = 10000;
  FgsmSettings fgsm;
  EpsSearchSettings fgsm_search;
  OnePixelSettings one_pixel;
  PruningSettings pruning;
  OutlierGranularity outlier_granularity = OutlierGranularity::kRun;
  ScaleFactors scale;
  std::uint64_t master_seed = 20200101;

  std::string mode_label() const;
  void validate() const;
};

nlohmann::json to_json(const ExperimentManifest& m);
ExperimentManifest manifest_from_json(const nlohmann::json& j);
ExperimentManifest load_manifest(const std::string& path);

// FNV-1a of the canonical (key-sorted, compact) JSON, as 16 hex digits.
std::string manifest_hash(const ExperimentManifest& m);

// Budgets after applying scale factors (each rounded up, at least 1).
struct EffectiveBudget {
  int epochs = 0;
  int retrain_epochs = 0;
  int train_images = 0;
  int test_images = 0;
  int fgsm_images = 0;
  int eps_search_images = 0;
  int one_pixel_images = 0;
  int de_pop_size = 0;
  int de_max_iter = 0;
};
EffectiveBudget effective_budget(const ExperimentManifest& m);

}  // namespace snnlab
