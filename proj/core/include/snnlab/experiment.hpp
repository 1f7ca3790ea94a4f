#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snnlab/attack.hpp"
#include "snnlab/data.hpp"
#include "snnlab/graph_io.hpp"
#include "snnlab/manifest.hpp"
#include "snnlab/measure.hpp"
#include "snnlab/store.hpp"

namespace snnlab {

inline constexpr int kMnistInputDim = 784;
inline constexpr int kMnistClasses = 10;

using Logger = std::function<void(const std::string&)>;

// ---- graph dataset -------------------------------------------------------

struct GraphDatasetResult {
  std::vector<GraphDocument> graphs;
  long candidates = 0;
  long rejected_below = 0;
  long rejected_above = 0;
  bool exhausted = false;  // candidate budget ran out before the target count
};

// Network induced by an undirected prior: orient, layer, wire to 784 inputs
// and 10 outputs.
MaskedNetwork network_for_graph(const UndirectedGraph& g);

// Samples grid points uniformly with fresh per-candidate seeds and keeps a
// graph iff its induced network's parameter count lies in the manifest range.
GraphDatasetResult build_graph_dataset(const ExperimentManifest& m, const Logger& log = {});
nlohmann::json graph_dataset_summary(const GraphDatasetResult& r, const ExperimentManifest& m);

// ---- attacks and robustness ---------------------------------------------

struct RobustnessRecord {
  std::string model_id;
  std::string init_method;
  std::string attack;  // fgsm | fgsm_search | one_pixel
  double error_rate = 0.0;
  std::optional<double> avg_confidence;
  std::optional<double> avg_epsilon;  // fgsm_search only
  std::size_t n_attacked = 0;
  std::size_t n_successful = 0;
  std::size_t n_censored = 0;
};

nlohmann::json to_json(const RobustnessRecord& r);
RobustnessRecord robustness_from_json(const nlohmann::json& j);

struct AttackSuiteResult {
  std::vector<AdversarialExample> fgsm;
  std::vector<AdversarialExample> fgsm_search;
  std::vector<AdversarialExample> one_pixel;
  std::vector<RobustnessRecord> records;  // fgsm, fgsm_search, one_pixel
  std::size_t correct_in_test = 0;
  std::size_t test_images = 0;
};

// FGSM (fixed eps), eps-search FGSM and one-pixel DE on correctly classified
// test images in dataset order, with budgets from the manifest.
AttackSuiteResult run_attack_suite(const MaskedNetwork& net, const Dataset& test, const ExperimentManifest& m,
                                   std::uint64_t one_pixel_seed, const std::string& model_id,
                                   const std::string& init_method, int workers = 1);

// image_index,success,confidence,epsilon_used,p_x,p_y,I,generations_used
std::string outcomes_csv(const std::vector<AdversarialExample>& outcomes);

// ---- sweep ---------------------------------------------------------------

struct MnistData {
  Dataset train;
  Dataset test;
};

// Loads MNIST and trims it to the manifest's effective budget.
MnistData load_data_for(const ExperimentManifest& m, const std::string& data_dir);

struct SweepOptions {
  int workers = 1;
  int attack_workers = 1;
  bool resume = false;
  Logger log;
};

struct SweepSummary {
  std::size_t scheduled = 0;
  std::size_t skipped = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
};

std::string task_key(int graph_id, InitMethod method);

SweepSummary run_sweep(const ExperimentManifest& m, ResultsStore& store, const MnistData& data,
                       const SweepOptions& options = {});

// ---- correlation ---------------------------------------------------------

struct PropertySpec {
  std::string label;  // Table row label
  std::string key;
};

struct MeasureSpec {
  std::string attack_label;   // FGSM | One Pixel
  std::string measure_label;  // error rate | confidence | avg epsilon
  std::string attack;         // record attack kind
  std::string measure;        // error_rate | avg_confidence | avg_epsilon
};

const std::vector<PropertySpec>& table_properties();
const std::vector<MeasureSpec>& table_measures();

struct CorrelationCell {
  std::string property;
  std::string attack;
  std::string measure;
  Coefficient rho;
  Coefficient tau;
  std::size_t n = 0;
  std::string note;  // why a coefficient is undefined

  bool defined() const { return rho.defined && tau.defined; }
};

struct FilterAccounting {
  std::string attack;
  std::string measure;
  std::size_t total_runs = 0;
  std::size_t kept_runs = 0;
  std::size_t discarded_runs = 0;
  std::vector<int> dropped_models;
};

struct CorrelationTable {
  std::string title;
  std::vector<CorrelationCell> cells;  // property-major, measure order of table_measures()
  std::vector<FilterAccounting> filtering;
  std::size_t models = 0;
  bool withheld = false;
  std::string diagnostic;

  const CorrelationCell* find(const std::string& property, const std::string& attack,
                              const std::string& measure) const;
};

struct ModelObservation {
  int model = 0;
  std::map<std::string, double> properties;
};

struct RunObservation {
  int model = 0;
  std::map<std::string, std::optional<double>> measures;  // "attack/measure" -> value
};

// Per measure: outlier filtering (unless disabled) and per-model means, then
// Spearman and Kendall against every property.
CorrelationTable correlate_observations(const std::vector<ModelObservation>& models,
                                        const std::vector<RunObservation>& runs,
                                        std::optional<OutlierGranularity> filter);

// Sweep correlation from a store (graphs + completed task records).
CorrelationTable correlate(const ResultsStore& store);

// Wide layout: one row per property, one column per measure, cells "rho=..;tau=..".
std::string table_csv(const CorrelationTable& t);
std::string table_long_csv(const CorrelationTable& t);
void write_correlation(const CorrelationTable& t, const std::filesystem::path& dir);

// ---- pruning baseline ----------------------------------------------------

struct PruningStepRecord {
  int step = 0;
  std::size_t hidden_edges = 0;
  std::size_t pruned = 0;
  std::size_t param_count = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  GraphMetrics metrics;
  std::vector<RobustnessRecord> robustness;
};

struct PruningOptions {
  int attack_workers = 1;
  Logger log;
};

struct PruningResult {
  std::vector<PruningStepRecord> steps;
  CorrelationTable table;
};

PruningResult run_pruning_baseline(const ExperimentManifest& m, ResultsStore& store, const MnistData& data,
                                   const PruningOptions& options = {});

// ---- report --------------------------------------------------------------

// Two properties with the largest |rho| per measure column.
std::vector<std::pair<const MeasureSpec*, std::vector<const CorrelationCell*>>> strongest(const CorrelationTable& t,
                                                                                        std::size_t k = 2);

std::string render_report(const ResultsStore& store);

}  // namespace snnlab
