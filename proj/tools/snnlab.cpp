#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "snnlab/checkpoint.hpp"
#include "snnlab/experiment.hpp"
#include "snnlab/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace snnlab;

namespace {

struct Common {
  std::string manifest;
  std::string data_dir = "data/mnist";
  std::string out_dir = "results";
  int workers = 1;
  int attack_workers = 1;
  std::optional<double> scale;
  bool resume = false;
};

void log_line(const std::string& s) { std::cerr << s << std::endl; }

ExperimentManifest manifest_from_flags(const Common& c) {
  ExperimentManifest m = c.manifest.empty() ? ExperimentManifest{} : load_manifest(c.manifest);
  if (c.scale) m.scale = ScaleFactors::uniform(*c.scale);
  m.validate();
  return m;
}

// The store's manifest is authoritative once written; explicit flags must agree with it.
ExperimentManifest store_manifest(const Common& c, const ResultsStore& store) {
  if (!store.has_manifest()) {
    throw std::runtime_error("no manifest in " + store.root().string() + " (run gen-graphs first)");
  }
  ExperimentManifest m = store.read_manifest();
  if (!c.manifest.empty() || c.scale) {
    const ExperimentManifest given = manifest_from_flags(c);
    if (manifest_hash(given) != manifest_hash(m)) {
      throw std::runtime_error("manifest " + manifest_hash(given) + " differs from the one stored in " +
                               store.root().string() + " (" + manifest_hash(m) + ")");
    }
  }
  return m;
}

int cmd_gen_graphs(const Common& c) {
  const ExperimentManifest m = manifest_from_flags(c);
  ResultsStore store(c.out_dir);
  if (store.has_manifest() && manifest_hash(store.read_manifest()) != manifest_hash(m)) {
    throw std::runtime_error(store.root().string() + " already holds a different manifest");
  }
  store.write_manifest(m);
  const GraphDatasetResult r = build_graph_dataset(m, log_line);
  const json summary = graph_dataset_summary(r, m);
  store.save_graphs(r.graphs, summary);
  std::cout << summary.dump(2) << std::endl;
  return r.graphs.empty() ? 1 : 0;
}

int cmd_sweep(const Common& c) {
  ResultsStore store(c.out_dir);
  const ExperimentManifest m = store_manifest(c, store);
  const MnistData data = load_data_for(m, c.data_dir);
  log_line("sweep " + m.mode_label() + ": " + std::to_string(data.train.size()) + " training and " +
           std::to_string(data.test.size()) + " test images");
  const SweepSummary s = run_sweep(m, store, data, {c.workers, c.attack_workers, c.resume, log_line});
  std::cout << json{{"scheduled", s.scheduled}, {"skipped", s.skipped}, {"completed", s.completed}, {"failed", s.failed}}
                   .dump(2)
            << std::endl;
  return s.failed == 0 ? 0 : 1;
}

int cmd_attack(const Common& c, const std::string& checkpoint) {
  const ExperimentManifest m = manifest_from_flags(c);
  const LoadedCheckpoint ck = load_checkpoint(checkpoint);
  MnistData data = load_data_for(m, c.data_dir);
  const std::string model_id = fs::path(checkpoint).parent_path().filename().string();
  const std::string init = ck.header.value("init_method", "");
  const std::uint64_t seed = derive_seed(m.master_seed, Stage::kOnePixel, {fnv1a64(model_id)});
  const AttackSuiteResult a = run_attack_suite(ck.net, data.test, m, seed, model_id, init, c.attack_workers);
  const fs::path out(c.out_dir);
  write_text(out / "fgsm.csv", outcomes_csv(a.fgsm));
  write_text(out / "fgsm_search.csv", outcomes_csv(a.fgsm_search));
  write_text(out / "one_pixel.csv", outcomes_csv(a.one_pixel));
  json records = json::array();
  for (const auto& r : a.records) records.push_back(to_json(r));
  const json doc{{"checkpoint", checkpoint},
                 {"manifest_hash", manifest_hash(m)},
                 {"mode", m.mode_label()},
                 {"one_pixel_seed", seed},
                 {"correct_in_test", a.correct_in_test},
                 {"test_images", a.test_images},
                 {"robustness", records}};
  write_text(out / "robustness.json", doc.dump(2) + "\n");
  std::cout << doc.dump(2) << std::endl;
  return 0;
}

int cmd_correlate(const Common& c) {
  ResultsStore store(c.out_dir);
  store_manifest(c, store);
  const CorrelationTable t = correlate(store);
  write_correlation(t, store.root());
  std::cout << table_csv(t);
  if (t.withheld) log_line("correlation withheld: " + t.diagnostic);
  return t.withheld ? 1 : 0;
}

int cmd_prune(const Common& c) {
  ResultsStore store(c.out_dir);
  ExperimentManifest m;
  if (store.has_manifest()) {
    m = store_manifest(c, store);
  } else {
    m = manifest_from_flags(c);
    store.write_manifest(m);
  }
  const MnistData data = load_data_for(m, c.data_dir);
  const PruningResult r = run_pruning_baseline(m, store, data, {c.attack_workers, log_line});
  std::cout << table_csv(r.table);
  return 0;
}

int cmd_report(const Common& c) {
  ResultsStore store(c.out_dir);
  store_manifest(c, store);
  const std::string text = render_report(store);
  write_text(store.root() / "report.txt", text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse network robustness lab: graph priors, training, adversarial attacks, correlation"};
  app.require_subcommand(1);
  Common c;
  std::string checkpoint;

  auto add_common = [&](CLI::App* sub, bool data, bool workers) {
    sub->add_option("--manifest", c.manifest, "experiment manifest (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out-dir", c.out_dir, "results directory")->capture_default_str();
    sub->add_option("--scale", c.scale, "uniform scale factor for epochs, subsets and DE budget")
        ->check(CLI::Range(1e-6, 1.0));
    if (data) sub->add_option("--data-dir", c.data_dir, "directory holding the MNIST IDX files")->capture_default_str();
    if (workers) {
      sub->add_option("--workers", c.workers, "concurrent tasks")->check(CLI::PositiveNumber)->capture_default_str();
      sub->add_option("--attack-workers", c.attack_workers, "threads per task for per-image attacks")
          ->check(CLI::PositiveNumber)
          ->capture_default_str();
    }
  };

  auto* gen = app.add_subcommand("gen-graphs", "generate the accepted Watts-Strogatz graph dataset");
  add_common(gen, false, false);
  auto* sweep = app.add_subcommand("sweep", "train and attack every (graph, init) pair");
  add_common(sweep, true, true);
  sweep->add_flag("--resume", c.resume, "skip pairs already completed under the same manifest");
  auto* attack = app.add_subcommand("attack", "run the attack suite against one checkpoint");
  add_common(attack, true, true);
  attack->add_option("--checkpoint", checkpoint, "model checkpoint")->required()->check(CLI::ExistingFile);
  auto* corr = app.add_subcommand("correlate", "correlate graph properties with robustness measures");
  add_common(corr, false, false);
  auto* prune = app.add_subcommand("prune-baseline", "random pruning of a dense 50/100/100/50 network");
  add_common(prune, true, true);
  auto* report = app.add_subcommand("report", "write the summary report");
  add_common(report, false, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_graphs(c);
    if (*sweep) return cmd_sweep(c);
    if (*attack) return cmd_attack(c, checkpoint);
    if (*corr) return cmd_correlate(c);
    if (*prune) return cmd_prune(c);
    if (*report) return cmd_report(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}
