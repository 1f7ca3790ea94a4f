#include "snnlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "snnlab/checkpoint.hpp"
#include "snnlab/parallel.hpp"
#include "snnlab/seeding.hpp"
#include "snnlab/train.hpp"

namespace snnlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t init_index(InitMethod m) {
  for (std::size_t i = 0; i < std::size(kAllInitMethods); ++i) {
    if (kAllInitMethods[i] == m) return i;
  }
  return 0;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json eval_json(const EvalReport& r) {
  return json{{"accuracy", r.accuracy},
              {"macro_f1", r.macro_f1},
              {"f1", r.f1},
              {"precision", r.precision},
              {"recall", r.recall},
              {"confusion", r.confusion},
              {"absent_classes", r.absent_classes}};
}

std::string history_csv(const std::vector<EpochStats>& history) {
  std::ostringstream os;
  os << "epoch,loss,accuracy\n" << std::setprecision(10);
  for (const EpochStats& e : history) os << e.epoch << ',' << e.loss << ',' << e.accuracy << '\n';
  return os.str();
}

RobustnessRecord summarize(const std::vector<AdversarialExample>& outcomes, const std::string& attack,
                           const std::string& model_id, const std::string& init_method) {
  RobustnessRecord r;
  r.model_id = model_id;
  r.init_method = init_method;
  r.attack = attack;
  r.n_attacked = outcomes.size();
  for (const auto& o : outcomes) r.n_successful += o.success ? 1 : 0;
  if (!outcomes.empty()) r.error_rate = error_rate(outcomes);
  r.avg_confidence = avg_confidence(outcomes);
  if (attack == "fgsm_search") {
    const EpsilonSummary eps = avg_epsilon(outcomes);
    r.avg_epsilon = eps.mean;
    r.n_censored = eps.censored;
  }
  return r;
}

void save_attack_outputs(const fs::path& dir, const AttackSuiteResult& a) {
  write_text(dir / "fgsm.csv", outcomes_csv(a.fgsm));
  write_text(dir / "fgsm_search.csv", outcomes_csv(a.fgsm_search));
  write_text(dir / "one_pixel.csv", outcomes_csv(a.one_pixel));
}

}  // namespace

// ---- graph dataset -------------------------------------------------------

MaskedNetwork network_for_graph(const UndirectedGraph& g) {
  return build_network(layer_dag(to_dag(g)), kMnistInputDim, kMnistClasses);
}

GraphDatasetResult build_graph_dataset(const ExperimentManifest& m, const Logger& log) {
  m.validate();
  struct Point {
    int size;
    int nei;
    double p;
  };
  std::vector<Point> grid;
  for (int s : m.grid.size) {
    for (int k : m.grid.nei) {
      for (double p : m.grid.p) {
        if (s >= 2 * k + 1) grid.push_back({s, k, p});
      }
    }
  }
  if (grid.empty()) throw std::invalid_argument("manifest grid has no admissible (size, nei) combination");

  GraphDatasetResult out;
  Rng picker(derive_seed(m.master_seed, Stage::kGraph, {~0ULL}));
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  while (static_cast<int>(out.graphs.size()) < m.target_graph_count) {
    if (out.candidates >= m.max_candidates) {
      out.exhausted = true;
      if (log) {
        log("warning: candidate budget exhausted with " + std::to_string(out.graphs.size()) + " of " +
            std::to_string(m.target_graph_count) + " graphs accepted");
      }
      break;
    }
    const Point pt = grid[pick(picker)];
    const std::uint64_t seed = derive_seed(m.master_seed, Stage::kGraph, {static_cast<std::uint64_t>(out.candidates)});
    ++out.candidates;
    UndirectedGraph g = generate_ws({pt.size, pt.nei, pt.p}, seed);
    const std::size_t params = param_count(network_for_graph(g));
    if (params < m.param_low) {
      ++out.rejected_below;
      continue;
    }
    if (params > m.param_high) {
      ++out.rejected_above;
      continue;
    }
    GraphDocument doc;
    doc.graph_id = static_cast<int>(out.graphs.size());
    doc.generator = {pt.size, pt.nei, pt.p};
    doc.seed = seed;
    doc.metrics = compute_metrics(g);
    doc.param_count = params;
    doc.graph = std::move(g);
    if (log) {
      log("accepted graph " + std::to_string(doc.graph_id) + ": WS(" + std::to_string(pt.size) + ", " +
          std::to_string(pt.nei) + ", " + fmt(pt.p, 2) + ") params=" + std::to_string(params));
    }
    out.graphs.push_back(std::move(doc));
  }
  return out;
}

json graph_dataset_summary(const GraphDatasetResult& r, const ExperimentManifest& m) {
  std::size_t disconnected = 0;
  for (const auto& g : r.graphs) disconnected += g.metrics.disconnected ? 1 : 0;
  return json{{"manifest_hash", manifest_hash(m)},
              {"master_seed", m.master_seed},
              {"accepted", r.graphs.size()},
              {"target", m.target_graph_count},
              {"candidates", r.candidates},
              {"rejected_below_range", r.rejected_below},
              {"rejected_above_range", r.rejected_above},
              {"exhausted", r.exhausted},
              {"disconnected", disconnected},
              {"param_range", {m.param_low, m.param_high}}};
}

// ---- attacks -------------------------------------------------------------

json to_json(const RobustnessRecord& r) {
  return json{{"model_id", r.model_id},
              {"init_method", r.init_method},
              {"attack", r.attack},
              {"error_rate", r.error_rate},
              {"avg_confidence", optional_json(r.avg_confidence)},
              {"avg_epsilon", optional_json(r.avg_epsilon)},
              {"n_attacked", r.n_attacked},
              {"n_successful", r.n_successful},
              {"n_censored", r.n_censored}};
}

RobustnessRecord robustness_from_json(const json& j) {
  RobustnessRecord r;
  r.model_id = j.at("model_id").get<std::string>();
  r.init_method = j.at("init_method").get<std::string>();
  r.attack = j.at("attack").get<std::string>();
  r.error_rate = j.at("error_rate").get<double>();
  r.avg_confidence = optional_from(j, "avg_confidence");
  r.avg_epsilon = optional_from(j, "avg_epsilon");
  r.n_attacked = j.at("n_attacked").get<std::size_t>();
  r.n_successful = j.at("n_successful").get<std::size_t>();
  r.n_censored = j.at("n_censored").get<std::size_t>();
  return r;
}

AttackSuiteResult run_attack_suite(const MaskedNetwork& net, const Dataset& test, const ExperimentManifest& m,
                                   std::uint64_t one_pixel_seed, const std::string& model_id,
                                   const std::string& init_method, int workers) {
  const EffectiveBudget budget = effective_budget(m);
  AttackSuiteResult out;
  out.test_images = test.size();
  const std::vector<int> correct = first_correct(net, test, test.size());
  out.correct_in_test = correct.size();
  auto first = [&](int count) {
    return std::vector<int>(correct.begin(), correct.begin() + std::min<std::ptrdiff_t>(count, std::ssize(correct)));
  };

  const std::vector<int> fgsm_idx = first(budget.fgsm_images);
  out.fgsm = fgsm_batch(net, test, fgsm_idx, m.fgsm.eps);

  const std::vector<int> search_idx = first(budget.eps_search_images);
  out.fgsm_search.resize(search_idx.size());
  parallel_for(search_idx.size(), workers, [&](std::size_t k) {
    const int i = search_idx[k];
    AdversarialExample ex =
        fgsm_eps_search(net, test.image_vector(static_cast<std::size_t>(i)), test.labels[static_cast<std::size_t>(i)],
                        m.fgsm_search.search);
    ex.original_index = i;
    out.fgsm_search[k] = std::move(ex);
  });

  const std::vector<int> pixel_idx = first(budget.one_pixel_images);
  out.one_pixel.resize(pixel_idx.size());
  parallel_for(pixel_idx.size(), workers, [&](std::size_t k) {
    const int i = pixel_idx[k];
    DEConfig de{budget.de_pop_size, budget.de_max_iter, m.one_pixel.F, m.one_pixel.CR,
                derive_seed(one_pixel_seed, {static_cast<std::uint64_t>(i)}), m.one_pixel.early_stop};
    AdversarialExample ex = one_pixel(net, test.image_vector(static_cast<std::size_t>(i)),
                                      test.labels[static_cast<std::size_t>(i)], de, nullptr, test.rows, test.cols);
    ex.original_index = i;
    out.one_pixel[k] = std::move(ex);
  });

  out.records.push_back(summarize(out.fgsm, "fgsm", model_id, init_method));
  out.records.push_back(summarize(out.fgsm_search, "fgsm_search", model_id, init_method));
  out.records.push_back(summarize(out.one_pixel, "one_pixel", model_id, init_method));
  return out;
}

std::string outcomes_csv(const std::vector<AdversarialExample>& outcomes) {
  std::ostringstream os;
  os << "image_index,success,confidence,epsilon_used,p_x,p_y,I,generations_used\n" << std::setprecision(10);
  for (const auto& o : outcomes) {
    os << o.original_index << ',' << (o.success ? 1 : 0) << ',' << o.confidence << ',';
    if (o.epsilon_used) os << *o.epsilon_used;
    os << ',';
    if (o.candidate) os << o.candidate->px << ',' << o.candidate->py << ',' << o.candidate->intensity;
    else os << ",,";
    os << ',';
    if (o.generations_used) os << *o.generations_used;
    os << '\n';
  }
  return os.str();
}

// ---- sweep ---------------------------------------------------------------

MnistData load_data_for(const ExperimentManifest& m, const std::string& data_dir) {
  const EffectiveBudget b = effective_budget(m);
  MnistData d{load_mnist(data_dir, "train"), load_mnist(data_dir, "test")};
  if (static_cast<std::size_t>(b.train_images) < d.train.size()) d.train = head(d.train, static_cast<std::size_t>(b.train_images));
  if (static_cast<std::size_t>(b.test_images) < d.test.size()) d.test = head(d.test, static_cast<std::size_t>(b.test_images));
  return d;
}

std::string task_key(int graph_id, InitMethod method) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "g%04d_%s", graph_id, std::string(to_string(method)).c_str());
  return buf;
}

SweepSummary run_sweep(const ExperimentManifest& m, ResultsStore& store, const MnistData& data,
                       const SweepOptions& options) {
  m.validate();
  const std::string hash = manifest_hash(m);
  const EffectiveBudget budget = effective_budget(m);
  const std::vector<GraphDocument> graphs = store.load_graphs();

  std::set<std::string> done;
  for (const json& r : store.read_records()) {
    if (r.value("type", "") == "sweep_task" && r.value("status", "") == "done" && r.value("manifest_hash", "") == hash) {
      done.insert(r.at("key").get<std::string>());
    }
  }
  if (!done.empty() && !options.resume) {
    throw std::runtime_error(std::to_string(done.size()) + " completed tasks already recorded under " +
                             store.root().string() + "; pass --resume to continue");
  }

  struct Task {
    const GraphDocument* graph;
    InitMethod method;
    std::string key;
  };
  std::vector<Task> tasks;
  SweepSummary summary;
  for (const GraphDocument& g : graphs) {
    for (InitMethod im : m.init_methods) {
      ++summary.scheduled;
      std::string key = task_key(g.graph_id, im);
      if (done.count(key)) {
        ++summary.skipped;
        continue;
      }
      tasks.push_back({&g, im, std::move(key)});
    }
  }

  std::mutex log_mutex;
  auto log = [&](const std::string& s) {
    if (!options.log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    options.log(s);
  };
  std::atomic<std::size_t> completed{0}, failed{0};

  parallel_for(tasks.size(), options.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t gid = static_cast<std::uint64_t>(task.graph->graph_id);
    const std::uint64_t iid = init_index(task.method);
    const std::uint64_t init_seed = derive_seed(m.master_seed, Stage::kInit, {gid, iid});
    const std::uint64_t shuffle_seed = derive_seed(m.master_seed, Stage::kShuffle, {gid, iid});
    const std::uint64_t pixel_seed = derive_seed(m.master_seed, Stage::kOnePixel, {gid, iid});
    const std::string method(to_string(task.method));
    json record{{"type", "sweep_task"},
                {"key", task.key},
                {"graph_id", task.graph->graph_id},
                {"init_method", method},
                {"manifest_hash", hash},
                {"master_seed", m.master_seed},
                {"task_seed", init_seed},
                {"seeds", {{"init", init_seed}, {"shuffle", shuffle_seed}, {"one_pixel", pixel_seed}}},
                {"mode", m.mode_label()}};
    try {
      MaskedNetwork net = network_for_graph(task.graph->graph);
      init_weights(net, task.method, init_seed);
      TrainConfig cfg = m.train;
      cfg.epochs = budget.epochs;
      cfg.seed = shuffle_seed;
      const auto history = train(net, data.train, cfg);
      const EvalReport eval = evaluate_f1(net, data.test);
      const AttackSuiteResult attacks =
          run_attack_suite(net, data.test, m, pixel_seed, task.key, method, options.attack_workers);

      const fs::path dir = store.model_dir(task.key);
      fs::create_directories(dir);
      save_checkpoint(dir / "checkpoint.bin", net,
                      json{{"init_method", method},
                           {"graph_id", task.graph->graph_id},
                           {"seeds", record["seeds"]},
                           {"manifest_hash", hash}});
      write_text(dir / "history.csv", history_csv(history));
      write_text(dir / "eval.json", eval_json(eval).dump(2) + "\n");
      save_attack_outputs(dir, attacks);

      json robustness = json::array();
      for (const auto& r : attacks.records) robustness.push_back(to_json(r));
      json pixel_images = json::array();
      for (const auto& o : attacks.one_pixel) pixel_images.push_back(o.original_index);
      record["status"] = "done";
      record["param_count"] = param_count(net);
      record["epochs"] = cfg.epochs;
      record["final_train_loss"] = history.empty() ? json(nullptr) : json(history.back().loss);
      record["eval"] = {{"accuracy", eval.accuracy}, {"macro_f1", eval.macro_f1}};
      record["robustness"] = robustness;
      record["one_pixel_images"] = pixel_images;
      record["correct_in_test"] = attacks.correct_in_test;
      record["test_images"] = attacks.test_images;
      ++completed;
      log("done " + task.key + " f1=" + fmt(eval.macro_f1) + " fgsm_err=" + fmt(attacks.records[0].error_rate) +
          " one_pixel_err=" + fmt(attacks.records[2].error_rate));
    } catch (const std::exception& e) {
      record["status"] = "failed";
      record["error"] = e.what();
      ++failed;
      log("failed " + task.key + ": " + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    record["timing"] = {{"seconds", seconds}};
    store.append_record(record);
  });
  summary.completed = completed;
  summary.failed = failed;
  return summary;
}

// ---- correlation ---------------------------------------------------------

const std::vector<PropertySpec>& table_properties() {
  static const std::vector<PropertySpec> props{
      {"Number of parameters", "param_count"},
      {"Density", "density"},
      {"Average path length", "avg_path_length"},
      {"Average eccentricity", "avg_eccentricity"},
      {"Average betweenness", "avg_betweenness"},
  };
  return props;
}

const std::vector<MeasureSpec>& table_measures() {
  static const std::vector<MeasureSpec> measures{
      {"FGSM", "error rate", "fgsm", "error_rate"},
      {"FGSM", "confidence", "fgsm", "avg_confidence"},
      {"FGSM", "avg epsilon", "fgsm_search", "avg_epsilon"},
      {"One Pixel", "error rate", "one_pixel", "error_rate"},
      {"One Pixel", "confidence", "one_pixel", "avg_confidence"},
  };
  return measures;
}

const CorrelationCell* CorrelationTable::find(const std::string& property, const std::string& attack,
                                              const std::string& measure) const {
  for (const auto& c : cells) {
    if (c.property == property && c.attack == attack && c.measure == measure) return &c;
  }
  return nullptr;
}

namespace {

std::string measure_key(const std::string& attack, const std::string& measure) { return attack + "/" + measure; }

std::map<std::string, double> graph_properties(std::size_t params, const GraphMetrics& g) {
  return {{"param_count", static_cast<double>(params)},
          {"density", g.density_undirected},
          {"avg_path_length", g.avg_path_length},
          {"avg_eccentricity", g.avg_eccentricity},
          {"avg_betweenness", g.avg_betweenness}};
}

std::map<std::string, std::optional<double>> run_measures(const std::vector<RobustnessRecord>& records) {
  std::map<std::string, std::optional<double>> out;
  for (const RobustnessRecord& r : records) {
    out[measure_key(r.attack, "error_rate")] =
        r.n_attacked > 0 ? std::optional<double>(r.error_rate) : std::nullopt;
    out[measure_key(r.attack, "avg_confidence")] = r.avg_confidence;
    if (r.attack == "fgsm_search") out[measure_key(r.attack, "avg_epsilon")] = r.avg_epsilon;
  }
  return out;
}

}  // namespace

CorrelationTable correlate_observations(const std::vector<ModelObservation>& models,
                                        const std::vector<RunObservation>& runs,
                                        std::optional<OutlierGranularity> filter) {
  CorrelationTable t;
  std::map<int, const ModelObservation*> by_id;
  for (const auto& mo : models) by_id[mo.model] = &mo;
  std::set<int> with_runs;
  for (const auto& r : runs) {
    if (by_id.count(r.model)) with_runs.insert(r.model);
  }
  t.models = with_runs.size();
  if (t.models < 3) {
    t.withheld = true;
    t.diagnostic = "only " + std::to_string(t.models) + " models with completed runs; at least 3 are required";
    return t;
  }

  for (const MeasureSpec& ms : table_measures()) {
    const std::string key = measure_key(ms.attack, ms.measure);
    std::vector<RunValue> values;
    for (const auto& r : runs) {
      if (!by_id.count(r.model)) continue;
      auto it = r.measures.find(key);
      if (it != r.measures.end() && it->second) values.push_back({r.model, *it->second});
    }
    AggregateResult agg;
    if (filter) {
      agg = aggregate_runs(values, *filter);
    } else {
      std::map<int, std::pair<double, std::size_t>> sums;
      for (const RunValue& v : values) {
        sums[v.model].first += v.value;
        ++sums[v.model].second;
      }
      for (auto& [id, s] : sums) agg.models.push_back({id, s.first / static_cast<double>(s.second), s.second, s.second});
      agg.kept_runs = values.size();
    }
    t.filtering.push_back({ms.attack, ms.measure, values.size(), agg.kept_runs, agg.discarded_runs, agg.dropped_models});

    for (const PropertySpec& ps : table_properties()) {
      CorrelationCell cell;
      cell.property = ps.key;
      cell.attack = ms.attack;
      cell.measure = ms.measure;
      std::vector<double> xs, ys;
      for (const ModelMean& mm : agg.models) {
        xs.push_back(by_id.at(mm.model)->properties.at(ps.key));
        ys.push_back(mm.mean);
      }
      cell.n = xs.size();
      if (cell.n < 3) {
        cell.note = "fewer than 3 models with a value";
      } else {
        cell.rho = spearman(xs, ys);
        cell.tau = kendall(xs, ys);
        if (!cell.defined()) cell.note = "zero rank variance";
      }
      t.cells.push_back(std::move(cell));
    }
  }
  // property-major order
  std::stable_sort(t.cells.begin(), t.cells.end(), [](const CorrelationCell& a, const CorrelationCell& b) {
    auto rank = [](const std::string& key) {
      const auto& props = table_properties();
      return std::find_if(props.begin(), props.end(), [&](const PropertySpec& p) { return p.key == key; }) -
             props.begin();
    };
    return rank(a.property) < rank(b.property);
  });
  return t;
}

CorrelationTable correlate(const ResultsStore& store) {
  const ExperimentManifest m = store.read_manifest();
  const std::string hash = manifest_hash(m);
  std::vector<ModelObservation> models;
  for (const GraphDocument& g : store.load_graphs()) {
    models.push_back({g.graph_id, graph_properties(g.param_count, g.metrics)});
  }
  std::vector<RunObservation> runs;
  std::set<std::string> seen;
  for (const json& r : store.read_records()) {
    if (r.value("type", "") != "sweep_task" || r.value("status", "") != "done" || r.value("manifest_hash", "") != hash) {
      continue;
    }
    if (!seen.insert(r.at("key").get<std::string>()).second) continue;
    std::vector<RobustnessRecord> recs;
    for (const json& rj : r.at("robustness")) recs.push_back(robustness_from_json(rj));
    runs.push_back({r.at("graph_id").get<int>(), run_measures(recs)});
  }
  CorrelationTable t = correlate_observations(models, runs, m.outlier_granularity);
  t.title = "Sweep correlation (" + m.mode_label() + ", manifest " + hash + ")";
  return t;
}

std::string table_csv(const CorrelationTable& t) {
  std::ostringstream os;
  os << "property";
  for (const MeasureSpec& ms : table_measures()) os << ',' << ms.attack_label << ' ' << ms.measure_label;
  os << '\n';
  if (t.withheld) {
    os << "# withheld: " << t.diagnostic << '\n';
    return os.str();
  }
  for (const PropertySpec& ps : table_properties()) {
    os << ps.label;
    for (const MeasureSpec& ms : table_measures()) {
      const CorrelationCell* c = t.find(ps.key, ms.attack, ms.measure);
      os << ',';
      if (c && c->defined()) {
        os << "rho=" << fmt(c->rho.value, 3) << ";tau=" << fmt(c->tau.value, 3);
      } else {
        os << "undefined (" << (c ? c->note : "missing") << ')';
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string table_long_csv(const CorrelationTable& t) {
  std::ostringstream os;
  os << "property,attack,measure,spearman_rho,kendall_tau,cohen_label,n,defined,note\n" << std::setprecision(12);
  for (const auto& c : t.cells) {
    os << c.property << ',' << c.attack << ',' << c.measure << ',';
    if (c.rho.defined) os << c.rho.value;
    os << ',';
    if (c.tau.defined) os << c.tau.value;
    os << ',';
    if (c.rho.defined) os << to_string(cohen_label(c.rho.value));
    os << ',' << c.n << ',' << (c.defined() ? 1 : 0) << ',' << c.note << '\n';
  }
  return os.str();
}

void write_correlation(const CorrelationTable& t, const fs::path& dir) {
  write_text(dir / "correlation.csv", table_csv(t));
  write_text(dir / "correlation_long.csv", table_long_csv(t));
  json filtering = json::array();
  for (const auto& f : t.filtering) {
    filtering.push_back({{"attack", f.attack},
                         {"measure", f.measure},
                         {"total_runs", f.total_runs},
                         {"kept_runs", f.kept_runs},
                         {"discarded_runs", f.discarded_runs},
                         {"dropped_models", f.dropped_models}});
  }
  write_text(dir / "correlation_filtering.json",
             json{{"title", t.title}, {"models", t.models}, {"withheld", t.withheld}, {"diagnostic", t.diagnostic},
                  {"filtering", filtering}}
                     .dump(2) +
                 "\n");
}

// ---- pruning baseline ----------------------------------------------------

PruningResult run_pruning_baseline(const ExperimentManifest& m, ResultsStore& store, const MnistData& data,
                                   const PruningOptions& options) {
  m.validate();
  const EffectiveBudget budget = effective_budget(m);
  const std::string hash = manifest_hash(m);
  const InitMethod method = parse_init_method(m.pruning.init_method);
  auto log = [&](const std::string& s) {
    if (options.log) options.log(s);
  };

  MaskedNetwork net = build_network(dense_layered_dag(m.pruning.hidden_units), kMnistInputDim, kMnistClasses);
  init_weights(net, method, derive_seed(m.master_seed, Stage::kPrune, {0, 1}));
  TrainConfig cfg = m.train;
  cfg.epochs = budget.epochs;
  cfg.seed = derive_seed(m.master_seed, Stage::kPrune, {0, 2});
  train(net, data.train, cfg);

  const fs::path dir = store.pruning_dir();
  fs::create_directories(dir);
  std::ofstream steps_jsonl(dir / "steps.jsonl", std::ios::trunc);

  PruningResult result;
  for (int step = 0; step <= m.pruning.steps; ++step) {
    PruningStepRecord rec;
    rec.step = step;
    if (step > 0) {
      rec.pruned = prune_random(net, m.pruning.alpha,
                                derive_seed(m.master_seed, Stage::kPrune, {static_cast<std::uint64_t>(step), 3}));
      TrainConfig retrain = m.train;
      retrain.epochs = budget.retrain_epochs;
      retrain.seed = derive_seed(m.master_seed, Stage::kPrune, {static_cast<std::uint64_t>(step), 4});
      train(net, data.train, retrain);
    }
    rec.hidden_edges = hidden_connection_count(net);
    rec.param_count = param_count(net);
    const EvalReport eval = evaluate_f1(net, data.test);
    rec.accuracy = eval.accuracy;
    rec.macro_f1 = eval.macro_f1;
    rec.metrics = compute_metrics(to_undirected(network_to_graph(net)));
    const std::string model_id = "prune_step_" + std::to_string(step);
    const AttackSuiteResult attacks =
        run_attack_suite(net, data.test, m,
                         derive_seed(m.master_seed, Stage::kOnePixel, {~0ULL, static_cast<std::uint64_t>(step)}),
                         model_id, m.pruning.init_method, options.attack_workers);
    rec.robustness = attacks.records;
    save_attack_outputs(dir / model_id, attacks);

    json robustness = json::array();
    for (const auto& r : rec.robustness) robustness.push_back(to_json(r));
    steps_jsonl << json{{"type", "pruning_step"},
                        {"manifest_hash", hash},
                        {"master_seed", m.master_seed},
                        {"step", step},
                        {"alpha", m.pruning.alpha},
                        {"retrain_epochs", budget.retrain_epochs},
                        {"hidden_edges", rec.hidden_edges},
                        {"pruned", rec.pruned},
                        {"param_count", rec.param_count},
                        {"eval", {{"accuracy", rec.accuracy}, {"macro_f1", rec.macro_f1}}},
                        {"metrics", metrics_to_json(rec.metrics)},
                        {"robustness", robustness}}
                       .dump()
                << '\n';
    steps_jsonl.flush();
    log("pruning step " + std::to_string(step) + ": hidden_edges=" + std::to_string(rec.hidden_edges) +
        " f1=" + fmt(rec.macro_f1) + " fgsm_err=" + fmt(rec.robustness[0].error_rate));
    result.steps.push_back(std::move(rec));
  }

  std::vector<ModelObservation> models;
  std::vector<RunObservation> runs;
  std::ostringstream csv;
  csv << "step,hidden_edges,pruned,param_count,accuracy,macro_f1,density,avg_path_length,avg_eccentricity,"
         "avg_betweenness,disconnected,fgsm_error_rate,fgsm_confidence,avg_epsilon,one_pixel_error_rate,"
         "one_pixel_confidence\n"
      << std::setprecision(10);
  auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& s : result.steps) {
    models.push_back({s.step, graph_properties(s.param_count, s.metrics)});
    runs.push_back({s.step, run_measures(s.robustness)});
    csv << s.step << ',' << s.hidden_edges << ',' << s.pruned << ',' << s.param_count << ',' << s.accuracy << ','
        << s.macro_f1 << ',' << s.metrics.density_undirected << ',' << s.metrics.avg_path_length << ','
        << s.metrics.avg_eccentricity << ',' << s.metrics.avg_betweenness << ',' << (s.metrics.disconnected ? 1 : 0)
        << ',' << s.robustness[0].error_rate << ',' << opt(s.robustness[0].avg_confidence) << ','
        << opt(s.robustness[1].avg_epsilon) << ',' << s.robustness[2].error_rate << ','
        << opt(s.robustness[2].avg_confidence) << '\n';
  }
  write_text(dir / "steps.csv", csv.str());
  // Each step is a single model with a single run: no outlier filtering.
  result.table = correlate_observations(models, runs, std::nullopt);
  result.table.title = "Pruning baseline correlation (" + m.mode_label() + ", manifest " + hash + ")";
  write_correlation(result.table, dir);
  return result;
}

// ---- report --------------------------------------------------------------

std::vector<std::pair<const MeasureSpec*, std::vector<const CorrelationCell*>>> strongest(const CorrelationTable& t,
                                                                                        std::size_t k) {
  std::vector<std::pair<const MeasureSpec*, std::vector<const CorrelationCell*>>> out;
  for (const MeasureSpec& ms : table_measures()) {
    std::vector<const CorrelationCell*> cells;
    for (const auto& c : t.cells) {
      if (c.attack == ms.attack && c.measure == ms.measure && c.defined()) cells.push_back(&c);
    }
    std::stable_sort(cells.begin(), cells.end(), [](const CorrelationCell* a, const CorrelationCell* b) {
      return std::abs(a->rho.value) > std::abs(b->rho.value);
    });
    if (cells.size() > k) cells.resize(k);
    out.emplace_back(&ms, std::move(cells));
  }
  return out;
}

namespace {

std::string property_label(const std::string& key) {
  for (const auto& p : table_properties()) {
    if (p.key == key) return p.label;
  }
  return key;
}

void render_table(std::ostringstream& os, const CorrelationTable& t) {
  if (t.withheld) {
    os << "  table withheld: " << t.diagnostic << "\n";
    return;
  }
  os << "  models: " << t.models << "\n";
  for (const auto& f : t.filtering) {
    os << "  outlier filter " << f.attack << '/' << f.measure << ": kept " << f.kept_runs << " of " << f.total_runs
       << " runs (" << f.discarded_runs << " discarded, " << f.dropped_models.size() << " models dropped)\n";
  }
  os << "\n  " << std::left << std::setw(24) << "property";
  for (const auto& ms : table_measures()) os << std::setw(26) << (ms.attack_label + " " + ms.measure_label);
  os << "\n";
  for (const auto& ps : table_properties()) {
    os << "  " << std::setw(24) << ps.label;
    for (const auto& ms : table_measures()) {
      const CorrelationCell* c = t.find(ps.key, ms.attack, ms.measure);
      std::string cell = c && c->defined() ? "rho=" + fmt(c->rho.value, 2) + " tau=" + fmt(c->tau.value, 2)
                                           : "undefined";
      os << std::setw(26) << cell;
    }
    os << "\n";
  }
  os << std::right << "\n  strongest associations (two largest |rho| per measure):\n";
  for (const auto& [ms, cells] : strongest(t)) {
    os << "    " << ms->attack_label << ' ' << ms->measure_label << ": ";
    if (cells.empty()) os << "none defined";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << "; ";
      os << property_label(cells[i]->property) << " rho=" << fmt(cells[i]->rho.value, 3)
         << " tau=" << fmt(cells[i]->tau.value, 3) << " (" << to_string(cohen_label(cells[i]->rho.value)) << ")";
    }
    os << "\n";
  }
}

}  // namespace

std::string render_report(const ResultsStore& store) {
  const ExperimentManifest m = store.read_manifest();
  const std::string hash = manifest_hash(m);
  const EffectiveBudget b = effective_budget(m);
  std::ostringstream os;
  os << "snnlab experiment report\n========================\n\n";
  os << "mode: " << m.mode_label() << " (scale factors epochs=" << m.scale.epochs
     << " train=" << m.scale.train_subset << " test=" << m.scale.test_subset
     << " attacks=" << m.scale.attack_subset << " de=" << m.scale.de_budget << ")\n";
  os << "manifest hash: " << hash << "\nmaster seed: " << m.master_seed << "\n";
  os << "effective budget: epochs=" << b.epochs << " train_images=" << b.train_images
     << " test_images=" << b.test_images << " fgsm_images=" << b.fgsm_images
     << " eps_search_images=" << b.eps_search_images << " one_pixel_images=" << b.one_pixel_images
     << " de_pop=" << b.de_pop_size << " de_iter=" << b.de_max_iter << "\n";
  os << "conventions: parameter counts include biases; Kendall tau-b; quartiles by linear interpolation; "
        "FGSM clip=" << (m.fgsm.clip ? "true" : "false")
     << "; outlier granularity="
     << (m.outlier_granularity == OutlierGranularity::kRun ? "run" : "model")
     << "; one-pixel subset rule=" << m.one_pixel.subset_rule << "\n\n";

  try {
    const json g = store.graph_summary();
    os << "graphs: " << g.at("accepted") << " accepted of " << g.at("candidates") << " candidates ("
       << g.at("rejected_below_range") << " below, " << g.at("rejected_above_range") << " above the parameter range; "
       << g.at("disconnected") << " disconnected)" << (g.at("exhausted").get<bool>() ? " [candidate budget exhausted]" : "")
       << "\n";
  } catch (const std::exception& e) {
    os << "graphs: " << e.what() << "\n";
  }

  std::map<std::string, std::vector<double>> f1_by_init;
  std::map<std::string, std::map<std::string, std::vector<double>>> err_by_init;
  std::size_t done = 0, failed = 0;
  std::set<std::string> seen;
  for (const json& r : store.read_records()) {
    if (r.value("type", "") != "sweep_task" || r.value("manifest_hash", "") != hash) continue;
    if (r.value("status", "") != "done") {
      ++failed;
      continue;
    }
    if (!seen.insert(r.at("key").get<std::string>()).second) continue;
    ++done;
    const std::string im = r.at("init_method").get<std::string>();
    f1_by_init[im].push_back(r.at("eval").at("macro_f1").get<double>());
    for (const json& rj : r.at("robustness")) {
      err_by_init[im][rj.at("attack").get<std::string>()].push_back(rj.at("error_rate").get<double>());
    }
  }
  os << "sweep: " << done << " completed tasks, " << failed << " failed task records\n\n";
  if (done > 0) {
    os << "macro-F1 and mean error rates by initialization:\n";
    auto stats = [](const std::vector<double>& v) {
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return fmt(mean) + " [" + fmt(*lo) + ", " + fmt(*hi) + "]";
    };
    for (const auto& [im, f1s] : f1_by_init) {
      os << "  " << std::left << std::setw(5) << im << std::right << " f1 " << stats(f1s);
      for (const auto& [attack, errs] : err_by_init[im]) os << "  " << attack << " err " << stats(errs);
      os << "\n";
    }
    os << "\n";
  }

  os << "correlation between graph properties and robustness (sweep):\n";
  try {
    render_table(os, correlate(store));
  } catch (const std::exception& e) {
    os << "  unavailable: " << e.what() << "\n";
  }

  const fs::path steps = store.pruning_dir() / "steps.jsonl";
  if (fs::exists(steps)) {
    os << "\npruning baseline (hidden units";
    for (int u : m.pruning.hidden_units) os << ' ' << u;
    os << ", alpha=" << m.pruning.alpha << ", " << m.pruning.steps << " steps):\n";
    std::ifstream f(steps);
    std::string line;
    std::vector<ModelObservation> models;
    std::vector<RunObservation> runs;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const json s = json::parse(line);
      if (s.value("manifest_hash", "") != hash) continue;
      std::vector<RobustnessRecord> recs;
      for (const json& rj : s.at("robustness")) recs.push_back(robustness_from_json(rj));
      const GraphMetrics gm = metrics_from_json(s.at("metrics"));
      const int step = s.at("step").get<int>();
      models.push_back({step, graph_properties(s.at("param_count").get<std::size_t>(), gm)});
      runs.push_back({step, run_measures(recs)});
      os << "  step " << std::setw(2) << step << " hidden_edges=" << std::setw(6) << s.at("hidden_edges").get<long>()
         << " f1=" << fmt(s.at("eval").at("macro_f1").get<double>()) << " fgsm_err=" << fmt(recs[0].error_rate)
         << " one_pixel_err=" << fmt(recs[2].error_rate) << "\n";
    }
    os << "\n";
    render_table(os, correlate_observations(models, runs, std::nullopt));
  }
  return os.str();
}

}  // namespace snnlab
