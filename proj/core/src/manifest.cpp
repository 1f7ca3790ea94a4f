#include "snnlab/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "snnlab/seeding.hpp"

namespace snnlab {

using nlohmann::json;

bool ScaleFactors::paper_scale() const {
  return epochs == 1.0 && train_subset == 1.0 && test_subset == 1.0 && attack_subset == 1.0 && de_budget == 1.0;
}

ScaleFactors ScaleFactors::uniform(double f) { return {f, f, f, f, f}; }

std::string ExperimentManifest::mode_label() const { return scale.paper_scale() ? "paper-scale" : "desk-scale"; }

void ExperimentManifest::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("manifest: " + what); };
  if (grid.size.empty() || grid.nei.empty() || grid.p.empty()) fail("grid axes must be non-empty");
  for (int s : grid.size) {
    if (s < 3) fail("grid size values must be >= 3");
  }
  for (int k : grid.nei) {
    if (k < 1) fail("grid nei values must be >= 1");
  }
  for (double p : grid.p) {
    if (!(p >= 0.0 && p <= 1.0)) fail("grid p values must lie in [0, 1]");
  }
  if (target_graph_count < 1) fail("target_graph_count must be >= 1");
  if (max_candidates < 1) fail("max_candidates must be >= 1");
  if (!(param_low < param_high)) fail("param_range low must be < high");
  if (init_methods.empty()) fail("init_methods must be non-empty");
  snnlab::validate(train);
  if (train_limit < 1 || test_limit < 1) fail("train/test limits must be >= 1");
  if (fgsm.eps < 0.0) fail("fgsm.eps must be >= 0");
  if (one_pixel.pop_size < 4) fail("one_pixel.pop_size must be >= 4");
  if (one_pixel.subset_rule != "first_correct") fail("only subset_rule 'first_correct' is supported");
  if (!(pruning.alpha >= 0.0 && pruning.alpha <= 1.0)) fail("pruning.alpha must lie in [0, 1]");
  if (pruning.hidden_units.empty()) fail("pruning.hidden_units must be non-empty");
  parse_init_method(pruning.init_method);
  for (double f : {scale.epochs, scale.train_subset, scale.test_subset, scale.attack_subset, scale.de_budget}) {
    if (!(f > 0.0 && f <= 1.0)) fail("scale factors must lie in (0, 1]");
  }
}

json to_json(const ExperimentManifest& m) {
  json inits = json::array();
  for (InitMethod im : m.init_methods) inits.push_back(std::string(to_string(im)));
  return json{
      {"schema_version", kManifestSchemaVersion},
      {"grid", {{"size", m.grid.size}, {"nei", m.grid.nei}, {"p", m.grid.p}}},
      {"target_graph_count", m.target_graph_count},
      {"max_candidates", m.max_candidates},
      {"param_range", {m.param_low, m.param_high}},
      {"init_methods", inits},
      {"train",
       {{"learning_rate", m.train.learning_rate},
        {"beta1", m.train.beta1},
        {"beta2", m.train.beta2},
        {"adam_eps", m.train.adam_eps},
        {"epochs", m.train.epochs},
        {"batch_size", m.train.batch_size}}},
      {"data", {{"train_limit", m.train_limit}, {"test_limit", m.test_limit}}},
      {"attacks",
       {{"fgsm", {{"eps", m.fgsm.eps}, {"clip", m.fgsm.clip}, {"limit", m.fgsm.limit}}},
        {"fgsm_search",
         {{"start", m.fgsm_search.search.start},
          {"step", m.fgsm_search.search.step},
          {"cap", m.fgsm_search.search.cap},
          {"limit", m.fgsm_search.limit}}},
        {"one_pixel",
         {{"pop_size", m.one_pixel.pop_size},
          {"max_iter", m.one_pixel.max_iter},
          {"F", m.one_pixel.F},
          {"CR", m.one_pixel.CR},
          {"early_stop", m.one_pixel.early_stop},
          {"subset_size", m.one_pixel.subset_size},
          {"subset_rule", m.one_pixel.subset_rule}}}}},
      {"pruning",
       {{"hidden_units", m.pruning.hidden_units},
        {"alpha", m.pruning.alpha},
        {"steps", m.pruning.steps},
        {"retrain_epochs", m.pruning.retrain_epochs},
        {"init_method", m.pruning.init_method}}},
      {"outlier_granularity", m.outlier_granularity == OutlierGranularity::kRun ? "run" : "model"},
      {"scale",
       {{"epochs", m.scale.epochs},
        {"train_subset", m.scale.train_subset},
        {"test_subset", m.scale.test_subset},
        {"attack_subset", m.scale.attack_subset},
        {"de_budget", m.scale.de_budget}}},
      {"master_seed", m.master_seed},
  };
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw std::invalid_argument("manifest: unknown key '" + where + k + "'");
  }
}

}  // namespace

ExperimentManifest manifest_from_json(const json& j) {
  reject_unknown(j,
                 {"schema_version", "grid", "target_graph_count", "max_candidates", "param_range", "init_methods",
                  "train", "data", "attacks", "pruning", "outlier_granularity", "scale", "master_seed", "mode",
                  "manifest_hash"},
                 "");
  if (j.value("schema_version", kManifestSchemaVersion) != kManifestSchemaVersion) {
    throw std::invalid_argument("manifest: unsupported schema_version");
  }
  ExperimentManifest m;
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    read(g, "size", m.grid.size);
    read(g, "nei", m.grid.nei);
    read(g, "p", m.grid.p);
  }
  read(j, "target_graph_count", m.target_graph_count);
  read(j, "max_candidates", m.max_candidates);
  if (j.contains("param_range")) {
    const json& r = j.at("param_range");
    m.param_low = r.at(0).get<std::size_t>();
    // null upper bound means unbounded
    m.param_high = r.at(1).is_null() ? std::numeric_limits<std::size_t>::max() : r.at(1).get<std::size_t>();
  }
  if (j.contains("init_methods")) {
    m.init_methods.clear();
    for (const json& s : j.at("init_methods")) m.init_methods.push_back(parse_init_method(s.get<std::string>()));
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    read(t, "learning_rate", m.train.learning_rate);
    read(t, "beta1", m.train.beta1);
    read(t, "beta2", m.train.beta2);
    read(t, "adam_eps", m.train.adam_eps);
    read(t, "epochs", m.train.epochs);
    read(t, "batch_size", m.train.batch_size);
  }
  if (j.contains("data")) {
    read(j.at("data"), "train_limit", m.train_limit);
    read(j.at("data"), "test_limit", m.test_limit);
  }
  if (j.contains("attacks")) {
    const json& a = j.at("attacks");
    if (a.contains("fgsm")) {
      read(a.at("fgsm"), "eps", m.fgsm.eps);
      read(a.at("fgsm"), "clip", m.fgsm.clip);
      read(a.at("fgsm"), "limit", m.fgsm.limit);
    }
    if (a.contains("fgsm_search")) {
      const json& s = a.at("fgsm_search");
      read(s, "start", m.fgsm_search.search.start);
      read(s, "step", m.fgsm_search.search.step);
      read(s, "cap", m.fgsm_search.search.cap);
      read(s, "limit", m.fgsm_search.limit);
    }
    if (a.contains("one_pixel")) {
      const json& o = a.at("one_pixel");
      read(o, "pop_size", m.one_pixel.pop_size);
      read(o, "max_iter", m.one_pixel.max_iter);
      read(o, "F", m.one_pixel.F);
      read(o, "CR", m.one_pixel.CR);
      read(o, "early_stop", m.one_pixel.early_stop);
      read(o, "subset_size", m.one_pixel.subset_size);
      read(o, "subset_rule", m.one_pixel.subset_rule);
    }
  }
  if (j.contains("pruning")) {
    const json& p = j.at("pruning");
    read(p, "hidden_units", m.pruning.hidden_units);
    read(p, "alpha", m.pruning.alpha);
    read(p, "steps", m.pruning.steps);
    read(p, "retrain_epochs", m.pruning.retrain_epochs);
    read(p, "init_method", m.pruning.init_method);
  }
  if (j.contains("outlier_granularity")) {
    const auto g = j.at("outlier_granularity").get<std::string>();
    if (g == "run") {
      m.outlier_granularity = OutlierGranularity::kRun;
    } else if (g == "model") {
      m.outlier_granularity = OutlierGranularity::kModel;
    } else {
      throw std::invalid_argument("manifest: outlier_granularity must be 'run' or 'model'");
    }
  }
  if (j.contains("scale")) {
    const json& s = j.at("scale");
    if (s.is_number()) {
      m.scale = ScaleFactors::uniform(s.get<double>());
    } else {
      read(s, "epochs", m.scale.epochs);
      read(s, "train_subset", m.scale.train_subset);
      read(s, "test_subset", m.scale.test_subset);
      read(s, "attack_subset", m.scale.attack_subset);
      read(s, "de_budget", m.scale.de_budget);
    }
  }
  read(j, "master_seed", m.master_seed);
  m.validate();
  return m;
}

ExperimentManifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open manifest " + path);
  return manifest_from_json(json::parse(f));
}

std::string manifest_hash(const ExperimentManifest& m) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(m).dump())));
  return buf;
}

namespace {

int scaled(int base, double factor, int floor_value = 1) {
  if (base <= 0) return base;
  return std::max(floor_value, static_cast<int>(std::ceil(static_cast<double>(base) * factor - 1e-9)));
}

}  // namespace

EffectiveBudget effective_budget(const ExperimentManifest& m) {
  EffectiveBudget b;
  b.epochs = scaled(m.train.epochs, m.scale.epochs);
  b.retrain_epochs = scaled(m.pruning.retrain_epochs, m.scale.epochs);
  b.train_images = scaled(m.train_limit, m.scale.train_subset);
  b.test_images = scaled(m.test_limit, m.scale.test_subset);
  b.fgsm_images = scaled(m.fgsm.limit, m.scale.attack_subset);
  b.eps_search_images = scaled(m.fgsm_search.limit, m.scale.attack_subset);
  b.one_pixel_images = scaled(m.one_pixel.subset_size, m.scale.attack_subset);
  b.de_pop_size = scaled(m.one_pixel.pop_size, m.scale.de_budget, 4);
  b.de_max_iter = scaled(m.one_pixel.max_iter, m.scale.de_budget);
  return b;
}

}  // namespace snnlab
