#include "snnlab/store.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace snnlab {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  // write-then-rename so readers never see a partial file
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << text;
    if (!f) throw std::runtime_error("short write on " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return json::parse(f);
}

ResultsStore::ResultsStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void ResultsStore::write_manifest(const ExperimentManifest& m) const {
  json j = to_json(m);
  j["manifest_hash"] = manifest_hash(m);
  j["mode"] = m.mode_label();
  write_text(root_ / "manifest.json", j.dump(2) + "\n");
}

bool ResultsStore::has_manifest() const { return fs::exists(root_ / "manifest.json"); }

ExperimentManifest ResultsStore::read_manifest() const { return manifest_from_json(read_json(root_ / "manifest.json")); }

void ResultsStore::save_graphs(const std::vector<GraphDocument>& graphs, const json& summary) const {
  fs::create_directories(graphs_dir());
  json ids = json::array();
  for (const GraphDocument& g : graphs) {
    char name[32];
    std::snprintf(name, sizeof(name), "graph_%04d.json", g.graph_id);
    write_text(graphs_dir() / name, graph_to_json(g).dump() + "\n");
    ids.push_back(g.graph_id);
  }
  json index = summary;
  index["graph_ids"] = ids;
  write_text(graphs_dir() / "index.json", index.dump(2) + "\n");
}

std::vector<GraphDocument> ResultsStore::load_graphs() const {
  const json index = graph_summary();
  std::vector<GraphDocument> out;
  for (const json& id : index.at("graph_ids")) {
    char name[32];
    std::snprintf(name, sizeof(name), "graph_%04d.json", id.get<int>());
    out.push_back(graph_from_json(read_json(graphs_dir() / name)));
  }
  return out;
}

json ResultsStore::graph_summary() const {
  const fs::path p = graphs_dir() / "index.json";
  if (!fs::exists(p)) throw std::runtime_error("no graph dataset under " + graphs_dir().string() + " (run gen-graphs)");
  return read_json(p);
}

void ResultsStore::append_record(const json& record) {
  std::lock_guard<std::mutex> lock(write_mutex_);
  std::ofstream f(records_path(), std::ios::app);
  if (!f) throw std::runtime_error("cannot append to " + records_path().string());
  f << record.dump() << '\n';
  f.flush();
}

std::vector<json> ResultsStore::read_records() const {
  std::vector<json> out;
  std::ifstream f(records_path());
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      // a torn final line from an interrupted run; the task will be redone
    }
  }
  return out;
}

}  // namespace snnlab
