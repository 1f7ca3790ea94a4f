#pragma once

#include <filesystem>
#include <mutex>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "snnlab/graph_io.hpp"
#include "snnlab/manifest.hpp"

namespace snnlab {

// Directory-backed, append-only record store.
//
//   <root>/manifest.json           manifest + hash
//   <root>/graphs/index.json       accepted ids, rejection counts
//   <root>/graphs/graph_NNNN.json  one document per accepted graph
//   <root>/records.jsonl           one JSON object per completed (or failed) task
//   <root>/models/<key>/           checkpoint, history.csv, per-image attack CSVs
//   <root>/pruning/                pruning-baseline step records and tables
class ResultsStore {
 public:
  explicit ResultsStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path graphs_dir() const { return root_ / "graphs"; }
  std::filesystem::path models_dir() const { return root_ / "models"; }
  std::filesystem::path model_dir(const std::string& key) const { return models_dir() / key; }
  std::filesystem::path pruning_dir() const { return root_ / "pruning"; }
  std::filesystem::path records_path() const { return root_ / "records.jsonl"; }

  void write_manifest(const ExperimentManifest& m) const;
  bool has_manifest() const;
  ExperimentManifest read_manifest() const;

  void save_graphs(const std::vector<GraphDocument>& graphs, const nlohmann::json& summary) const;
  std::vector<GraphDocument> load_graphs() const;
  nlohmann::json graph_summary() const;

  // Serialized through an internal mutex; each call appends one line and flushes.
  void append_record(const nlohmann::json& record);
  std::vector<nlohmann::json> read_records() const;

 private:
  std::filesystem::path root_;
  std::mutex write_mutex_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace snnlab
