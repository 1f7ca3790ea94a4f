#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>

#include "snnlab/graph.hpp"

namespace snnlab {

inline constexpr int kGraphSchemaVersion = 1;

// One persisted graph document:
// {schema_version, graph_id, generator: {size, nei, p, seed}, vertex_count,
//  edges: [[u, v], ...], metrics: {...}, disconnected_flag, param_count}
struct GraphDocument {
  int graph_id = 0;
  WsParams generator;
  std::uint64_t seed = 0;
  UndirectedGraph graph{0};
  GraphMetrics metrics;
  std::size_t param_count = 0;
};

nlohmann::json metrics_to_json(const GraphMetrics& m);
GraphMetrics metrics_from_json(const nlohmann::json& j);

nlohmann::json graph_to_json(const GraphDocument& doc);
GraphDocument graph_from_json(const nlohmann::json& j);

}  // namespace snnlab
