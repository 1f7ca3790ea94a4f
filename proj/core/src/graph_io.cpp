#include "snnlab/graph_io.hpp"

#include <string>

namespace snnlab {

using nlohmann::json;

json metrics_to_json(const GraphMetrics& m) {
  json degree = json::object();
  for (auto [k, v] : m.degree_distribution) degree[std::to_string(k)] = v;
  json paths = json::object();
  for (auto [k, v] : m.path_length_distribution) paths[std::to_string(k)] = v;
  return json{
      {"vertex_count", m.vertex_count},
      {"edge_count", m.edge_count},
      {"density_undirected", m.density_undirected},
      {"density_directed", m.density_directed},
      {"disconnected", m.disconnected},
      {"component_size", m.component_size},
      {"diameter", m.diameter},
      {"avg_path_length", m.avg_path_length},
      {"avg_eccentricity", m.avg_eccentricity},
      {"avg_betweenness", m.avg_betweenness},
      {"avg_closeness", m.avg_closeness},
      {"degree_distribution", degree},
      {"path_length_distribution", paths},
  };
}

GraphMetrics metrics_from_json(const json& j) {
  GraphMetrics m;
  m.vertex_count = j.at("vertex_count").get<int>();
  m.edge_count = j.at("edge_count").get<std::size_t>();
  m.density_undirected = j.at("density_undirected").get<double>();
  m.density_directed = j.at("density_directed").get<double>();
  m.disconnected = j.at("disconnected").get<bool>();
  m.component_size = j.at("component_size").get<int>();
  m.diameter = j.at("diameter").get<int>();
  m.avg_path_length = j.at("avg_path_length").get<double>();
  m.avg_eccentricity = j.at("avg_eccentricity").get<double>();
  m.avg_betweenness = j.at("avg_betweenness").get<double>();
  m.avg_closeness = j.at("avg_closeness").get<double>();
  for (auto& [k, v] : j.at("degree_distribution").items()) {
    m.degree_distribution[std::stoi(k)] = v.get<int>();
  }
  for (auto& [k, v] : j.at("path_length_distribution").items()) {
    m.path_length_distribution[std::stoi(k)] = v.get<long>();
  }
  return m;
}

json graph_to_json(const GraphDocument& doc) {
  json edges = json::array();
  for (const Edge& e : doc.graph.edges()) edges.push_back({e.u, e.v});
  return json{
      {"schema_version", kGraphSchemaVersion},
      {"graph_id", doc.graph_id},
      {"generator",
       {{"model", "watts_strogatz"},
        {"size", doc.generator.size},
        {"nei", doc.generator.nei},
        {"p", doc.generator.p},
        {"seed", doc.seed}}},
      {"vertex_count", doc.graph.vertex_count()},
      {"edges", std::move(edges)},
      {"metrics", metrics_to_json(doc.metrics)},
      {"disconnected_flag", doc.metrics.disconnected},
      {"param_count", doc.param_count},
  };
}

GraphDocument graph_from_json(const json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != kGraphSchemaVersion) {
    throw std::runtime_error("unsupported graph schema_version " + std::to_string(version));
  }
  GraphDocument doc;
  doc.graph_id = j.value("graph_id", 0);
  const json& gen = j.at("generator");
  doc.generator = {gen.at("size").get<int>(), gen.at("nei").get<int>(), gen.at("p").get<double>()};
  doc.seed = gen.at("seed").get<std::uint64_t>();
  const int n = j.at("vertex_count").get<int>();
  std::vector<Edge> edges;
  for (const json& e : j.at("edges")) edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  doc.graph = UndirectedGraph::from_edges(n, edges);
  doc.metrics = metrics_from_json(j.at("metrics"));
  doc.param_count = j.value("param_count", std::size_t{0});
  return doc;
}

}  // namespace snnlab
