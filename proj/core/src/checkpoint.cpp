#include "snnlab/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace snnlab {

namespace {

constexpr char kMagic[8] = {'S', 'N', 'N', 'L', 'A', 'B', 'C', 'K'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void put_floats(std::string& out, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(data[i])));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MaskedNetwork& net,
                     const nlohmann::json& extra_header) {
  using nlohmann::json;
  std::string payload;
  json groups = json::array();
  for (const WeightGroup& g : net.groups) {
    const Eigen::Index rows = g.weights.rows();
    const Eigen::Index cols = g.weights.cols();
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = g.weights;
    const std::size_t weights_offset = payload.size();
    put_floats(payload, w.data(), static_cast<std::size_t>(w.size()));
    const std::size_t mask_offset = payload.size();
    std::string bits((static_cast<std::size_t>(rows * cols) + 7) / 8, '\0');
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (g.mask(r, c) != 0.0) {
          const std::size_t i = static_cast<std::size_t>(r * cols + c);
          bits[i / 8] = static_cast<char>(bits[i / 8] | (1 << (i % 8)));
        }
      }
    }
    payload += bits;
    groups.push_back({{"source", g.source},
                      {"target", g.target},
                      {"rows", rows},
                      {"cols", cols},
                      {"weights_offset", weights_offset},
                      {"mask_offset", mask_offset}});
  }
  json biases = json::array();
  for (std::size_t l = 0; l < net.biases.size(); ++l) {
    biases.push_back({{"layer", l}, {"size", net.biases[l].size()}, {"offset", payload.size()}});
    put_floats(payload, net.biases[l].data(), static_cast<std::size_t>(net.biases[l].size()));
  }

  json header = extra_header;
  header["schema_version"] = kCheckpointSchemaVersion;
  header["input_dim"] = net.input_dim;
  header["output_dim"] = net.output_dim;
  header["vertex_count"] = net.vertex_count;
  header["layer_units"] = net.layer_units;
  header["layer_vertices"] = net.layer_vertices;
  header["groups"] = std::move(groups);
  header["biases"] = std::move(biases);
  header["payload_bytes"] = payload.size();
  header["float_format"] = "float32-le";
  header["mask_format"] = "bitpacked-rowmajor-lsb";
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_u64(out, header_text.size());
  out += header_text;
  out += payload;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write checkpoint " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("short write on checkpoint " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path.string());
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t header_len = get_u64(raw + 8);
  if (16 + header_len > bytes.size()) throw std::runtime_error("truncated checkpoint header");
  LoadedCheckpoint out;
  out.header = nlohmann::json::parse(bytes.substr(16, header_len));
  const nlohmann::json& h = out.header;
  if (h.at("schema_version").get<int>() != kCheckpointSchemaVersion) {
    throw std::runtime_error("unsupported checkpoint schema_version");
  }
  const std::size_t base = 16 + header_len;
  const std::size_t payload_bytes = h.at("payload_bytes").get<std::size_t>();
  if (base + payload_bytes > bytes.size()) throw std::runtime_error("truncated checkpoint payload");
  const unsigned char* payload = raw + base;
  auto read_float = [&](std::size_t offset) {
    if (offset + 4 > payload_bytes) throw std::runtime_error("checkpoint offset out of range");
    return static_cast<double>(std::bit_cast<float>(get_u32(payload + offset)));
  };

  MaskedNetwork& net = out.net;
  net.input_dim = h.at("input_dim").get<int>();
  net.output_dim = h.at("output_dim").get<int>();
  net.vertex_count = h.at("vertex_count").get<int>();
  net.layer_units = h.at("layer_units").get<std::vector<int>>();
  net.layer_vertices = h.at("layer_vertices").get<std::vector<std::vector<int>>>();
  for (const auto& gj : h.at("groups")) {
    WeightGroup g;
    g.source = gj.at("source").get<int>();
    g.target = gj.at("target").get<int>();
    const auto rows = gj.at("rows").get<Eigen::Index>();
    const auto cols = gj.at("cols").get<Eigen::Index>();
    const auto woff = gj.at("weights_offset").get<std::size_t>();
    const auto moff = gj.at("mask_offset").get<std::size_t>();
    if (moff + static_cast<std::size_t>(rows * cols + 7) / 8 > payload_bytes) {
      throw std::runtime_error("checkpoint mask out of range");
    }
    g.weights.resize(rows, cols);
    g.mask.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        const std::size_t i = static_cast<std::size_t>(r * cols + c);
        g.weights(r, c) = read_float(woff + 4 * i);
        g.mask(r, c) = (payload[moff + i / 8] >> (i % 8)) & 1 ? 1.0 : 0.0;
      }
    }
    net.groups.push_back(std::move(g));
  }
  for (const auto& bj : h.at("biases")) {
    const auto size = bj.at("size").get<Eigen::Index>();
    const auto off = bj.at("offset").get<std::size_t>();
    Eigen::VectorXd b(size);
    for (Eigen::Index i = 0; i < size; ++i) b(i) = read_float(off + 4 * static_cast<std::size_t>(i));
    net.biases.push_back(std::move(b));
  }
  net.reindex();
  net.enforce_masks();
  return out;
}

}  // namespace snnlab
