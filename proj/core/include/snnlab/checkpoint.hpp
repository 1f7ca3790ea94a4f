#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "snnlab/network.hpp"

namespace snnlab {

inline constexpr int kCheckpointSchemaVersion = 1;

// Binary checkpoint layout:
//   bytes 0..7   magic "SNNLABCK"
//   bytes 8..15  header length H, uint64 little-endian
//   next H bytes JSON header (layer_units, layer_vertices, group descriptors
//                with payload offsets, bias descriptors, seeds, init_method)
//   payload      per group: weights as little-endian float32, row-major;
//                mask bit-packed row-major, LSB first; then biases as float32.
// Weights are narrowed to float32 on save.
void save_checkpoint(const std::filesystem::path& path, const MaskedNetwork& net,
                     const nlohmann::json& extra_header = nlohmann::json::object());

struct LoadedCheckpoint {
  MaskedNetwork net;
  nlohmann::json header;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace snnlab
