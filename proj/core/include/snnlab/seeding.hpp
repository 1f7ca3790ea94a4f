#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace snnlab {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a over raw bytes; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes);

// Derives an independent stream seed from a master seed and a tuple of
// identifiers (graph id, init method, stage, image index, ...).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts);

// Stage tags for derive_seed; values are part of the reproducibility contract.
enum class Stage : std::uint64_t {
  kGraph = 1,
  kInit = 2,
  kShuffle = 3,
  kOnePixel = 4,
  kPrune = 5,
  kSubset = 6,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stage stage,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = derive_seed(master, {static_cast<std::uint64_t>(stage)});
  return derive_seed(s, parts);
}

}  // namespace snnlab
