#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace snnlab {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Images stored row-major (one 28x28 image per row of `pixels`), values in [0, 1].
struct Dataset {
  int rows = 28;
  int cols = 28;
  std::vector<float> pixels;
  std::vector<int> labels;
  std::string split;

  std::size_t size() const { return labels.size(); }
  int dim() const { return rows * cols; }
  std::span<const float> image(std::size_t i) const {
    return {pixels.data() + i * static_cast<std::size_t>(dim()), static_cast<std::size_t>(dim())};
  }
  Eigen::VectorXd image_vector(std::size_t i) const;
  // Stacks the selected images as columns: dim() x indices.size().
  Eigen::MatrixXd gather(std::span<const int> indices) const;
};

// Reads an IDX3 image file and IDX1 label file (plain or gzip-compressed).
// Pixels are scaled by 1/255.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 std::string split = "");

// Locates {train,t10k}-{images-idx3,labels-idx1}-ubyte[.gz] under `dir`.
Dataset load_mnist(const std::filesystem::path& dir, const std::string& split);

void write_idx_images(const std::filesystem::path& path, int rows, int cols,
                      std::span<const std::uint8_t> bytes);
void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels);

Dataset subset(const Dataset& ds, std::span<const int> indices);
Dataset head(const Dataset& ds, std::size_t n);

// Shuffled index batches covering 0..n-1 exactly once; the last batch may be short.
std::vector<std::vector<int>> batches(std::size_t n, int batch_size, std::uint64_t shuffle_seed);

}  // namespace snnlab
