#include "snnlab/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <numeric>

#include "snnlab/seeding.hpp"

namespace snnlab {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

// Whole-file read; gzread passes uncompressed input through unchanged.
std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) out.insert(out.end(), buf, buf + n);
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw DataError("read error in " + path.string());
  return out;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t off) {
  if (off + 4 > b.size()) throw DataError("truncated IDX header");
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

void put_be32(std::ofstream& f, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                     static_cast<char>(v)};
  f.write(b, 4);
}

}  // namespace

Eigen::VectorXd Dataset::image_vector(std::size_t i) const {
  return Eigen::Map<const Eigen::VectorXf>(image(i).data(), dim()).cast<double>();
}

Eigen::MatrixXd Dataset::gather(std::span<const int> indices) const {
  Eigen::MatrixXd out(dim(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXf>(image(static_cast<std::size_t>(indices[k])).data(), dim())
            .cast<double>();
  }
  return out;
}

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 std::string split) {
  const auto img = read_all(images_path);
  const auto lab = read_all(labels_path);
  if (be32(img, 0) != kImageMagic) throw DataError("bad image magic in " + images_path.string());
  if (be32(lab, 0) != kLabelMagic) throw DataError("bad label magic in " + labels_path.string());
  const std::size_t n = be32(img, 4);
  const int rows = static_cast<int>(be32(img, 8));
  const int cols = static_cast<int>(be32(img, 12));
  const std::size_t n_labels = be32(lab, 4);
  if (n != n_labels) {
    throw DataError("image count " + std::to_string(n) + " != label count " + std::to_string(n_labels));
  }
  const std::size_t dim = static_cast<std::size_t>(rows) * cols;
  if (img.size() < 16 + n * dim) throw DataError("truncated image file " + images_path.string());
  if (lab.size() < 8 + n) throw DataError("truncated label file " + labels_path.string());

  Dataset ds;
  ds.rows = rows;
  ds.cols = cols;
  ds.split = std::move(split);
  ds.pixels.resize(n * dim);
  for (std::size_t i = 0; i < n * dim; ++i) ds.pixels[i] = static_cast<float>(img[16 + i]) / 255.0f;
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = lab[8 + i];
    if (ds.labels[i] > 9) throw DataError("label out of range in " + labels_path.string());
  }
  return ds;
}

Dataset load_mnist(const std::filesystem::path& dir, const std::string& split) {
  const std::string prefix = split == "train" ? "train" : split == "test" ? "t10k" : "";
  if (prefix.empty()) throw DataError("split must be 'train' or 'test'");
  auto find = [&](const std::string& stem) {
    for (const char* ext : {"", ".gz"}) {
      const auto p = dir / (prefix + stem + ext);
      if (std::filesystem::exists(p)) return p;
    }
    throw DataError("missing " + (dir / (prefix + stem)).string() + "[.gz]");
  };
  return load_idx(find("-images-idx3-ubyte"), find("-labels-idx1-ubyte"), split);
}

void write_idx_images(const std::filesystem::path& path, int rows, int cols,
                      std::span<const std::uint8_t> bytes) {
  const std::size_t dim = static_cast<std::size_t>(rows) * cols;
  if (dim == 0 || bytes.size() % dim != 0) throw DataError("pixel buffer is not a whole number of images");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  put_be32(f, kImageMagic);
  put_be32(f, static_cast<std::uint32_t>(bytes.size() / dim));
  put_be32(f, static_cast<std::uint32_t>(rows));
  put_be32(f, static_cast<std::uint32_t>(cols));
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("cannot write " + path.string());
}

void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  put_be32(f, kLabelMagic);
  put_be32(f, static_cast<std::uint32_t>(labels.size()));
  f.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
  if (!f) throw DataError("cannot write " + path.string());
}

Dataset subset(const Dataset& ds, std::span<const int> indices) {
  Dataset out;
  out.rows = ds.rows;
  out.cols = ds.cols;
  out.split = ds.split;
  out.pixels.reserve(indices.size() * static_cast<std::size_t>(ds.dim()));
  for (int i : indices) {
    const auto img = ds.image(static_cast<std::size_t>(i));
    out.pixels.insert(out.pixels.end(), img.begin(), img.end());
    out.labels.push_back(ds.labels.at(static_cast<std::size_t>(i)));
  }
  return out;
}

Dataset head(const Dataset& ds, std::size_t n) {
  std::vector<int> idx(std::min(n, ds.size()));
  std::iota(idx.begin(), idx.end(), 0);
  return subset(ds, idx);
}

std::vector<std::vector<int>> batches(std::size_t n, int batch_size, std::uint64_t shuffle_seed) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(shuffle_seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(n, i + static_cast<std::size_t>(batch_size));
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace snnlab
