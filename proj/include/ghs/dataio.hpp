#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ghs/linalg.hpp"

namespace ghs {

/// fvecs / bvecs / ivecs records are: little-endian i32 dim, then dim values
/// (f32, u8 and i32 respectively). CSV holds one comma-separated vector per
/// line with an optional header.
enum class VectorFormat { fvecs, bvecs, ivecs, csv };

VectorFormat parse_format(const std::string& name);
/// Guess from the file extension; csv when unrecognized.
VectorFormat format_from_path(const std::filesystem::path& path);
const char* to_string(VectorFormat format);

struct DatasetSpec {
  std::filesystem::path path;
  VectorFormat format = VectorFormat::fvecs;
  std::optional<std::size_t> limit;  // prefix row cap
  std::size_t query_count = 0;
  std::uint64_t seed = 0;
};

Matrix read_vectors(const std::filesystem::path& path, VectorFormat format,
                    std::optional<std::size_t> limit = std::nullopt);
Matrix read_vectors(const DatasetSpec& spec);

/// Binary formats narrow to f32 / u8 / i32; callers are responsible for
/// values being representable.
void write_vectors(const std::filesystem::path& path, const Matrix& x, VectorFormat format);

/// One integer label per line (CSV first column).
std::vector<int> read_labels(const std::filesystem::path& path);

struct Split {
  Matrix train;
  Matrix queries;
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> query_index;
};

/// Seeded uniform sample of query rows without replacement; the rest (in
/// original order) form the training set.
Split split(const Matrix& x, std::size_t query_count, std::uint64_t seed);

/// Picks the same rows out of a label vector.
std::vector<int> gather(const std::vector<int>& values, const std::vector<std::size_t>& index);

enum class SyntheticKind { uniform_ball, gaussian_clusters };

struct SyntheticData {
  Matrix points;
  std::vector<int> labels;  // cluster ids; all zero for uniform_ball
};

struct ClusterShape {
  double center_radius = 4.0;  // centers lie on this sphere
  double noise = 1.0;          // isotropic per-coordinate standard deviation
};

SyntheticData make_synthetic(SyntheticKind kind, std::size_t n, std::size_t d, std::size_t clusters,
                             std::uint64_t seed, const ClusterShape& shape = {});

}  // namespace ghs
