#pragma once

#include <filesystem>
#include <iosfwd>

#include "ghs/codes.hpp"
#include "ghs/constellation.hpp"
#include "ghs/embedding.hpp"
#include "ghs/lsh.hpp"

namespace ghs {

/// Everything needed to hash new descriptors: the embedding plus the
/// satellite constellation. LSH baselines store their hyperplanes in the
/// embedding (kind lsh) and carry no constellation.
struct HashModel {
  EmbeddingModel embedding;
  Constellation constellation;

  bool is_lsh() const { return embedding.kind == EmbeddingKind::lsh; }
  std::size_t bits() const;
};

HashModel make_lsh_model(const LshModel& lsh);

/// Raw descriptors to packed codes.
CodeMatrix hash_vectors(const HashModel& model, const Matrix& x);

/// GHS1 model file, little-endian:
///   "GHS1", u32 version, u8 kind, u32 D, u32 d, u32 c, f64 r_s,
///   f64 mean[D], f64 projection[D*d] (row-major), f64 scale,
///   u32 group count, (u32 start, u32 len) per group,
///   f64 satellites[c*d] (row-major), f64 thresholds[c].
/// For kind lsh, d == c, the group count is zero and the satellite and
/// threshold blocks are absent.
void write_model(std::ostream& out, const HashModel& model);
HashModel read_model(std::istream& in);
void write_model(const std::filesystem::path& path, const HashModel& model);
HashModel read_model(const std::filesystem::path& path);

inline constexpr std::uint32_t kModelVersion = 1;

}  // namespace ghs
