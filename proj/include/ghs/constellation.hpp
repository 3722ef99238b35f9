#pragma once

#include <cstdint>
#include <vector>

#include "ghs/codes.hpp"
#include "ghs/linalg.hpp"

namespace ghs {

/// Contiguous range of satellite indices sharing one rotation during training.
struct Group {
  std::uint32_t start = 0;
  std::uint32_t len = 0;
  friend bool operator==(const Group&, const Group&) = default;
};

/// The trained hashing model in embedded space. Each satellite contributes
/// one bit: -1 when a point lies within its threshold distance, +1 beyond.
struct Constellation {
  Matrix satellites;  // c x d, rotations already folded in
  Vector thresholds;  // c
  std::vector<Group> groups;
  double r_s = 2.0;
  double rho = 1.0;

  std::size_t bits() const { return static_cast<std::size_t>(satellites.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(satellites.cols()); }

  /// Throws if the structural invariants do not hold.
  void validate() const;
};

/// Distance-to-satellite matrix: entry (i, j) = ||y_i - s_j||.
Matrix d2s(const Matrix& y, const Matrix& satellites);

/// Column-wise medians of a distance matrix.
Vector column_medians(const Matrix& distances);

/// Per-satellite median distance over the rows of y.
Vector fit_thresholds(const Matrix& y, const Matrix& satellites);

/// Threshold a precomputed distance matrix: bit set (+1) iff distance > threshold.
CodeMatrix encode_distances(const Matrix& distances, const Vector& thresholds);

CodeMatrix encode(const Matrix& y, const Constellation& model);

}  // namespace ghs
