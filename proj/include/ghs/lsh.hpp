#pragma once

#include <cstdint>

#include "ghs/codes.hpp"
#include "ghs/linalg.hpp"

namespace ghs {

/// Sign-random-projection baseline: one table, c Gaussian hyperplanes
/// through the data mean.
struct LshModel {
  Vector mean;        // D
  Matrix projection;  // D x c
  std::uint64_t seed = 0;
};

LshModel fit_lsh(const Matrix& x, std::size_t bits, std::uint64_t seed);

/// Bit j is +1 when (x - mean) . p_j >= 0, so a zero projection maps to +1.
CodeMatrix lsh_encode(const Matrix& x, const LshModel& model);

}  // namespace ghs
