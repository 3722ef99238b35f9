#pragma once

// Data-dependent satellite placement. Alternately minimizes the grouped
// quantization loss
//
//   E = sum_i sum_j (B_ij + beta_j - alpha_j * ||y_i - s_j R_k||)^2,
//   s.t. every code column is balanced and every R_k is orthogonal,
//
// over the codes B, the per-satellite scale/offset (alpha, beta) and one
// rotation R_k per satellite group. Rotations are found by solving for free
// satellite positions with a multilateration step, then fitting the group's
// rotation to them with orthogonal Procrustes.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "ghs/codes.hpp"
#include "ghs/constellation.hpp"
#include "ghs/linalg.hpp"

namespace ghs {

/// 1 for codes up to 16 bits, 0.5 beyond.
double default_rho(std::size_t bits);

struct TrainConfigDD {
  std::size_t bits = 32;
  double rho = 0.0;  // 0 selects default_rho(bits)
  double r_s = 2.0;
  double epsilon = 0.0;  // 0 selects 1e-4 * n * c
  std::size_t max_iter = 50;
  std::uint64_t seed = 0;
  double ridge = 1e-10;

  double resolved_rho() const { return rho > 0.0 ? rho : default_rho(bits); }
  void validate() const;
};

struct Layout {
  std::size_t dims = 0;
  std::vector<Group> groups;
};

/// Groups of d+1 satellites; only the last may be smaller.
Layout layout_for_dims(std::size_t bits, std::size_t dims);

/// d = min(round(c / rho) - 1, D) plus the matching group layout.
Layout derive_dims(std::size_t bits, double rho, std::size_t input_dim);

/// size x d block of initial satellites: the first min(size, d) rows are
/// left singular vectors of a random d x d matrix, an extra (d+1)-th row is
/// a random direction, and every row has norm r_s.
Matrix init_group(std::size_t d, std::size_t size, double r_s, std::mt19937_64& rng);

struct DDState {
  Matrix base;  // c x d unrotated satellites
  std::vector<Matrix> rotations;
  std::vector<Group> groups;
  Vector alpha;
  Vector beta;
  CodeMatrix codes;
  double loss = 0.0;

  /// Satellites with their group rotation applied: row j = s_j R_k.
  Matrix rotated_satellites() const;
};

DDState init_state(const Matrix& y, const Layout& layout, double r_s, std::mt19937_64& rng);

double loss(const Matrix& y, const DDState& state);

/// Same loss from a precomputed distance matrix to the rotated satellites.
double loss_from_distances(const Matrix& distances, const CodeMatrix& codes, const Vector& alpha,
                           const Vector& beta);

CodeMatrix update_B(const Matrix& y, const DDState& state);
Vector update_alpha(const Matrix& y, const DDState& state);
Vector update_beta(const Matrix& y, const DDState& state);

/// Multilateration with a precomputed Gram matrix, so one training pass
/// costs O(n d) per satellite after an O(n d^2) setup. The anchor matrix
/// must outlive the solver.
class GpsSolver {
 public:
  GpsSolver(const Matrix& anchors, double ridge);

  /// Point whose distances to the anchor rows best match `ranges`. Returns
  /// nullopt when the range quadratic has no real root.
  std::optional<Vector> solve(const Vector& ranges, double r_s) const;

 private:
  const Matrix& anchors_;
  double ridge_;
  Vector sq_norms_;          // ||y_i||^2
  Eigen::MatrixXd gram_;     // Y^T Y
  Vector anchor_sum_;        // Y^T 1
  Vector anchor_sq_norms_;   // Y^T q
};

/// Place one satellite so that its distances to the rows of y match
/// bprime (target distances B'_ij = (B_ij + beta_j) / alpha_j). Appends the
/// ranges as an extra coordinate with negative signature, solves the
/// linearized system through the ridge pseudo-inverse, then picks the root
/// of the scalar quadratic whose position norm is closest to r_s. The
/// auxiliary coordinate is dropped.
std::optional<Vector> gps_solve_satellite(const Matrix& y, const Vector& bprime, double r_s, double ridge);

/// Orthogonal R minimizing sum_j ||s'_j - s_j R||^2 (rows of target / source).
Matrix procrustes_rotation(const Matrix& target, const Matrix& source);

struct DDIteration {
  std::size_t iteration = 0;
  double loss_after_codes = 0.0;
  double loss_after_alpha = 0.0;
  double loss_after_beta = 0.0;
  double loss = 0.0;  // after the rotation step; this is E^k
  std::size_t gps_fallbacks = 0;
  std::size_t negative_alpha = 0;
  double max_rotation_defect = 0.0;
  double seconds = 0.0;
};

struct DDReport {
  double initial_loss = 0.0;
  std::vector<DDIteration> trace;
  std::size_t gps_fallbacks = 0;
  bool converged = false;

  double final_loss() const { return trace.empty() ? initial_loss : trace.back().loss; }
};

struct DDResult {
  Constellation constellation;
  DDReport report;
};

/// Full training loop on embedded data (n x d). Deterministic given the seed.
DDResult train_dd(const Matrix& y, const TrainConfigDD& cfg);

/// iteration,E,gps_fallbacks,wall_time
void write_dd_trace_csv(std::ostream& out, const DDReport& report);

}  // namespace ghs
