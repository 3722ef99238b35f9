#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ghs/constellation.hpp"
#include "ghs/linalg.hpp"

namespace ghs {

struct TrainConfigDI {
  std::size_t bits = 32;
  double rho = 0.0;  // 0 selects default_rho(bits)
  double r_s = 2.0;
  double step = 0.0;  // 0 selects 0.01 / c
  std::size_t max_iter = 1000;
  double tol = 1e-9;  // relative change of the objective
  std::uint64_t seed = 0;

  void validate() const;
};

/// Sum over satellite pairs j < j' of ||s_j - s_j'||^2.
double di_objective(const Matrix& satellites);

/// Gradient of di_objective with respect to s_j: (c-1) s_j - sum_{j' != j} s_j'.
///
/// The published form, (c - j) s_j - sum_{j' > j} s_j', differentiates only
/// the pairs with j' > j; it is not the derivative of the objective and
/// makes the update order-dependent. Both share the same fixed points.
Vector di_gradient(const Matrix& satellites, std::size_t j);

struct DIIteration {
  std::size_t iteration = 0;
  double objective = 0.0;
  double centroid_norm = 0.0;
  double step = 0.0;
};

struct DIResult {
  Matrix satellites;  // c x d, every row of norm r_s
  double initial_objective = 0.0;
  double final_objective = 0.0;
  std::size_t iterations = 0;
  std::size_t rejected_steps = 0;
  std::size_t rerandomized = 0;
  bool converged = false;
  std::vector<DIIteration> trace;
};

/// Gradient projection on the radius-r_s sphere: synchronous ascent on all
/// satellites, then renormalization. A step that lowers the objective is
/// rejected and retried at half the step size.
DIResult train_di(std::size_t d, const TrainConfigDI& cfg);

/// train_di in the embedded space of y, with median thresholds fitted on y
/// and a single group spanning all satellites.
Constellation build_di_constellation(const Matrix& y, const TrainConfigDI& cfg, DIResult* details = nullptr);

/// iteration,E,centroid_norm
void write_di_trace_csv(std::ostream& out, const DIResult& result);

}  // namespace ghs
