#include "ghs/trainer_di.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "ghs/trainer_dd.hpp"

namespace ghs {

void TrainConfigDI::validate() const {
  if (bits < 2) throw Error("train_di: need at least 2 bits");
  if (!(r_s > 0.0)) throw Error("train_di: r_s must be positive");
  if (step < 0.0) throw Error("train_di: step must be positive");
  if (rho < 0.0 || rho > 1.0) throw Error("train_di: rho must lie in (0, 1]");
}

double di_objective(const Matrix& satellites) {
  // sum_{j<j'} ||s_j - s_j'||^2 = c * sum_j ||s_j||^2 - ||sum_j s_j||^2
  const double c = static_cast<double>(satellites.rows());
  return c * satellites.squaredNorm() - satellites.colwise().sum().squaredNorm();
}

Vector di_gradient(const Matrix& satellites, std::size_t j) {
  if (j >= static_cast<std::size_t>(satellites.rows())) throw Error("di_gradient: index out of range");
  const auto jj = static_cast<Eigen::Index>(j);
  const double c = static_cast<double>(satellites.rows());
  // (c-1) s_j - sum_{j' != j} s_j' = c s_j - sum_j' s_j'
  return (c * satellites.row(jj) - satellites.colwise().sum()).transpose();
}

namespace {

Eigen::RowVectorXd random_direction(std::size_t d, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::RowVectorXd v(static_cast<Eigen::Index>(d));
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = gauss(rng);
    norm = v.norm();
  }
  return v * (radius / norm);
}

}  // namespace

DIResult train_di(std::size_t d, const TrainConfigDI& cfg) {
  cfg.validate();
  if (d < 1) throw Error("train_di: dimension must be at least 1");
  const std::size_t c = cfg.bits;
  std::mt19937_64 rng(cfg.seed);

  DIResult result;
  Matrix s(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < s.rows(); ++j) s.row(j) = random_direction(d, cfg.r_s, rng);
  if (d == 1) {
    // The 1-sphere is {-r_s, r_s}; gradient steps cannot move a point
    // between them, so start from the balanced split, which is optimal.
    for (Eigen::Index j = 0; j < s.rows(); ++j) s(j, 0) = j % 2 ? -cfg.r_s : cfg.r_s;
  }

  double objective = di_objective(s);
  result.initial_objective = objective;
  const double base_step = cfg.step > 0.0 ? cfg.step : 0.01 / static_cast<double>(c);
  const double max_step = base_step * 1e6;
  double step = base_step;

  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    result.iterations = it;
    // Synchronous (Jacobi) ascent: every gradient reads the previous S.
    const Eigen::RowVectorXd total = s.colwise().sum();
    Matrix next = s + step * ((static_cast<double>(c) * s).rowwise() - total);
    for (Eigen::Index j = 0; j < next.rows(); ++j) {
      const double norm = next.row(j).norm();
      if (norm == 0.0 || !std::isfinite(norm)) {
        next.row(j) = random_direction(d, cfg.r_s, rng);
        ++result.rerandomized;
      } else {
        next.row(j) *= cfg.r_s / norm;
      }
    }

    const double candidate = di_objective(next);
    if (candidate < objective) {
      ++result.rejected_steps;
      if (objective - candidate <= 1e-14 * std::abs(objective)) {
        result.converged = true;  // only rounding left to gain
        break;
      }
      step *= 0.5;
      continue;
    }

    const double change = (candidate - objective) / std::max(std::abs(objective), 1e-300);
    s = std::move(next);
    objective = candidate;
    result.trace.push_back(
        DIIteration{it, objective, (s.colwise().sum() / static_cast<double>(c)).norm(), step});
    if (change <= cfg.tol) {
      result.converged = true;
      break;
    }
    // Accepted steps grow the step again so the late, slow phase of the
    // centroid contraction does not stall at the base step.
    step = std::min(2.0 * step, max_step);
  }

  result.final_objective = objective;
  result.satellites = std::move(s);
  return result;
}

Constellation build_di_constellation(const Matrix& y, const TrainConfigDI& cfg, DIResult* details) {
  const std::size_t d = static_cast<std::size_t>(y.cols());
  DIResult trained = train_di(d, cfg);
  Constellation out;
  out.thresholds = fit_thresholds(y, trained.satellites);
  out.satellites = trained.satellites;
  if (cfg.bits <= d + 1) {
    out.groups = {Group{0, static_cast<std::uint32_t>(cfg.bits)}};
  } else {
    out.groups = layout_for_dims(cfg.bits, d).groups;
  }
  out.r_s = cfg.r_s;
  out.rho = static_cast<double>(cfg.bits) / static_cast<double>(d + 1);
  out.validate();
  if (details) *details = std::move(trained);
  return out;
}

void write_di_trace_csv(std::ostream& out, const DIResult& result) {
  out << "iteration,E,centroid_norm\n";
  for (const DIIteration& row : result.trace) {
    out << row.iteration << ',' << row.objective << ',' << row.centroid_norm << '\n';
  }
}

}  // namespace ghs
