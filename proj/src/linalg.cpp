#include "ghs/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ghs {

bool all_finite(const Matrix& a) { return a.allFinite(); }

double median(std::span<const double> values) {
  if (values.empty()) throw Error("empty sample");
  std::vector<double> work(values.begin(), values.end());
  const std::size_t mid = work.size() / 2;
  std::nth_element(work.begin(), work.begin() + mid, work.end());
  const double upper = work[mid];
  if (work.size() % 2 == 1) return upper;
  const double lower = *std::max_element(work.begin(), work.begin() + mid);
  return 0.5 * (lower + upper);
}

double median(const Vector& values) {
  return median(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

EigenPairs sym_eig_topk(const Matrix& a, std::size_t k) {
  if (a.rows() != a.cols()) throw Error("sym_eig_topk: matrix is not square");
  const auto dim = static_cast<std::size_t>(a.rows());
  if (k > dim) throw Error("sym_eig_topk: k exceeds matrix dimension");
  if (!a.allFinite()) throw Error("sym_eig_topk: non-finite entry");
  const double magnitude = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * magnitude) {
    throw Error("sym_eig_topk: matrix is not symmetric");
  }

  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("sym_eig_topk: eigensolver failed");

  EigenPairs out;
  out.values.resize(static_cast<Eigen::Index>(k));
  out.vectors.resize(a.rows(), static_cast<Eigen::Index>(k));
  // Eigen returns ascending order.
  for (std::size_t i = 0; i < k; ++i) {
    const auto src = static_cast<Eigen::Index>(dim - 1 - i);
    out.values(static_cast<Eigen::Index>(i)) = solver.eigenvalues()(src);
    out.vectors.col(static_cast<Eigen::Index>(i)) = solver.eigenvectors().col(src);
  }
  return out;
}

namespace {

Svd run_svd(const Matrix& a, unsigned options) {
  if (!a.allFinite()) throw Error("svd: non-finite entry");
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(a, options);
  return Svd{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

}  // namespace

Svd svd(const Matrix& a) { return run_svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV); }

Svd svd_full(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("svd_full: matrix is not square");
  return run_svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

std::vector<double> solve_quadratic(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) throw Error("degenerate");
    return {-c / b};
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    if (disc < -1e-12 * b * b) return {};
    disc = 0.0;
  }
  if (disc == 0.0) return {-b / (2.0 * a)};

  // Avoid cancellation: compute the larger-magnitude root first.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : -r1;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

double orthogonality_defect(const Matrix& a) {
  const Eigen::MatrixXd gram = a.transpose() * a;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace ghs
