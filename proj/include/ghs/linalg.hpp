#pragma once

// Dense linear algebra and order statistics used throughout the library.
// Everything here is a pure function of its inputs.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghs {

/// Row-major so a data point is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// All library failures surface as this exception type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool all_finite(const Matrix& a);

/// Median of a sample. Even-length samples return the mean of the two
/// middle order statistics. Throws Error("empty sample") on empty input.
double median(std::span<const double> values);
double median(const Vector& values);

struct EigenPairs {
  Vector values;   // non-increasing
  Matrix vectors;  // one eigenvector per column
};

/// Top-k eigenpairs of a symmetric matrix.
EigenPairs sym_eig_topk(const Matrix& a, std::size_t k);

struct Svd {
  Matrix u;
  Vector singular;  // non-negative, non-increasing
  Matrix v;
};

/// Thin SVD: a = u * diag(singular) * v^T.
Svd svd(const Matrix& a);

/// Full SVD for square inputs (u and v are square orthogonal).
Svd svd_full(const Matrix& a);

/// Real roots of a*x^2 + b*x + c, ascending. A slightly negative
/// discriminant (>= -1e-12*b^2) is clamped to zero. An empty result means
/// no real roots. Throws Error("degenerate") when a == b == 0.
std::vector<double> solve_quadratic(double a, double b, double c);

/// max |a^T a - I| over all entries.
double orthogonality_defect(const Matrix& a);

}  // namespace ghs
