#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "ghs/linalg.hpp"

namespace ghs::test {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

// Haar-ish orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(std::size_t d, std::mt19937_64& rng) {
  Matrix g = gaussian_matrix(d, d, rng);
  Matrix q(g.rows(), g.cols());
  for (Eigen::Index k = 0; k < g.cols(); ++k) {
    Eigen::VectorXd v = g.col(k);
    for (Eigen::Index j = 0; j < k; ++j) v -= q.col(j).dot(v) * q.col(j);
    q.col(k) = v / v.norm();
  }
  return q;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("ghs_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace ghs::test
