#pragma once

#include <cstdint>
#include <span>

#include "ghs/linalg.hpp"

namespace ghs {

enum class EmbeddingKind : std::uint8_t { pca = 0, cca = 1, lsh = 2 };

const char* to_string(EmbeddingKind kind);

/// Affine map from D-dim descriptors to the d-dim embedded space:
/// y = ((x - mean) * projection) / scale.
struct EmbeddingModel {
  EmbeddingKind kind = EmbeddingKind::pca;
  Vector mean;        // D
  Matrix projection;  // D x d
  double scale = 1.0;
  /// Fit-time eigenvalues (pca) or canonical correlations (cca). Not serialized.
  Vector spectrum;

  std::size_t input_dim() const { return static_cast<std::size_t>(projection.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(projection.cols()); }
};

/// Rows are label indicator vectors in {0,1}^l.
using LabelMatrix = Matrix;

LabelMatrix one_hot(std::span<const int> labels);

/// Zero-centers X and projects onto the top-d covariance eigenvectors.
/// Each eigenvector's largest-magnitude entry is made positive so fits are
/// reproducible. scale is the largest embedded norm over X.
EmbeddingModel fit_pca(const Matrix& x, std::size_t d);

/// Supervised projection: the top-d solutions of
///   X^T Z (Z^T Z + reg I)^{-1} Z^T X w = lambda^2 (X^T X + reg I) w
/// on zero-centered X, each w_k scaled by lambda_k. The generalized problem
/// is reduced to a standard symmetric one through the Cholesky factor of
/// X^T X + reg I.
EmbeddingModel fit_cca(const Matrix& x, const LabelMatrix& z, std::size_t d, double reg = 1e-4);

Matrix embed(const EmbeddingModel& model, const Matrix& x);

}  // namespace ghs
