#include "ghs/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "ghs/parallel.hpp"

namespace ghs {

const char* to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::pca: return "pca";
    case EmbeddingKind::cca: return "cca";
    case EmbeddingKind::lsh: return "lsh";
  }
  return "unknown";
}

LabelMatrix one_hot(std::span<const int> labels) {
  int classes = 0;
  for (int label : labels) {
    if (label < 0) throw Error("one_hot: negative label");
    classes = std::max(classes, label + 1);
  }
  LabelMatrix z = LabelMatrix::Zero(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) z(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  return z;
}

namespace {

void fix_signs(Matrix& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    Eigen::Index arg = 0;
    vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, k) < 0.0) vectors.col(k) *= -1.0;
  }
}

double max_row_norm(const Matrix& y) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) best = std::max(best, y.row(i).norm());
  return best;
}

Matrix centered(const Matrix& x, const Vector& mean) {
  return x.rowwise() - mean.transpose();
}

}  // namespace

EmbeddingModel fit_pca(const Matrix& x, std::size_t d) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto dim = static_cast<std::size_t>(x.cols());
  if (n < 2) throw Error("fit_pca: need at least two points");
  if (d < 1 || d > std::min(dim, n - 1)) throw Error("fit_pca: d out of range");
  if (!x.allFinite()) throw Error("fit_pca: non-finite entry");

  EmbeddingModel model;
  model.kind = EmbeddingKind::pca;
  model.mean = x.colwise().mean().transpose();
  const Matrix xc = centered(x, model.mean);
  const Matrix cov = (xc.transpose() * xc) / static_cast<double>(n - 1);
  if (cov.trace() <= 0.0) throw Error("degenerate covariance");

  EigenPairs pairs = sym_eig_topk(cov, d);
  fix_signs(pairs.vectors);
  model.projection = std::move(pairs.vectors);
  model.spectrum = std::move(pairs.values);

  const double scale = max_row_norm(xc * model.projection);
  if (!(scale > 0.0)) throw Error("degenerate covariance");
  model.scale = scale;
  return model;
}

EmbeddingModel fit_cca(const Matrix& x, const LabelMatrix& z, std::size_t d, double reg) {
  if (x.rows() != z.rows()) throw Error("fit_cca: data and label row counts differ");
  if (x.rows() < 2) throw Error("fit_cca: need at least two points");
  if (!(reg > 0.0)) throw Error("fit_cca: regularizer must be positive");
  const auto dim = static_cast<std::size_t>(x.cols());
  const auto labels = static_cast<std::size_t>(z.cols());
  if (d < 1 || d > dim) throw Error("fit_cca: d out of range");
  if (d > labels) throw Error("label space too small");

  EmbeddingModel model;
  model.kind = EmbeddingKind::cca;
  model.mean = x.colwise().mean().transpose();
  const Matrix xc = centered(x, model.mean);

  const Eigen::MatrixXd xz = xc.transpose() * z;
  Eigen::MatrixXd zz = z.transpose() * z;
  zz.diagonal().array() += reg;
  Eigen::MatrixXd xx = xc.transpose() * xc;
  xx.diagonal().array() += reg;

  // lhs = X^T Z (Z^T Z + reg I)^{-1} Z^T X
  const Eigen::LLT<Eigen::MatrixXd> zz_chol(zz);
  const Eigen::MatrixXd lhs = xz * zz_chol.solve(xz.transpose());

  // With xx = L L^T the problem becomes L^{-1} lhs L^{-T} v = lambda^2 v, w = L^{-T} v.
  const Eigen::LLT<Eigen::MatrixXd> xx_chol(xx);
  if (xx_chol.info() != Eigen::Success) throw Error("fit_cca: covariance factorization failed");
  const auto lower = xx_chol.matrixL();
  Eigen::MatrixXd reduced = lower.solve(lower.solve(lhs).transpose());
  reduced = 0.5 * (reduced + reduced.transpose());

  EigenPairs pairs = sym_eig_topk(reduced, d);
  Matrix w = xx_chol.matrixU().solve(Eigen::MatrixXd(pairs.vectors));
  model.spectrum.resize(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    const double corr = std::sqrt(std::max(0.0, pairs.values(k)));
    model.spectrum(k) = corr;
    w.col(k) *= corr;
  }
  fix_signs(w);
  model.projection = std::move(w);

  const double scale = max_row_norm(xc * model.projection);
  if (!(scale > 0.0)) throw Error("fit_cca: embedded data is degenerate");
  model.scale = scale;
  return model;
}

Matrix embed(const EmbeddingModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
    throw Error("embed: expected " + std::to_string(model.input_dim()) + " columns, got " +
                std::to_string(x.cols()));
  }
  Matrix y(x.rows(), model.projection.cols());
  const double inv_scale = 1.0 / model.scale;
  parallel_for(static_cast<std::size_t>(x.rows()), [&](std::size_t begin, std::size_t end) {
    const auto b = static_cast<Eigen::Index>(begin);
    const auto len = static_cast<Eigen::Index>(end - begin);
    y.middleRows(b, len).noalias() =
        ((x.middleRows(b, len).rowwise() - model.mean.transpose()) * model.projection) * inv_scale;
  });
  return y;
}

}  // namespace ghs
