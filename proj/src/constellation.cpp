#include "ghs/constellation.hpp"

#include <cmath>

#include "ghs/parallel.hpp"

namespace ghs {

void Constellation::validate() const {
  if (satellites.rows() < 1 || satellites.cols() < 1) throw Error("constellation: empty satellite matrix");
  if (thresholds.size() != satellites.rows()) throw Error("constellation: threshold count differs from c");
  if (!thresholds.allFinite() || !satellites.allFinite()) throw Error("constellation: non-finite entries");
  std::size_t covered = 0;
  for (const Group& g : groups) {
    if (g.start != covered) throw Error("constellation: groups are not contiguous");
    if (g.len == 0 || g.len > dim() + 1) throw Error("constellation: group size out of range");
    covered += g.len;
  }
  if (covered != bits()) throw Error("constellation: group lengths do not sum to c");
}

Matrix d2s(const Matrix& y, const Matrix& satellites) {
  if (y.cols() != satellites.cols()) throw Error("d2s: dimension mismatch");
  const Eigen::Index n = y.rows();
  const Eigen::Index c = satellites.rows();
  Matrix out(n, c);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (auto i = static_cast<Eigen::Index>(begin); i < static_cast<Eigen::Index>(end); ++i) {
      for (Eigen::Index j = 0; j < c; ++j) out(i, j) = (y.row(i) - satellites.row(j)).norm();
    }
  });
  return out;
}

Vector column_medians(const Matrix& distances) {
  const Eigen::Index c = distances.cols();
  Vector out(c);
  parallel_for(
      static_cast<std::size_t>(c),
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> column(static_cast<std::size_t>(distances.rows()));
        for (auto j = static_cast<Eigen::Index>(begin); j < static_cast<Eigen::Index>(end); ++j) {
          for (Eigen::Index i = 0; i < distances.rows(); ++i) column[static_cast<std::size_t>(i)] = distances(i, j);
          out(j) = median(column);
        }
      },
      1);
  return out;
}

Vector fit_thresholds(const Matrix& y, const Matrix& satellites) {
  if (y.rows() < 2) throw Error("fit_thresholds: need at least two points");
  return column_medians(d2s(y, satellites));
}

CodeMatrix encode_distances(const Matrix& distances, const Vector& thresholds) {
  if (thresholds.size() != distances.cols()) throw Error("encode: threshold count mismatch");
  CodeMatrix codes(static_cast<std::size_t>(distances.rows()), static_cast<std::size_t>(distances.cols()));
  parallel_for(static_cast<std::size_t>(distances.rows()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (Eigen::Index j = 0; j < distances.cols(); ++j) {
        if (distances(static_cast<Eigen::Index>(i), j) > thresholds(j)) codes.set_bit(i, static_cast<std::size_t>(j), true);
      }
    }
  });
  return codes;
}

CodeMatrix encode(const Matrix& y, const Constellation& model) {
  if (static_cast<std::size_t>(y.cols()) != model.dim()) throw Error("encode: dimension mismatch");
  return encode_distances(d2s(y, model.satellites), model.thresholds);
}

}  // namespace ghs
