#include "ghs/lsh.hpp"

#include <random>

#include "ghs/parallel.hpp"

namespace ghs {

LshModel fit_lsh(const Matrix& x, std::size_t bits, std::uint64_t seed) {
  if (x.rows() < 1) throw Error("fit_lsh: empty input");
  if (bits < 1) throw Error("fit_lsh: need at least one bit");
  LshModel model;
  model.seed = seed;
  model.mean = x.colwise().mean().transpose();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  model.projection.resize(x.cols(), static_cast<Eigen::Index>(bits));
  for (Eigen::Index i = 0; i < model.projection.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.projection.cols(); ++j) model.projection(i, j) = gauss(rng);
  }
  return model;
}

CodeMatrix lsh_encode(const Matrix& x, const LshModel& model) {
  if (x.cols() != model.projection.rows()) throw Error("lsh_encode: dimension mismatch");
  const auto bits = static_cast<std::size_t>(model.projection.cols());
  CodeMatrix codes(static_cast<std::size_t>(x.rows()), bits);
  parallel_for(static_cast<std::size_t>(x.rows()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::RowVectorXd centered = x.row(static_cast<Eigen::Index>(i)) - model.mean.transpose();
      const Eigen::RowVectorXd proj = centered * model.projection;
      for (std::size_t j = 0; j < bits; ++j) codes.set_bit(i, j, proj(static_cast<Eigen::Index>(j)) >= 0.0);
    }
  });
  return codes;
}

}  // namespace ghs
