#include "ghs/trainer_dd.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "ghs/parallel.hpp"

namespace ghs {

double default_rho(std::size_t bits) { return bits <= 16 ? 1.0 : 0.5; }

void TrainConfigDD::validate() const {
  if (bits < 2) throw Error("train_dd: need at least 2 bits");
  const double r = resolved_rho();
  if (!(r > 0.0 && r <= 1.0)) throw Error("train_dd: rho must lie in (0, 1]");
  if (!(r_s > 0.0)) throw Error("train_dd: r_s must be positive");
  if (!(ridge >= 0.0)) throw Error("train_dd: ridge must be non-negative");
}

Layout layout_for_dims(std::size_t bits, std::size_t dims) {
  if (dims < 1) throw Error("derive_dims: embedded dimension must be at least 1");
  Layout layout;
  layout.dims = dims;
  const std::size_t per_group = dims + 1;
  for (std::size_t start = 0; start < bits; start += per_group) {
    layout.groups.push_back(
        Group{static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(std::min(per_group, bits - start))});
  }
  return layout;
}

Layout derive_dims(std::size_t bits, double rho, std::size_t input_dim) {
  if (bits < 2) throw Error("derive_dims: need at least 2 bits");
  if (!(rho > 0.0 && rho <= 1.0)) throw Error("derive_dims: rho must lie in (0, 1]");
  const long wanted = std::lround(static_cast<double>(bits) / rho) - 1;
  const long d = std::min<long>(wanted, static_cast<long>(input_dim));
  if (d < 1) throw Error("derive_dims: embedded dimension below 1");
  return layout_for_dims(bits, static_cast<std::size_t>(d));
}

namespace {

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = gauss(rng);
  }
  return m;
}

Matrix random_orthogonal(std::size_t d, std::mt19937_64& rng) {
  return svd_full(gaussian_matrix(d, d, rng)).u;
}

}  // namespace

Matrix init_group(std::size_t d, std::size_t size, double r_s, std::mt19937_64& rng) {
  if (size > d + 1) throw Error("init_group: group larger than d+1");
  const Matrix gamma = random_orthogonal(d, rng);
  Matrix out(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(d));
  const std::size_t orthogonal_rows = std::min(size, d);
  for (std::size_t r = 0; r < orthogonal_rows; ++r) {
    out.row(static_cast<Eigen::Index>(r)) = gamma.col(static_cast<Eigen::Index>(r)).transpose() * r_s;
  }
  if (size == d + 1) {
    Eigen::RowVectorXd extra = gaussian_matrix(1, d, rng).row(0);
    out.row(static_cast<Eigen::Index>(d)) = extra * (r_s / extra.norm());
  }
  return out;
}

Matrix DDState::rotated_satellites() const {
  Matrix out(base.rows(), base.cols());
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto start = static_cast<Eigen::Index>(groups[k].start);
    const auto len = static_cast<Eigen::Index>(groups[k].len);
    out.middleRows(start, len).noalias() = base.middleRows(start, len) * rotations[k];
  }
  return out;
}

DDState init_state(const Matrix& y, const Layout& layout, double r_s, std::mt19937_64& rng) {
  const std::size_t d = layout.dims;
  if (static_cast<std::size_t>(y.cols()) != d) throw Error("init_state: data dimension differs from layout");
  std::size_t bits = 0;
  for (const Group& g : layout.groups) bits += g.len;

  DDState state;
  state.groups = layout.groups;
  state.base.resize(static_cast<Eigen::Index>(bits), static_cast<Eigen::Index>(d));
  for (const Group& g : layout.groups) {
    state.base.middleRows(g.start, g.len) = init_group(d, g.len, r_s, rng);
    state.rotations.push_back(random_orthogonal(d, rng));
  }
  state.alpha = Vector::Ones(static_cast<Eigen::Index>(bits));
  state.beta = Vector::Zero(static_cast<Eigen::Index>(bits));
  const Matrix dist = d2s(y, state.rotated_satellites());
  state.codes = encode_distances(dist, column_medians(dist));
  state.loss = loss_from_distances(dist, state.codes, state.alpha, state.beta);
  return state;
}

double loss_from_distances(const Matrix& distances, const CodeMatrix& codes, const Vector& alpha,
                           const Vector& beta) {
  const Eigen::Index c = distances.cols();
  Vector per_column(c);
  parallel_for(
      static_cast<std::size_t>(c),
      [&](std::size_t begin, std::size_t end) {
        for (auto j = static_cast<Eigen::Index>(begin); j < static_cast<Eigen::Index>(end); ++j) {
          double sum = 0.0;
          for (Eigen::Index i = 0; i < distances.rows(); ++i) {
            const double r = codes.code(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) + beta(j) -
                             alpha(j) * distances(i, j);
            sum += r * r;
          }
          per_column(j) = sum;
        }
      },
      1);
  double total = 0.0;
  for (Eigen::Index j = 0; j < c; ++j) total += per_column(j);
  return total;
}

double loss(const Matrix& y, const DDState& state) {
  return loss_from_distances(d2s(y, state.rotated_satellites()), state.codes, state.alpha, state.beta);
}

namespace {

Vector alpha_from_distances(const Matrix& dist, const CodeMatrix& codes, const Vector& beta,
                            const Vector& previous) {
  Vector alpha = previous;
  for (Eigen::Index j = 0; j < dist.cols(); ++j) {
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < dist.rows(); ++i) {
      num += (codes.code(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) + beta(j)) * dist(i, j);
      den += dist(i, j) * dist(i, j);
    }
    if (den > 0.0) alpha(j) = num / den;
  }
  return alpha;
}

Vector beta_from_distances(const Matrix& dist, const CodeMatrix& codes, const Vector& alpha) {
  Vector beta(dist.cols());
  const double n = static_cast<double>(dist.rows());
  for (Eigen::Index j = 0; j < dist.cols(); ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < dist.rows(); ++i) {
      sum += alpha(j) * dist(i, j) - codes.code(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    beta(j) = sum / n;
  }
  return beta;
}

}  // namespace

CodeMatrix update_B(const Matrix& y, const DDState& state) {
  const Matrix dist = d2s(y, state.rotated_satellites());
  return encode_distances(dist, column_medians(dist));
}

Vector update_alpha(const Matrix& y, const DDState& state) {
  return alpha_from_distances(d2s(y, state.rotated_satellites()), state.codes, state.beta, state.alpha);
}

Vector update_beta(const Matrix& y, const DDState& state) {
  return beta_from_distances(d2s(y, state.rotated_satellites()), state.codes, state.alpha);
}

GpsSolver::GpsSolver(const Matrix& anchors, double ridge) : anchors_(anchors), ridge_(ridge) {
  if (anchors.rows() < anchors.cols() + 1) throw Error("gps_solve: need at least d+1 anchors");
  sq_norms_ = anchors.rowwise().squaredNorm();
  gram_ = anchors.transpose() * anchors;
  anchor_sum_ = anchors.colwise().sum().transpose();
  anchor_sq_norms_ = anchors.transpose() * sq_norms_;
}

std::optional<Vector> GpsSolver::solve(const Vector& ranges, double r_s) const {
  const Eigen::Index n = anchors_.rows();
  const Eigen::Index d = anchors_.cols();
  if (ranges.size() != n) throw Error("gps_solve: range count differs from anchor count");

  // Augmented anchors ybar_i = [y_i, b_i] under the signature M = diag(1, .., 1, -1):
  //   <ybar_i, ybar_i> - 2 <ybar_i, sbar> + <sbar, sbar> = ||y_i - s||^2 - (b_i - tau)^2 = 0.
  // With Lambda = <sbar, sbar> and Z_i = ||y_i||^2 - b_i^2 this is linear in M sbar.
  const Vector sq_ranges = ranges.cwiseProduct(ranges);
  const Vector yt_b = anchors_.transpose() * ranges;
  const Vector yt_bb = anchors_.transpose() * sq_ranges;

  Eigen::MatrixXd normal(d + 1, d + 1);
  normal.topLeftCorner(d, d) = gram_;
  normal.topRightCorner(d, 1) = yt_b;
  normal.bottomLeftCorner(1, d) = yt_b.transpose();
  normal(d, d) = sq_ranges.sum();
  normal.diagonal().array() += ridge_;

  Vector rhs_z(d + 1);  // Ybar^T Z
  rhs_z.head(d) = anchor_sq_norms_ - yt_bb;
  rhs_z(d) = ranges.dot(sq_norms_) - ranges.dot(sq_ranges);
  Vector rhs_one(d + 1);  // Ybar^T 1
  rhs_one.head(d) = anchor_sum_;
  rhs_one(d) = ranges.sum();

  const Eigen::LDLT<Eigen::MatrixXd> factor(normal);
  if (factor.info() != Eigen::Success) throw Error("gps_solve: singular normal matrix");
  const Vector u = factor.solve(rhs_z);
  const Vector v = factor.solve(rhs_one);

  auto lorentz = [d](const Vector& a, const Vector& b) { return a.head(d).dot(b.head(d)) - a(d) * b(d); };
  // M sbar = (u + Lambda v) / 2 and Lambda = <sbar, sbar>.
  std::vector<double> roots;
  try {
    roots = solve_quadratic(lorentz(v, v), 2.0 * (lorentz(u, v) - 2.0), lorentz(u, u));
  } catch (const Error&) {
    return std::nullopt;
  }
  if (roots.empty()) return std::nullopt;

  std::optional<Vector> best;
  double best_gap = 0.0;
  for (double lambda : roots) {
    // The first d coordinates of sbar are unaffected by M.
    const Vector candidate = 0.5 * (u.head(d) + lambda * v.head(d));
    if (!candidate.allFinite()) continue;
    const double gap = std::abs(candidate.norm() - r_s);
    if (!best || gap < best_gap) {
      best = candidate;
      best_gap = gap;
    }
  }
  return best;
}

std::optional<Vector> gps_solve_satellite(const Matrix& y, const Vector& bprime, double r_s, double ridge) {
  return GpsSolver(y, ridge).solve(bprime, r_s);
}

Matrix procrustes_rotation(const Matrix& target, const Matrix& source) {
  if (target.rows() != source.rows() || target.cols() != source.cols()) {
    throw Error("procrustes_rotation: shape mismatch");
  }
  if (target.rows() < 1) throw Error("procrustes_rotation: empty input");
  // argmax tr(R^T S^T S'): with S^T S' = U Sigma V^T, R = U V^T.
  const Svd f = svd_full(source.transpose() * target);
  return f.u * f.v.transpose();
}

DDResult train_dd(const Matrix& y, const TrainConfigDD& cfg) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(y.rows());
  const std::size_t d = static_cast<std::size_t>(y.cols());
  if (n < d + 2) throw Error("train_dd: need at least d+2 points");
  if (!y.allFinite()) throw Error("train_dd: non-finite embedded data");

  const Layout layout = layout_for_dims(cfg.bits, d);
  const double epsilon = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-4 * static_cast<double>(n * cfg.bits);
  std::mt19937_64 rng(cfg.seed);
  DDState state = init_state(y, layout, cfg.r_s, rng);
  const GpsSolver gps(y, cfg.ridge);

  DDResult result;
  DDReport& report = result.report;
  report.initial_loss = state.loss;
  const auto c = static_cast<Eigen::Index>(cfg.bits);
  Matrix rotated = state.rotated_satellites();
  Matrix dist = d2s(y, rotated);
  double previous = state.loss;
  const auto start_time = clock::now();

  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    DDIteration row;
    row.iteration = it;

    state.codes = encode_distances(dist, column_medians(dist));
    row.loss_after_codes = loss_from_distances(dist, state.codes, state.alpha, state.beta);
    state.alpha = alpha_from_distances(dist, state.codes, state.beta, state.alpha);
    row.loss_after_alpha = loss_from_distances(dist, state.codes, state.alpha, state.beta);
    state.beta = beta_from_distances(dist, state.codes, state.alpha);
    row.loss_after_beta = loss_from_distances(dist, state.codes, state.alpha, state.beta);
    for (Eigen::Index j = 0; j < c; ++j) row.negative_alpha += state.alpha(j) < 0.0 ? 1 : 0;

    // Free satellite positions from the target distances B'_ij = (B_ij + beta_j) / alpha_j.
    Matrix free_positions = rotated;
    std::vector<char> fell_back(cfg.bits, 0);
    parallel_for(
        cfg.bits,
        [&](std::size_t begin, std::size_t end) {
          Vector ranges(static_cast<Eigen::Index>(n));
          for (std::size_t j = begin; j < end; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            if (state.alpha(jj) == 0.0) {
              fell_back[j] = 1;
              continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
              ranges(static_cast<Eigen::Index>(i)) = (state.codes.code(i, j) + state.beta(jj)) / state.alpha(jj);
            }
            if (auto pos = gps.solve(ranges, cfg.r_s)) {
              free_positions.row(jj) = pos->transpose();
            } else {
              fell_back[j] = 1;
            }
          }
        },
        1);
    for (char f : fell_back) row.gps_fallbacks += static_cast<std::size_t>(f);

    for (std::size_t k = 0; k < state.groups.size(); ++k) {
      const Group& g = state.groups[k];
      state.rotations[k] = procrustes_rotation(free_positions.middleRows(g.start, g.len), state.base.middleRows(g.start, g.len));
      row.max_rotation_defect = std::max(row.max_rotation_defect, orthogonality_defect(state.rotations[k]));
    }

    rotated = state.rotated_satellites();
    dist = d2s(y, rotated);
    state.loss = loss_from_distances(dist, state.codes, state.alpha, state.beta);
    row.loss = state.loss;
    row.seconds = std::chrono::duration<double>(clock::now() - start_time).count();
    report.gps_fallbacks += row.gps_fallbacks;
    report.trace.push_back(row);

    if (std::abs(previous - state.loss) < epsilon) {
      report.converged = true;
      break;
    }
    previous = state.loss;
  }

  Constellation& out = result.constellation;
  out.satellites = std::move(rotated);
  out.thresholds = column_medians(dist);
  out.groups = state.groups;
  out.r_s = cfg.r_s;
  out.rho = static_cast<double>(cfg.bits) / static_cast<double>(d + 1);
  out.validate();
  return result;
}

void write_dd_trace_csv(std::ostream& out, const DDReport& report) {
  out << "iteration,E,gps_fallbacks,wall_time\n";
  out << 0 << ',' << report.initial_loss << ',' << 0 << ',' << 0 << '\n';
  for (const DDIteration& row : report.trace) {
    out << row.iteration << ',' << row.loss << ',' << row.gps_fallbacks << ',' << row.seconds << '\n';
  }
}

}  // namespace ghs
