#include "ghs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <unordered_map>

#include "ghs/constellation.hpp"
#include "ghs/dataio.hpp"
#include "ghs/parallel.hpp"

namespace ghs {

GroundTruth build_ground_truth(const Matrix& base, const Matrix& queries, double fraction) {
  if (base.rows() == 0) throw Error("build_ground_truth: empty base");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("build_ground_truth: fraction must lie in (0, 1]");
  if (base.cols() != queries.cols()) throw Error("build_ground_truth: dimension mismatch");
  const auto n = static_cast<std::size_t>(base.rows());
  // The 1e-9 guard keeps products like 0.02 * 100 from rounding up to 3.
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)), 1, n);

  GroundTruth truth;
  truth.base_size = n;
  truth.neighbors.resize(static_cast<std::size_t>(queries.rows()));
  parallel_for(
      static_cast<std::size_t>(queries.rows()),
      [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, std::size_t>> scored(n);
        for (std::size_t q = begin; q < end; ++q) {
          const auto query = queries.row(static_cast<Eigen::Index>(q));
          for (std::size_t i = 0; i < n; ++i) {
            scored[i] = {(base.row(static_cast<Eigen::Index>(i)) - query).squaredNorm(), i};
          }
          std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
          auto& out = truth.neighbors[q];
          out.resize(k);
          for (std::size_t r = 0; r < k; ++r) out[r] = scored[r].second;
          std::sort(out.begin(), out.end());
        }
      },
      8);
  return truth;
}

GroundTruth build_label_ground_truth(std::span<const int> base_labels, std::span<const int> query_labels) {
  if (base_labels.empty()) throw Error("build_label_ground_truth: empty base");
  std::unordered_map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < base_labels.size(); ++i) members[base_labels[i]].push_back(i);
  GroundTruth truth;
  truth.base_size = base_labels.size();
  truth.neighbors.reserve(query_labels.size());
  for (int label : query_labels) {
    auto it = members.find(label);
    truth.neighbors.push_back(it == members.end() ? std::vector<std::size_t>{} : it->second);
  }
  return truth;
}

double average_precision(std::span<const std::size_t> ranking, std::span<const std::size_t> truth) {
  if (truth.empty()) return 0.0;
  std::vector<std::size_t> sorted(truth.begin(), truth.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t p = 0; p < ranking.size() && hits < sorted.size(); ++p) {
    if (std::binary_search(sorted.begin(), sorted.end(), ranking[p])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(sorted.size());
}

EvalReport evaluate(const CodeMatrix& base, const CodeMatrix& queries, const GroundTruth& truth,
                    std::size_t radius) {
  if (base.bits() != queries.bits()) throw Error("evaluate: inconsistent code lengths");
  if (truth.neighbors.size() != queries.rows()) throw Error("evaluate: ground truth count differs from queries");
  if (radius > base.bits()) throw Error("evaluate: radius exceeds code length");
  const std::size_t nq = queries.rows();
  const std::size_t n = base.rows();

  EvalReport report;
  report.radius = radius;
  report.bits = base.bits();
  report.base_size = n;
  report.average_precisions.assign(nq, 0.0);
  std::vector<double> precision(nq, 0.0);
  std::vector<double> recall(nq, 0.0);

  parallel_for(
      nq,
      [&](std::size_t begin, std::size_t end) {
        std::vector<char> is_true(n, 0);
        for (std::size_t q = begin; q < end; ++q) {
          const auto& gt = truth.neighbors[q];
          const auto ranking = rank_by_hamming(queries.row(q), base, n);
          report.average_precisions[q] = average_precision(ranking, gt);

          for (std::size_t i : gt) is_true[i] = 1;
          const auto retrieved = lookup_within_radius(queries.row(q), base, radius);
          std::size_t correct = 0;
          for (std::size_t i : retrieved) correct += is_true[i] ? 1 : 0;
          precision[q] = retrieved.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(retrieved.size());
          recall[q] = gt.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gt.size());
          for (std::size_t i : gt) is_true[i] = 0;
        }
      },
      4);

  for (std::size_t q = 0; q < nq; ++q) {
    report.map += report.average_precisions[q];
    report.precision += precision[q];
    report.recall += recall[q];
    if (truth.neighbors[q].empty()) ++report.empty_truth_queries;
  }
  if (nq > 0) {
    report.map /= static_cast<double>(nq);
    report.precision /= static_cast<double>(nq);
    report.recall /= static_cast<double>(nq);
  }
  const double pr = report.precision + report.recall;
  report.f1 = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  return report;
}

double affinity_loss_diagnostic(const Matrix& y, const CodeMatrix& codes) {
  if (static_cast<std::size_t>(y.rows()) != codes.rows()) throw Error("affinity_loss_diagnostic: row count mismatch");
  if (codes.rows() > kAffinityDiagnosticCap) throw Error("diagnostic capped at 5000");
  const std::size_t n = codes.rows();
  std::vector<double> per_row(n, 0.0);
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          double sum = 0.0;
          for (std::size_t k = i + 1; k < n; ++k) {
            const double dist2 = (y.row(static_cast<Eigen::Index>(i)) - y.row(static_cast<Eigen::Index>(k))).squaredNorm();
            sum += std::exp(-dist2) * static_cast<double>(hamming(codes.row(i), codes.row(k)));
          }
          per_row[i] = sum;
        }
      },
      16);
  double total = 0.0;
  for (double v : per_row) total += v;
  return total;
}

double max_code_correlation(const CodeMatrix& codes) {
  const std::size_t n = codes.rows();
  const std::size_t c = codes.bits();
  if (n == 0) return 0.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t k = j + 1; k < c; ++k) {
      long dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += codes.code(i, j) * codes.code(i, k);
      worst = std::max(worst, std::abs(static_cast<double>(dot)) / static_cast<double>(n));
    }
  }
  return worst;
}

double theorem1_test(std::size_t d, std::size_t n, double rs_factor, std::uint64_t seed) {
  if (d < 2) throw Error("theorem1_test: need d >= 2");
  if (n < 2) throw Error("theorem1_test: need n >= 2");
  if (!(rs_factor > 0.0)) throw Error("theorem1_test: rs_factor must be positive");
  const Matrix y = make_synthetic(SyntheticKind::uniform_ball, n, d, 1, seed).points;
  const Matrix satellites = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) * rs_factor;
  const Matrix dist = d2s(y, satellites);
  return max_code_correlation(encode_distances(dist, column_medians(dist)));
}

void write_report_csv_header(std::ostream& out) { out << "method,c,map,precision,recall,f1,radius,n,seed\n"; }

void write_report_csv_row(std::ostream& out, const ReportRow& row) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(10);
  out << row.method << ',' << row.report.bits << ',' << row.report.map << ',' << row.report.precision << ','
      << row.report.recall << ',' << row.report.f1 << ',' << row.report.radius << ',' << row.report.base_size << ','
      << row.seed << '\n';
  out.flags(flags);
  out.precision(prec);
}

}  // namespace ghs
