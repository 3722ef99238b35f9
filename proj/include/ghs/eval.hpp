#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ghs/codes.hpp"
#include "ghs/linalg.hpp"

namespace ghs {

/// True neighbors per query, each list sorted ascending.
struct GroundTruth {
  std::vector<std::vector<std::size_t>> neighbors;
  std::size_t base_size = 0;
};

/// Per query, the ceil(fraction * n) base rows nearest in Euclidean distance
/// (raw descriptor space), ties at the cutoff going to the lower index.
GroundTruth build_ground_truth(const Matrix& base, const Matrix& queries, double fraction = 0.02);

/// Per query, every base row sharing the query's label.
GroundTruth build_label_ground_truth(std::span<const int> base_labels, std::span<const int> query_labels);

/// Mean of precision@p over the positions p of true items in the ranking,
/// divided by |truth|. Zero when truth is empty.
double average_precision(std::span<const std::size_t> ranking, std::span<const std::size_t> truth);

struct EvalReport {
  double map = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<double> average_precisions;
  std::size_t radius = 2;
  std::size_t bits = 0;
  std::size_t base_size = 0;
  std::size_t empty_truth_queries = 0;
};

/// MAP over full Hamming rankings plus hash-lookup precision / recall at the
/// radius. Precision and recall are macro-averaged over queries (an empty
/// lookup scores precision 0); F1 is taken from the two averages.
EvalReport evaluate(const CodeMatrix& base, const CodeMatrix& queries, const GroundTruth& truth,
                    std::size_t radius = 2);

/// sum_{i<i'} exp(-||y_i - y_i'||^2) * hamming(b_i, b_i'). Quadratic cost,
/// so inputs are capped at 5000 rows.
double affinity_loss_diagnostic(const Matrix& y, const CodeMatrix& codes);

inline constexpr std::size_t kAffinityDiagnosticCap = 5000;

/// Monte-Carlo check of the far-field decorrelation property: n points
/// uniform in the unit d-ball, d mutually orthogonal satellites at radius
/// rs_factor, median thresholds. Returns max_{j != j'} |h_j . h_j'| / n.
double theorem1_test(std::size_t d, std::size_t n, double rs_factor, std::uint64_t seed = 1);

/// Same statistic on given data and satellites.
double max_code_correlation(const CodeMatrix& codes);

struct ReportRow {
  std::string method;
  EvalReport report;
  std::uint64_t seed = 0;
};

/// method,c,map,precision,recall,f1,radius,n,seed
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const ReportRow& row);

}  // namespace ghs
