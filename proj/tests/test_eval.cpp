#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "ghs/codes.hpp"
#include "ghs/eval.hpp"
#include "support.hpp"

using namespace ghs;

namespace {

CodeMatrix random_codes(std::size_t n, std::size_t c, std::mt19937_64& rng) {
  CodeMatrix m(n, c);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set_bit(i, j, coin(rng));
  return m;
}

double ap_oracle(const std::vector<std::size_t>& ranking, const std::vector<std::size_t>& truth) {
  if (truth.empty()) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < ranking.size(); ++p) {
    bool is_true = false;
    for (std::size_t t : truth) is_true = is_true || t == ranking[p];
    if (is_true) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(truth.size());
}

}  // namespace

TEST_CASE("ground truth examples") {
  std::mt19937_64 rng(1);
  Matrix base = test::gaussian_matrix(100, 3, rng);
  Matrix q = test::gaussian_matrix(5, 3, rng);
  q.row(2) = base.row(17);
  auto gt = build_ground_truth(base, q);
  for (const auto& row : gt.neighbors) CHECK(row.size() == 2);
  CHECK(std::find(gt.neighbors[2].begin(), gt.neighbors[2].end(), 17) != gt.neighbors[2].end());

  Matrix big = test::gaussian_matrix(500, 4, rng);
  Matrix qq = test::gaussian_matrix(10, 4, rng);
  auto g2 = build_ground_truth(big, qq);
  for (Eigen::Index k = 0; k < 10; ++k) {
    std::vector<std::size_t> order(500);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return (big.row(a) - qq.row(k)).norm() < (big.row(b) - qq.row(k)).norm();
    });
    std::vector<std::size_t> expect(order.begin(), order.begin() + 10);
    std::sort(expect.begin(), expect.end());
    CHECK(g2.neighbors[static_cast<std::size_t>(k)] == expect);
  }

  // ties at the cutoff go to the lower index
  Matrix flat = Matrix::Zero(50, 2);
  auto tied = build_ground_truth(flat, Matrix::Zero(1, 2));
  CHECK(tied.neighbors[0] == std::vector<std::size_t>{0});

  CHECK_THROWS_AS(build_ground_truth(Matrix::Zero(0, 2), q.leftCols(2)), Error);
  CHECK_THROWS_AS(build_ground_truth(base, q, 0.0), Error);
}

TEST_CASE("label ground truth") {
  std::vector<int> base{0, 1, 0, 2};
  std::vector<int> q{0, 3};
  auto gt = build_label_ground_truth(base, q);
  CHECK(gt.neighbors[0] == std::vector<std::size_t>{0, 2});
  CHECK(gt.neighbors[1].empty());
}

TEST_CASE("average precision examples") {
  std::vector<std::size_t> ranking{3, 1, 0, 2, 4, 5, 6, 7, 8, 9};
  CHECK(average_precision(ranking, std::vector<std::size_t>{3, 1}) == 1.0);
  CHECK(average_precision(ranking, std::vector<std::size_t>{1}) == 0.5);
  CHECK(average_precision(ranking, std::vector<std::size_t>{}) == 0.0);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::size_t> r(40);
    std::iota(r.begin(), r.end(), std::size_t{0});
    std::shuffle(r.begin(), r.end(), rng);
    std::vector<std::size_t> truth(r.begin(), r.begin() + 40);
    std::shuffle(truth.begin(), truth.end(), rng);
    truth.resize(1 + rng() % 10);
    const double ap = average_precision(r, truth);
    CHECK(std::abs(ap - ap_oracle(r, truth)) <= 1e-12);
    CHECK(ap >= 0.0);
    CHECK(ap <= 1.0);
  }
}

TEST_CASE("evaluate examples") {
  // Codes that reproduce the truth ordering exactly.
  CodeMatrix base(10, 8);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < std::min<std::size_t>(i, 8); ++j) base.set_bit(i, j, true);
  CodeMatrix q(1, 8);
  GroundTruth gt;
  gt.base_size = 10;
  gt.neighbors = {{0, 1, 2}};
  auto perfect = evaluate(base, q, gt, 2);
  CHECK(perfect.map == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  std::mt19937_64 rng(3);
  CodeMatrix b = random_codes(200, 16, rng);
  CodeMatrix qq = random_codes(20, 16, rng);
  Matrix bx = test::gaussian_matrix(200, 5, rng);
  Matrix qx = test::gaussian_matrix(20, 5, rng);
  auto truth = build_ground_truth(bx, qx);
  auto everything = evaluate(b, qq, truth, 16);
  CHECK(everything.recall == 1.0);
  CHECK(everything.precision == doctest::Approx(4.0 / 200.0));

  double prev = -1;
  for (std::size_t r = 0; r <= 16; ++r) {
    auto rep = evaluate(b, qq, truth, r);
    CHECK(rep.recall >= prev);
    prev = rep.recall;
    double mean_ap = 0;
    for (double ap : rep.average_precisions) mean_ap += ap;
    CHECK(rep.map == doctest::Approx(mean_ap / 20.0));
    if (rep.precision + rep.recall == 0.0) CHECK(rep.f1 == 0.0);
  }

  CHECK_THROWS_AS(evaluate(b, random_codes(2, 8, rng), truth, 2), Error);
}

TEST_CASE("MAP is invariant under consistent base relabeling") {
  // Rows at distinct Hamming distances, so the index tie-break never applies.
  CodeMatrix base(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < i; ++j) base.set_bit(i, j, true);
  CodeMatrix q(1, 8);
  GroundTruth truth;
  truth.base_size = 8;
  truth.neighbors = {{1, 4, 6}};

  const std::vector<std::size_t> perm{5, 2, 7, 0, 3, 1, 6, 4};  // old row i -> perm[i]
  CodeMatrix moved(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) moved.set_bit(perm[i], j, base.bit(i, j));
  GroundTruth moved_truth = truth;
  for (auto& idx : moved_truth.neighbors[0]) idx = perm[idx];
  std::sort(moved_truth.neighbors[0].begin(), moved_truth.neighbors[0].end());

  const auto a = evaluate(base, q, truth, 2);
  const auto b = evaluate(moved, q, moved_truth, 2);
  CHECK(a.map == doctest::Approx(b.map));
  CHECK(a.precision == doctest::Approx(b.precision));
  CHECK(a.recall == doctest::Approx(b.recall));
}

TEST_CASE("affinity diagnostic") {
  std::mt19937_64 rng(5);
  Matrix y = test::gaussian_matrix(50, 3, rng);
  CodeMatrix same(50, 8);
  CHECK(affinity_loss_diagnostic(y, same) == 0.0);

  CodeMatrix codes = random_codes(50, 8, rng);
  double oracle = 0.0;
  for (Eigen::Index i = 0; i < 50; ++i)
    for (Eigen::Index k = i + 1; k < 50; ++k)
      oracle += std::exp(-(y.row(i) - y.row(k)).squaredNorm()) *
                static_cast<double>(hamming(codes.row(static_cast<std::size_t>(i)), codes.row(static_cast<std::size_t>(k))));
  CHECK(affinity_loss_diagnostic(y, codes) == doctest::Approx(oracle).epsilon(1e-12));

  // flipping a whole column leaves every pairwise distance unchanged
  CodeMatrix flipped = codes;
  for (std::size_t i = 0; i < 50; ++i) flipped.set_bit(i, 3, !codes.bit(i, 3));
  CHECK(affinity_loss_diagnostic(y, flipped) == doctest::Approx(affinity_loss_diagnostic(y, codes)));

  // two far clusters: only within-cluster disagreements count
  Matrix two(4, 1);
  two << 0, 0.1, 100, 100.1;
  CodeMatrix c2(4, 2);
  c2.set_bit(1, 0, true);
  c2.set_bit(2, 1, true);
  const double within = std::exp(-0.01) * 1 + std::exp(-0.01) * 1;
  CHECK(affinity_loss_diagnostic(two, c2) == doctest::Approx(within));

  CHECK_THROWS_WITH_AS(affinity_loss_diagnostic(Matrix::Zero(5001, 1), CodeMatrix(5001, 4)),
                       "diagnostic capped at 5000", Error);
}

TEST_CASE("theorem1_test far field vs near field") {
  const double far = theorem1_test(2, 20000, 100.0, 7);
  const double near = theorem1_test(2, 20000, 1.0, 7);
  CHECK(far <= 0.02);
  CHECK(near > far);
}

TEST_CASE("report csv") {
  EvalReport r;
  r.map = 0.5;
  r.bits = 32;
  r.base_size = 100;
  std::ostringstream out;
  write_report_csv_header(out);
  write_report_csv_row(out, ReportRow{"dd", r, 3});
  CHECK(out.str() == "method,c,map,precision,recall,f1,radius,n,seed\ndd,32,0.5,0,0,0,2,100,3\n");
}
