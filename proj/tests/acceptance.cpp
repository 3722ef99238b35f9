// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ghs/codes.hpp"
#include "ghs/constellation.hpp"
#include "ghs/dataio.hpp"
#include "ghs/embedding.hpp"
#include "ghs/eval.hpp"
#include "ghs/lsh.hpp"
#include "ghs/model.hpp"
#include "ghs/pipeline.hpp"
#include "ghs/trainer_dd.hpp"
#include "ghs/trainer_di.hpp"
#include "support.hpp"

using namespace ghs;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const std::function<Outcome()>& body) {
  Outcome out;
  const auto t0 = clock_type::now();
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++failures;
  std::printf("%s %s: %s [%s] (%.2fs)\n", id, out.pass ? "PASS" : "FAIL", title, out.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

// ---- shared retrieval setup (A5, A6, A8, A12) ----

constexpr std::size_t kSeeds = 3;
constexpr std::size_t kPoints = 10000;
constexpr std::size_t kDim = 64;
constexpr std::size_t kClusters = 10;
constexpr std::size_t kQueries = 500;

struct Workload {
  Split parts;
  std::vector<int> train_labels;
  std::vector<int> query_labels;
  GroundTruth truth;
};

std::vector<Workload>& workloads() {
  static std::vector<Workload> all = [] {
    std::vector<Workload> out;
    for (std::size_t s = 0; s < kSeeds; ++s) {
      const auto data = make_synthetic(SyntheticKind::gaussian_clusters, kPoints, kDim, kClusters, 100 + s);
      Workload w;
      w.parts = split(data.points, kQueries, s);
      w.train_labels = gather(data.labels, w.parts.train_index);
      w.query_labels = gather(data.labels, w.parts.query_index);
      w.truth = build_ground_truth(w.parts.train, w.parts.queries, 0.02);
      out.push_back(std::move(w));
    }
    return out;
  }();
  return all;
}

struct Run {
  double map = 0.0;
  TrainOutcome outcome;
};

Run run_on(const Workload& w, const TrainOptions& options, const GroundTruth* truth = nullptr) {
  Run r;
  r.outcome = train_model(w.parts.train, options, &w.train_labels);
  const CodeMatrix base = hash_vectors(r.outcome.model, w.parts.train);
  const CodeMatrix queries = hash_vectors(r.outcome.model, w.parts.queries);
  r.map = evaluate(base, queries, truth ? *truth : w.truth, 2).map;
  return r;
}

TrainOptions options_for(Method m, std::size_t seed) {
  TrainOptions o;
  o.method = m;
  o.bits = 32;
  o.seed = seed;
  return o;
}

std::vector<Run>& dd_runs() {
  static std::vector<Run> runs = [] {
    std::vector<Run> out;
    for (std::size_t s = 0; s < kSeeds; ++s) out.push_back(run_on(workloads()[s], options_for(Method::dd, s)));
    return out;
  }();
  return runs;
}

// ---- criteria ----

Outcome a1_gps() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::size_t missing = 0;
  const auto t0 = clock_type::now();
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 2 + static_cast<std::size_t>(t % 15);
    const Matrix y = test::gaussian_matrix(d + 5, d, rng);
    const Vector p = test::gaussian_matrix(d, 1, rng).col(0);
    Vector b(y.rows());
    for (Eigen::Index i = 0; i < y.rows(); ++i) b(i) = (y.row(i).transpose() - p).norm();
    const auto got = gps_solve_satellite(y, b, p.norm(), 1e-10);
    if (!got) {
      ++missing;
      continue;
    }
    worst = std::max(worst, (*got - p).norm());
  }
  const double elapsed = seconds_since(t0);
  return {missing == 0 && worst <= 1e-6 && elapsed < 1.0,
          fmt("max error %.3g over 200 plants, %g unsolved, %.3fs", worst, static_cast<double>(missing), elapsed)};
}

Outcome a2_procrustes() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 2 + static_cast<std::size_t>(t % 15);
    const Matrix s = test::gaussian_matrix(d + 1 + static_cast<std::size_t>(t % 3), d, rng);
    const Matrix q = test::random_orthogonal(d, rng);
    worst = std::max(worst, (procrustes_rotation(s * q, s) - q).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8, fmt("max |R - Q| = %.3g over 100 plants", worst)};
}

Outcome a3_balance() {
  const auto data = make_synthetic(SyntheticKind::gaussian_clusters, 4000, kDim, kClusters, 33);
  long worst_excess = 0;
  std::size_t models = 0;
  for (Method m : {Method::dd, Method::di}) {
    for (std::size_t c : {8, 16, 32}) {
      TrainOptions o;
      o.method = m;
      o.bits = c;
      o.seed = c;
      const auto out = train_model(data.points, o);
      const Matrix y = embed(out.model.embedding, data.points);
      const Matrix dist = d2s(y, out.model.constellation.satellites);
      const CodeMatrix codes = encode(y, out.model.constellation);
      for (std::size_t j = 0; j < c; ++j) {
        long ties = 0;
        const double thr = out.model.constellation.thresholds(static_cast<Eigen::Index>(j));
        for (Eigen::Index i = 0; i < dist.rows(); ++i) ties += dist(i, static_cast<Eigen::Index>(j)) == thr;
        worst_excess = std::max(worst_excess, std::labs(codes.column_sum(j)) - (2 * ties + 1));
      }
      ++models;
    }
  }
  return {worst_excess <= 0,
          fmt("%g models, worst |sum| - (2 ties + 1) = %g", static_cast<double>(models), static_cast<double>(worst_excess))};
}

Outcome a4_theorem1() {
  const auto t0 = clock_type::now();
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t d : {2, 3}) {
    const double far = theorem1_test(d, 20000, 100.0, 5);
    const double near = theorem1_test(d, 20000, 1.0, 5);
    ok = ok && far <= 0.02 && near > far;
    detail << "d=" << d << " far " << far << " near " << near << "; ";
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 10.0;
  detail << elapsed << "s";
  return {ok, detail.str()};
}

Outcome a5_ordering() {
  const auto t0 = clock_type::now();
  double dd = 0, di = 0, lsh = 0;
  std::ostringstream detail;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const double m_dd = dd_runs()[s].map;
    const double m_di = run_on(workloads()[s], options_for(Method::di, s)).map;
    const double m_lsh = run_on(workloads()[s], options_for(Method::lsh, s)).map;
    dd += m_dd / kSeeds;
    di += m_di / kSeeds;
    lsh += m_lsh / kSeeds;
  }
  const double elapsed = seconds_since(t0);
  detail << "mean MAP dd " << dd << " di " << di << " lsh " << lsh << ", " << elapsed << "s incl. data setup";
  return {dd > lsh && dd >= di && elapsed < 120.0, detail.str()};
}

Outcome a6_loss_trace() {
  bool ok = true;
  double worst_alpha = 0.0, worst_beta = 0.0;
  std::ostringstream detail;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const DDReport& r = *dd_runs()[s].outcome.dd_report;
    ok = ok && r.final_loss() <= r.initial_loss;
    for (const auto& row : r.trace) {
      worst_alpha = std::max(worst_alpha, (row.loss_after_alpha - row.loss_after_codes) / row.loss_after_codes);
      worst_beta = std::max(worst_beta, (row.loss_after_beta - row.loss_after_alpha) / row.loss_after_alpha);
    }
    detail << "seed " << s << ": " << r.initial_loss << " -> " << r.final_loss() << " in " << r.trace.size()
           << " iters; ";
  }
  ok = ok && worst_alpha <= 1e-9 && worst_beta <= 1e-9;
  detail << "max relative rise alpha " << worst_alpha << " beta " << worst_beta;
  return {ok, detail.str()};
}

Outcome a7_di() {
  bool ok = true;
  std::ostringstream detail;
  double worst_norm = 0.0;
  bool monotone = true;
  auto check_run = [&](const DIResult& r, double r_s) {
    for (Eigen::Index j = 0; j < r.satellites.rows(); ++j)
      worst_norm = std::max(worst_norm, std::abs(r.satellites.row(j).norm() - r_s));
    double prev = r.initial_objective;
    for (const auto& row : r.trace) {
      monotone = monotone && row.objective >= prev;
      prev = row.objective;
    }
  };
  double worst_pair = 0.0;
  for (std::size_t d : {1, 2, 3, 8}) {
    for (double r_s : {0.5, 2.0}) {
      TrainConfigDI cfg;
      cfg.bits = 2;
      cfg.r_s = r_s;
      cfg.seed = d;
      const auto r = train_di(d, cfg);
      worst_pair = std::max(worst_pair, std::abs(r.final_objective - 4 * r_s * r_s));
      check_run(r, r_s);
    }
  }
  double worst_side = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    TrainConfigDI cfg;
    cfg.bits = 3;
    cfg.r_s = 2.0;
    cfg.seed = seed;
    const auto r = train_di(2, cfg);
    for (int j = 0; j < 3; ++j)
      for (int k = j + 1; k < 3; ++k)
        worst_side = std::max(worst_side, std::abs((r.satellites.row(j) - r.satellites.row(k)).norm() - std::sqrt(3.0) * 2.0));
    check_run(r, 2.0);
  }
  ok = worst_pair <= 1e-6 && worst_side <= 1e-3 && worst_norm <= 1e-12 && monotone;
  detail << "c=2 |E-4r^2| " << worst_pair << ", c=3 side error " << worst_side << ", norm error " << worst_norm
         << ", monotone " << (monotone ? "yes" : "no");
  return {ok, detail.str()};
}

Outcome a8_sweep() {
  const std::vector<double> grid{0.1, 0.5, 1.0, 2.0, 4.0};
  bool ok = true;
  std::ostringstream detail;
  for (Method m : {Method::dd, Method::di}) {
    std::vector<double> maps;
    for (double rs : grid) {
      double mean = 0.0;
      for (std::size_t s = 0; s < kSeeds; ++s) {
        TrainOptions o = options_for(m, s);
        o.r_s = rs;
        mean += (rs == 2.0 && m == Method::dd ? dd_runs()[s].map : run_on(workloads()[s], o).map) / kSeeds;
      }
      maps.push_back(mean);
    }
    const bool low_min = maps[0] == *std::min_element(maps.begin(), maps.end());
    const double hi = std::max({maps[2], maps[3], maps[4]});
    const double lo = std::min({maps[2], maps[3], maps[4]});
    const bool stable = (hi - lo) / hi <= 0.10;
    ok = ok && low_min && stable;
    detail << to_string(m) << " MAP";
    for (std::size_t k = 0; k < grid.size(); ++k) detail << " rs" << grid[k] << "=" << maps[k];
    detail << " (spread over rs>=1: " << (hi - lo) / hi << "); ";
  }
  return {ok, detail.str()};
}

Outcome a9_eval_oracle() {
  std::mt19937_64 rng(9);
  const Matrix base = test::gaussian_matrix(200, 6, rng);
  const Matrix queries = test::gaussian_matrix(20, 6, rng);
  TrainOptions o;
  o.bits = 16;
  o.seed = 1;
  const auto model = train_model(base, o).model;
  const CodeMatrix bc = hash_vectors(model, base);
  const CodeMatrix qc = hash_vectors(model, queries);
  const GroundTruth truth = build_ground_truth(base, queries);
  const EvalReport rep = evaluate(bc, qc, truth, 2);

  // naive: bit loops, full stable sort, linear membership scans
  double map = 0, precision = 0, recall = 0;
  for (std::size_t q = 0; q < 20; ++q) {
    std::vector<std::size_t> dist(200, 0);
    for (std::size_t i = 0; i < 200; ++i)
      for (std::size_t j = 0; j < 16; ++j) dist[i] += bc.bit(i, j) != qc.bit(q, j);
    std::vector<std::size_t> order(200);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    const auto& gt = truth.neighbors[q];
    auto is_true = [&](std::size_t i) { return std::find(gt.begin(), gt.end(), i) != gt.end(); };
    double hits = 0, ap = 0;
    for (std::size_t p = 0; p < 200; ++p) {
      if (is_true(order[p])) {
        hits += 1;
        ap += hits / static_cast<double>(p + 1);
      }
    }
    map += ap / static_cast<double>(gt.size());
    double retrieved = 0, correct = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      if (dist[i] <= 2) {
        retrieved += 1;
        correct += is_true(i) ? 1 : 0;
      }
    }
    precision += retrieved > 0 ? correct / retrieved : 0.0;
    recall += correct / static_cast<double>(gt.size());
  }
  map /= 20;
  precision /= 20;
  recall /= 20;
  const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  const double err = std::max({std::abs(map - rep.map), std::abs(precision - rep.precision),
                               std::abs(recall - rep.recall), std::abs(f1 - rep.f1)});
  return {err <= 1e-10, fmt("map %.6f precision %.6f recall %.6f, max deviation %.3g", rep.map, rep.precision,
                            rep.recall, err)};
}

Outcome a10_cca() {
  double sup = 0, unsup = 0;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const Workload& w = workloads()[s];
    const GroundTruth truth = build_label_ground_truth(w.train_labels, w.query_labels);
    TrainOptions o = options_for(Method::dd, s);
    unsup += run_on(w, o, &truth).map / kSeeds;
    o.supervised = true;
    sup += run_on(w, o, &truth).map / kSeeds;
  }

  // Label-aligned construction: the class is a linear function of x.
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  Matrix x(400, 6);
  std::vector<int> labels(400);
  for (Eigen::Index i = 0; i < 400; ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    for (Eigen::Index k = 0; k < 6; ++k) x(i, k) = g(rng);
    x(i, 0) = labels[static_cast<std::size_t>(i)] ? 3.0 + 0.1 * g(rng) : -3.0 + 0.1 * g(rng);
  }
  const double lambda1 = fit_cca(x, one_hot(labels), 1).spectrum(0);
  return {sup >= unsup && lambda1 >= 0.99,
          fmt("label-truth mean MAP cca %.4f vs pca %.4f; lambda_1 %.6f", sup, unsup, lambda1)};
}

Outcome a11_formats() {
  test::TempDir dir;
  std::mt19937_64 rng(11);
  bool ok = true;
  const Matrix f = test::random_matrix(25, 7, rng, -50, 50).cast<float>().cast<double>();
  write_vectors(dir / "x.fvecs", f, VectorFormat::fvecs);
  ok = ok && read_vectors(dir / "x.fvecs", VectorFormat::fvecs) == f;
  Matrix b(3, 256);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = static_cast<double>(i % 256);
  write_vectors(dir / "x.bvecs", b, VectorFormat::bvecs);
  ok = ok && read_vectors(dir / "x.bvecs", VectorFormat::bvecs) == b;
  const Matrix iv = test::random_matrix(9, 4, rng, -1e8, 1e8).array().round().matrix();
  write_vectors(dir / "x.ivecs", iv, VectorFormat::ivecs);
  ok = ok && read_vectors(dir / "x.ivecs", VectorFormat::ivecs) == iv;

  const auto data = make_synthetic(SyntheticKind::gaussian_clusters, 1500, 24, 5, 12);
  std::string first;
  for (Method m : {Method::dd, Method::di, Method::lsh}) {
    TrainOptions o;
    o.method = m;
    o.bits = 24;
    o.seed = 5;
    const HashModel model = train_model(data.points, o).model;
    write_model(dir / "a.ghs", model);
    write_model(dir / "b.ghs", train_model(data.points, o).model);
    std::ifstream fa(dir / "a.ghs", std::ios::binary), fb(dir / "b.ghs", std::ios::binary);
    const std::string ba{std::istreambuf_iterator<char>(fa), {}}, bb{std::istreambuf_iterator<char>(fb), {}};
    ok = ok && ba == bb && !ba.empty();
    const HashModel back = read_model(dir / "a.ghs");
    write_model(dir / "c.ghs", back);
    std::ifstream fc(dir / "c.ghs", std::ios::binary);
    ok = ok && std::string{std::istreambuf_iterator<char>(fc), {}} == ba;

    const CodeMatrix codes = hash_vectors(model, data.points);
    write_codes(dir / "a.ghsc", codes);
    ok = ok && read_codes(dir / "a.ghsc") == codes && hash_vectors(back, data.points) == codes;
  }
  return {ok, ok ? "fvecs/bvecs/ivecs, GHS1 and GHSC round trips exact; same-seed models byte-identical"
                 : "a round trip or determinism check differed"};
}

Outcome a12_probe() {
  double map_d_eq_c = 0, map_d_eq_cm1 = 0;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    TrainOptions o = options_for(Method::dd, s);
    o.rho = 1.0;
    o.dims = 32;
    map_d_eq_c += run_on(workloads()[s], o).map / kSeeds;
    o.dims = 31;
    map_d_eq_cm1 += run_on(workloads()[s], o).map / kSeeds;
  }
  std::printf("A12 row: c,rho,map_d_eq_c,map_d_eq_c_minus_1\nA12 row: 32,1,%.6f,%.6f\n", map_d_eq_c, map_d_eq_cm1);
  return {std::isfinite(map_d_eq_c) && std::isfinite(map_d_eq_cm1),
          fmt("mean MAP d=c %.4f, d=c-1 (c=d+1) %.4f", map_d_eq_c, map_d_eq_cm1)};
}

}  // namespace

int main() {
  report("A1", "GPS solver recovers planted points", a1_gps);
  report("A2", "Procrustes recovers planted rotations", a2_procrustes);
  report("A3", "trained codes are balanced up to ties", a3_balance);
  report("A4", "far-field satellites decorrelate bits", a4_theorem1);
  report("A5", "retrieval ordering dd > lsh, dd >= di", a5_ordering);
  report("A6", "dd loss trace", a6_loss_trace);
  report("A7", "di optimizer optima and invariants", a7_di);
  report("A8", "satellite radius sweep shape", a8_sweep);
  report("A9", "evaluate matches a naive oracle", a9_eval_oracle);
  report("A10", "supervised embedding helps", a10_cca);
  report("A11", "file formats and determinism", a11_formats);
  report("A12", "c = d+1 vs c = d probe", a12_probe);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
