#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>

#include "ghs/dataio.hpp"
#include "ghs/eval.hpp"
#include "ghs/model.hpp"
#include "ghs/parallel.hpp"
#include "ghs/pipeline.hpp"

namespace ghs::cli {
namespace {

struct InputFlags {
  std::string path;
  std::string format;
  std::size_t limit = 0;

  void add(CLI::App& app, const std::string& flag, const std::string& help, bool required) {
    auto* opt = app.add_option(flag, path, help);
    if (required) opt->required();
    app.add_option("--format", format, "fvecs, bvecs, ivecs or csv (default: from extension)");
    app.add_option("--limit", limit, "read at most this many rows");
  }

  Matrix load() const { return load(path); }
  Matrix load(const std::string& p) const {
    const VectorFormat fmt = format.empty() ? format_from_path(p) : parse_format(format);
    return read_vectors(p, fmt, limit ? std::optional<std::size_t>(limit) : std::nullopt);
  }
};

struct SyntheticFlags {
  std::string kind;
  std::size_t n = 10000;
  std::size_t dim = 64;
  std::size_t clusters = 10;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    app.add_option("--synthetic", kind, "generate data instead of reading: clusters or ball")
        ->check(CLI::IsMember({"clusters", "ball"}));
    app.add_option("--n", n, "synthetic point count");
    app.add_option("--dim", dim, "synthetic dimension");
    app.add_option("--clusters", clusters, "synthetic cluster count");
    app.add_option("--data-seed", seed, "synthetic data seed");
  }

  SyntheticData make() const {
    return make_synthetic(kind == "ball" ? SyntheticKind::uniform_ball : SyntheticKind::gaussian_clusters, n, dim,
                          clusters, seed);
  }
};

std::ostream& open_report(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path);
  if (!file) throw Error("cannot open " + path + " for writing");
  return file;
}

void finish_report(std::ofstream& file, const std::string& path) {
  if (!file.is_open()) return;
  file.flush();
  if (!file) throw Error("write failed for " + path);
}

void print_training_summary(std::ostream& out, const TrainOutcome& outcome, Method method, std::size_t n,
                            std::size_t dim) {
  const HashModel& m = outcome.model;
  out << "method " << to_string(method) << ", n " << n << ", D " << dim << ", c " << m.bits();
  if (!m.is_lsh()) {
    out << ", d " << m.embedding.output_dim() << ", groups " << m.constellation.groups.size() << ", embedding "
        << to_string(m.embedding.kind);
  }
  out << '\n';
  if (outcome.dd_report) {
    const DDReport& r = *outcome.dd_report;
    out << "loss " << r.initial_loss << " -> " << r.final_loss() << " after " << r.trace.size() << " iterations"
        << (r.converged ? " (converged)" : "") << ", gps fallbacks " << r.gps_fallbacks << '\n';
    const std::size_t tail = std::min<std::size_t>(3, r.trace.size());
    for (std::size_t k = r.trace.size() - tail; k < r.trace.size(); ++k) {
      out << "  iter " << r.trace[k].iteration << " E " << r.trace[k].loss << '\n';
    }
  }
  if (outcome.di_result) {
    const DIResult& r = *outcome.di_result;
    out << "objective " << r.initial_objective << " -> " << r.final_objective << " after " << r.iterations
        << " iterations" << (r.converged ? " (converged)" : "") << ", rejected steps " << r.rejected_steps << '\n';
  }
  out << "wall time " << std::fixed << std::setprecision(3) << outcome.seconds << "s\n";
  out.unsetf(std::ios::floatfield);
}

struct TrainFlags {
  std::string method = "dd";
  std::size_t bits = 32;
  std::optional<double> rho;
  double r_s = 2.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> dims;
  bool supervised = false;
  std::string labels;

  void add(CLI::App& app, bool with_method) {
    if (with_method) {
      app.add_option("--method", method, "dd, di or lsh")->check(CLI::IsMember({"dd", "di", "lsh"}));
      app.add_option("--bits", bits, "code length c")->check(CLI::Range(2, 1 << 20));
      app.add_option("--rho", rho, "bits per group c/(d+1) (default 1 up to 16 bits, else 0.5)");
      app.add_option("--rs", r_s, "satellite radius")->check(CLI::PositiveNumber);
    }
    app.add_option("--seed", seed, "random seed");
    app.add_option("--dims", dims, "embedded dimension override");
    app.add_option("--labels", labels, "label file, one integer per line");
    app.add_flag("--supervised", supervised, "CCA embedding against the labels");
  }

  TrainOptions options() const {
    TrainOptions o;
    o.method = parse_method(method);
    o.bits = bits;
    o.rho = rho;
    o.r_s = r_s;
    o.seed = seed;
    o.dims = dims;
    o.supervised = supervised;
    return o;
  }
};

std::vector<int> load_labels(const std::string& path, Eigen::Index rows) {
  std::vector<int> labels = read_labels(path);
  if (labels.size() < static_cast<std::size_t>(rows)) throw Error("label file has fewer rows than the data");
  labels.resize(static_cast<std::size_t>(rows));
  return labels;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Satellite-based binary hashing: train, encode, query, evaluate, benchmark"};
  app.name(args.empty() ? "ghs" : args[0]);
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker thread cap (default: GHS_THREADS or all cores)");

  // train
  auto* train = app.add_subcommand("train", "fit a hashing model and write it as GHS1");
  InputFlags train_in;
  TrainFlags train_flags;
  std::string train_out, trace_path;
  train_in.add(*train, "--input", "training vectors", true);
  train_flags.add(*train, true);
  train->add_option("--out", train_out, "model file")->required();
  train->add_option("--trace", trace_path, "write the optimizer trace as CSV");
  train->add_option("--threads", threads, "worker thread cap");

  // encode
  auto* enc = app.add_subcommand("encode", "hash vectors with a model into a GHSC code file");
  InputFlags enc_in;
  std::string enc_model, enc_out;
  enc->add_option("--model", enc_model, "GHS1 model file")->required();
  enc_in.add(*enc, "--input", "vectors to encode", true);
  enc->add_option("--out", enc_out, "code file")->required();
  enc->add_option("--threads", threads, "worker thread cap");

  // query
  auto* query = app.add_subcommand("query", "rank base codes for each query vector");
  InputFlags query_in;
  std::string query_model, query_base;
  std::size_t k = 10;
  query->add_option("--model", query_model, "GHS1 model file")->required();
  query->add_option("--base-codes", query_base, "GHSC base codes")->required();
  query_in.add(*query, "--query-vectors", "query vectors", true);
  query->add_option("--k", k, "results per query");
  query->add_option("--threads", threads, "worker thread cap");

  // eval
  auto* ev = app.add_subcommand("eval", "MAP and hash-lookup precision/recall/F1 of code files");
  std::string ev_base, ev_query, ev_truth, ev_out, ev_label = "eval";
  InputFlags ev_in;
  std::string ev_base_vectors, ev_query_vectors;
  std::size_t ev_radius = 2;
  double ev_fraction = 0.02;
  std::uint64_t ev_seed = 0;
  ev->add_option("--base-codes", ev_base, "GHSC base codes")->required();
  ev->add_option("--query-codes", ev_query, "GHSC query codes")->required();
  auto* gt_opt = ev->add_option("--ground-truth", ev_truth, "ivecs file, one neighbor list per query");
  auto* bv_opt = ev->add_option("--base-vectors", ev_base_vectors, "base vectors for Euclidean ground truth");
  auto* qv_opt = ev->add_option("--query-vectors", ev_query_vectors, "query vectors for Euclidean ground truth");
  gt_opt->excludes(bv_opt)->excludes(qv_opt);
  bv_opt->needs(qv_opt);
  qv_opt->needs(bv_opt);
  ev->add_option("--format", ev_in.format, "vector file format");
  ev->add_option("--fraction", ev_fraction, "ground-truth neighbor fraction");
  ev->add_option("--radius", ev_radius, "Hamming lookup radius");
  ev->add_option("--method", ev_label, "method name for the report row");
  ev->add_option("--seed", ev_seed, "seed recorded in the report row");
  ev->add_option("--out", ev_out, "report CSV (default stdout)");
  ev->add_option("--threads", threads, "worker thread cap");

  // bench and sweep share their data and protocol flags
  auto* bench = app.add_subcommand("bench", "split, train, encode and evaluate in one run");
  auto* sweep = app.add_subcommand("sweep", "bench over a grid of satellite radius and rho");
  struct ProtocolFlags {
    InputFlags in;
    SyntheticFlags synth;
    TrainFlags train;
    std::vector<std::string> methods{"dd", "di", "lsh"};
    std::vector<std::size_t> bits{32};
    std::size_t queries = 1000;
    std::size_t seeds = 1;
    std::size_t radius = 2;
    double fraction = 0.02;
    bool label_truth = false;
    std::string out;
  };
  ProtocolFlags bench_flags, sweep_flags;
  sweep_flags.methods = {"dd", "di"};
  std::vector<double> rs_grid{0.1, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> rho_grid;
  for (auto [cmd, f] : {std::pair{bench, &bench_flags}, std::pair{sweep, &sweep_flags}}) {
    f->in.add(*cmd, "--input", "data vectors (or use --synthetic)", false);
    f->synth.add(*cmd);
    f->train.add(*cmd, false);
    cmd->add_option("--methods", f->methods, "comma-separated methods")
        ->delimiter(',')
        ->check(CLI::IsMember({"dd", "di", "lsh"}));
    cmd->add_option("--bits", f->bits, "comma-separated code lengths")->delimiter(',');
    cmd->add_option("--queries", f->queries, "held-out query count");
    cmd->add_option("--seeds", f->seeds, "repeat with seeds seed, seed+1, ...");
    cmd->add_option("--radius", f->radius, "Hamming lookup radius");
    cmd->add_option("--fraction", f->fraction, "ground-truth neighbor fraction");
    cmd->add_flag("--label-truth", f->label_truth, "relevance = shared label instead of Euclidean top fraction");
    cmd->add_option("--out", f->out, "report CSV (default stdout)");
    cmd->add_option("--threads", threads, "worker thread cap");
  }
  bench->add_option("--rho", bench_flags.train.rho, "bits per group c/(d+1)");
  bench->add_option("--rs", bench_flags.train.r_s, "satellite radius")->check(CLI::PositiveNumber);
  sweep->add_option("--rs-grid", rs_grid, "comma-separated satellite radii")->delimiter(',');
  sweep->add_option("--rho-grid", rho_grid, "comma-separated rho values (default: the bits rule)")->delimiter(',');

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (threads > 0) set_thread_count(threads);

    if (*train) {
      const Matrix x = train_in.load();
      std::vector<int> labels;
      if (!train_flags.labels.empty()) labels = load_labels(train_flags.labels, x.rows());
      if (train_flags.supervised && labels.empty()) throw Error("--supervised requires --labels");
      const TrainOptions options = train_flags.options();
      const TrainOutcome outcome = train_model(x, options, labels.empty() ? nullptr : &labels);
      write_model(train_out, outcome.model);
      if (!trace_path.empty()) {
        std::ofstream trace(trace_path);
        if (!trace) throw Error("cannot open " + trace_path + " for writing");
        if (outcome.dd_report) write_dd_trace_csv(trace, *outcome.dd_report);
        if (outcome.di_result) write_di_trace_csv(trace, *outcome.di_result);
        if (!trace) throw Error("write failed for " + trace_path);
      }
      print_training_summary(out, outcome, options.method, static_cast<std::size_t>(x.rows()),
                             static_cast<std::size_t>(x.cols()));
      return 0;
    }

    if (*enc) {
      const HashModel model = read_model(enc_model);
      const Matrix x = enc_in.load();
      const CodeMatrix codes = x.rows() == 0 ? CodeMatrix(0, model.bits()) : hash_vectors(model, x);
      write_codes(enc_out, codes);
      out << "encoded " << codes.rows() << " vectors to " << codes.bits() << "-bit codes\n";
      return 0;
    }

    if (*query) {
      const HashModel model = read_model(query_model);
      const CodeMatrix base = read_codes(query_base);
      if (base.bits() != model.bits()) throw Error("base codes and model have different code lengths");
      const Matrix q = query_in.load();
      const CodeMatrix qc = q.rows() == 0 ? CodeMatrix(0, model.bits()) : hash_vectors(model, q);
      const std::size_t kk = std::min(k, base.rows());
      out << "query,rank,index,hamming\n";
      for (std::size_t i = 0; i < qc.rows(); ++i) {
        const auto ranked = rank_by_hamming(qc.row(i), base, kk);
        for (std::size_t r = 0; r < ranked.size(); ++r) {
          out << i << ',' << r << ',' << ranked[r] << ',' << hamming(qc.row(i), base.row(ranked[r])) << '\n';
        }
      }
      return 0;
    }

    if (*ev) {
      const CodeMatrix base = read_codes(ev_base);
      const CodeMatrix queries = read_codes(ev_query);
      if (base.bits() != queries.bits()) throw Error("base and query code files have different code lengths");
      GroundTruth truth;
      if (!ev_truth.empty()) {
        const Matrix lists = read_vectors(ev_truth, VectorFormat::ivecs);
        truth.base_size = base.rows();
        for (Eigen::Index i = 0; i < lists.rows(); ++i) {
          std::vector<std::size_t> row;
          for (Eigen::Index j = 0; j < lists.cols(); ++j) {
            const double v = lists(i, j);
            if (v < 0 || v >= static_cast<double>(base.rows())) throw Error("ground-truth index out of range");
            row.push_back(static_cast<std::size_t>(v));
          }
          std::sort(row.begin(), row.end());
          truth.neighbors.push_back(std::move(row));
        }
      } else if (!ev_base_vectors.empty()) {
        truth = build_ground_truth(ev_in.load(ev_base_vectors), ev_in.load(ev_query_vectors), ev_fraction);
      } else {
        throw Error("eval needs --ground-truth or --base-vectors with --query-vectors");
      }
      const EvalReport report = evaluate(base, queries, truth, ev_radius);
      std::ofstream file;
      std::ostream& sink = open_report(ev_out, file, out);
      write_report_csv_header(sink);
      write_report_csv_row(sink, ReportRow{ev_label, report, ev_seed});
      finish_report(file, ev_out);
      return 0;
    }

    const bool is_sweep = static_cast<bool>(*sweep);
    ProtocolFlags& f = is_sweep ? sweep_flags : bench_flags;
    Matrix x;
    std::vector<int> labels;
    if (!f.synth.kind.empty()) {
      if (!f.in.path.empty()) throw Error("use either --input or --synthetic");
      SyntheticData data = f.synth.make();
      x = std::move(data.points);
      labels = std::move(data.labels);
    } else {
      if (f.in.path.empty()) throw Error("--input or --synthetic is required");
      x = f.in.load();
    }
    if (!f.train.labels.empty()) labels = load_labels(f.train.labels, x.rows());
    if ((f.label_truth || f.train.supervised) && labels.empty()) throw Error("labels are required");

    std::ofstream file;
    std::ostream& sink = open_report(f.out, file, out);
    if (is_sweep) {
      sink << "method,c,rs,rho,d,map,precision,recall,f1,radius,n,seed\n";
    } else {
      write_report_csv_header(sink);
    }
    const std::vector<double> rs_values = is_sweep ? rs_grid : std::vector<double>{f.train.r_s};
    std::vector<std::optional<double>> rho_values;
    if (is_sweep && !rho_grid.empty()) {
      for (double r : rho_grid) rho_values.emplace_back(r);
    } else {
      rho_values.push_back(f.train.rho);
    }

    for (std::size_t bits : f.bits) {
      for (const std::string& method : f.methods) {
        for (std::optional<double> rho : rho_values) {
          for (double rs : rs_values) {
            for (std::size_t s = 0; s < f.seeds; ++s) {
              BenchOptions b;
              b.train = f.train.options();
              b.train.method = parse_method(method);
              b.train.bits = bits;
              b.train.r_s = rs;
              b.train.rho = rho;
              b.train.seed = f.train.seed + s;
              b.query_count = f.queries;
              b.fraction = f.fraction;
              b.radius = f.radius;
              b.label_truth = f.label_truth;
              const BenchResult r = run_bench(x, b, labels.empty() ? nullptr : &labels);
              if (is_sweep) {
                const double rho_used = rho.value_or(default_rho(bits));
                sink << std::setprecision(10) << method << ',' << bits << ',' << rs << ',' << rho_used << ','
                     << r.dims << ',' << r.report.map << ',' << r.report.precision << ',' << r.report.recall << ','
                     << r.report.f1 << ',' << r.report.radius << ',' << r.report.base_size << ',' << b.train.seed
                     << '\n';
              } else {
                write_report_csv_row(sink, ReportRow{method, r.report, b.train.seed});
              }
            }
          }
        }
      }
    }
    finish_report(file, f.out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ghs::cli
