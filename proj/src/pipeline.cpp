#include "ghs/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "ghs/dataio.hpp"

namespace ghs {

Method parse_method(const std::string& name) {
  if (name == "dd") return Method::dd;
  if (name == "di") return Method::di;
  if (name == "lsh") return Method::lsh;
  throw Error("unknown method '" + name + "' (expected dd, di or lsh)");
}

const char* to_string(Method method) {
  switch (method) {
    case Method::dd: return "dd";
    case Method::di: return "di";
    case Method::lsh: return "lsh";
  }
  return "unknown";
}

std::size_t resolve_dims(const TrainOptions& options, std::size_t input_dim, std::size_t label_count) {
  std::size_t cap = input_dim;
  if (options.supervised) {
    if (label_count == 0) throw Error("supervised training needs labels");
    cap = std::min(cap, label_count);
  }
  if (options.dims) {
    if (*options.dims < 1) throw Error("embedded dimension must be at least 1");
    return std::min(*options.dims, cap);
  }
  return derive_dims(options.bits, options.rho.value_or(default_rho(options.bits)), cap).dims;
}

TrainOutcome train_model(const Matrix& x, const TrainOptions& options, const std::vector<int>* labels) {
  const auto start = std::chrono::steady_clock::now();
  TrainOutcome outcome;
  if (options.method == Method::lsh) {
    outcome.model = make_lsh_model(fit_lsh(x, options.bits, options.seed));
    outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
  }

  std::size_t label_count = 0;
  LabelMatrix z;
  if (options.supervised) {
    if (!labels) throw Error("supervised training needs labels");
    if (labels->size() != static_cast<std::size_t>(x.rows())) throw Error("label count differs from data rows");
    z = one_hot(*labels);
    label_count = static_cast<std::size_t>(z.cols());
  }
  const std::size_t d = resolve_dims(options, static_cast<std::size_t>(x.cols()), label_count);
  outcome.model.embedding = options.supervised ? fit_cca(x, z, d, options.cca_reg) : fit_pca(x, d);
  const Matrix y = embed(outcome.model.embedding, x);
  const double rho = options.rho.value_or(default_rho(options.bits));

  if (options.method == Method::dd) {
    TrainConfigDD cfg;
    cfg.bits = options.bits;
    cfg.rho = rho;
    cfg.r_s = options.r_s;
    cfg.max_iter = options.dd_max_iter;
    cfg.seed = options.seed;
    DDResult trained = train_dd(y, cfg);
    outcome.model.constellation = std::move(trained.constellation);
    outcome.dd_report = std::move(trained.report);
  } else {
    TrainConfigDI cfg;
    cfg.bits = options.bits;
    cfg.rho = rho;
    cfg.r_s = options.r_s;
    cfg.max_iter = options.di_max_iter;
    cfg.seed = options.seed;
    DIResult details;
    outcome.model.constellation = build_di_constellation(y, cfg, &details);
    outcome.di_result = std::move(details);
  }
  outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

BenchResult run_bench(const Matrix& x, const BenchOptions& options, const std::vector<int>* labels) {
  if (labels && labels->size() != static_cast<std::size_t>(x.rows())) throw Error("label count differs from data rows");
  if ((options.label_truth || options.train.supervised) && !labels) throw Error("labels required");
  const Split parts = split(x, options.query_count, options.train.seed);
  std::vector<int> train_labels;
  std::vector<int> query_labels;
  if (labels) {
    train_labels = gather(*labels, parts.train_index);
    query_labels = gather(*labels, parts.query_index);
  }

  BenchResult result;
  result.outcome = train_model(parts.train, options.train, labels ? &train_labels : nullptr);
  result.dims = result.outcome.model.embedding.output_dim();
  const CodeMatrix base = hash_vectors(result.outcome.model, parts.train);
  const CodeMatrix queries = hash_vectors(result.outcome.model, parts.queries);
  const GroundTruth truth = options.label_truth ? build_label_ground_truth(train_labels, query_labels)
                                                : build_ground_truth(parts.train, parts.queries, options.fraction);
  result.report = evaluate(base, queries, truth, options.radius);
  return result;
}

}  // namespace ghs
