#pragma once

// End-to-end workflows: fit embedding, place satellites, hash, evaluate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghs/eval.hpp"
#include "ghs/model.hpp"
#include "ghs/trainer_dd.hpp"
#include "ghs/trainer_di.hpp"

namespace ghs {

enum class Method { dd, di, lsh };

Method parse_method(const std::string& name);
const char* to_string(Method method);

struct TrainOptions {
  Method method = Method::dd;
  std::size_t bits = 32;
  std::optional<double> rho;  // default_rho(bits) when unset
  double r_s = 2.0;
  std::uint64_t seed = 0;
  /// Embedded dimension override; bypasses the (c, rho) rule.
  std::optional<std::size_t> dims;
  bool supervised = false;
  double cca_reg = 1e-4;
  std::size_t dd_max_iter = 50;
  std::size_t di_max_iter = 1000;
};

struct TrainOutcome {
  HashModel model;
  std::optional<DDReport> dd_report;
  std::optional<DIResult> di_result;
  double seconds = 0.0;
};

/// Embedded dimension for the given options and data. Supervised runs cap
/// d at the label count, which bounds the useful CCA directions.
std::size_t resolve_dims(const TrainOptions& options, std::size_t input_dim, std::size_t label_count = 0);

/// labels are required (one class id per row) when options.supervised.
TrainOutcome train_model(const Matrix& x, const TrainOptions& options, const std::vector<int>* labels = nullptr);

struct BenchOptions {
  TrainOptions train;
  std::size_t query_count = 1000;
  double fraction = 0.02;
  std::size_t radius = 2;
  /// Ground truth from shared labels instead of Euclidean neighbors.
  bool label_truth = false;
};

struct BenchResult {
  EvalReport report;
  TrainOutcome outcome;
  std::size_t dims = 0;
};

/// split -> train -> encode -> evaluate. The split uses options.train.seed.
BenchResult run_bench(const Matrix& x, const BenchOptions& options, const std::vector<int>* labels = nullptr);

}  // namespace ghs
