#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "ghs/dataio.hpp"
#include "ghs/eval.hpp"
#include "ghs/model.hpp"
#include "ghs/parallel.hpp"
#include "ghs/pipeline.hpp"

namespace py = pybind11;
using namespace ghs;

namespace {

// n x c int8 array of +1 / -1.
py::array_t<std::int8_t> codes_to_array(const CodeMatrix& codes) {
  py::array_t<std::int8_t> out({codes.rows(), codes.bits()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < codes.rows(); ++i) {
    for (std::size_t j = 0; j < codes.bits(); ++j) view(i, j) = static_cast<std::int8_t>(codes.code(i, j));
  }
  return out;
}

CodeMatrix codes_from_array(py::array_t<std::int8_t, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2) throw Error("codes must be a 2-D array of +1/-1");
  auto view = a.unchecked<2>();
  CodeMatrix out(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    for (py::ssize_t j = 0; j < a.shape(1); ++j) {
      const int v = view(i, j);
      if (v != 1 && v != -1) throw Error("codes must be +1 or -1");
      out.set_bit(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v == 1);
    }
  }
  return out;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["map"] = r.map;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["radius"] = r.radius;
  d["bits"] = r.bits;
  d["n"] = r.base_size;
  d["average_precisions"] = r.average_precisions;
  return d;
}

TrainOptions make_options(const std::string& method, std::size_t bits, std::optional<double> rho, double r_s,
                          std::uint64_t seed, std::optional<std::size_t> dims, bool supervised) {
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

}  // namespace

PYBIND11_MODULE(_ghs, m) {
  m.doc() = "Satellite-based binary hashing";
  py::register_exception<Error>(m, "GhsError", PyExc_ValueError);

  py::enum_<EmbeddingKind>(m, "EmbeddingKind")
      .value("pca", EmbeddingKind::pca)
      .value("cca", EmbeddingKind::cca)
      .value("lsh", EmbeddingKind::lsh);

  py::class_<EmbeddingModel>(m, "EmbeddingModel")
      .def_readonly("kind", &EmbeddingModel::kind)
      .def_readonly("mean", &EmbeddingModel::mean)
      .def_readonly("projection", &EmbeddingModel::projection)
      .def_readonly("scale", &EmbeddingModel::scale)
      .def_readonly("spectrum", &EmbeddingModel::spectrum)
      .def_property_readonly("input_dim", &EmbeddingModel::input_dim)
      .def_property_readonly("output_dim", &EmbeddingModel::output_dim);

  py::class_<Constellation>(m, "Constellation")
      .def_readonly("satellites", &Constellation::satellites)
      .def_readonly("thresholds", &Constellation::thresholds)
      .def_readonly("r_s", &Constellation::r_s)
      .def_property_readonly("groups", [](const Constellation& c) {
        py::list out;
        for (const auto& g : c.groups) out.append(py::make_tuple(g.start, g.len));
        return out;
      });

  py::class_<CodeMatrix>(m, "CodeMatrix")
      .def(py::init(&codes_from_array), py::arg("codes"))
      .def_property_readonly("rows", &CodeMatrix::rows)
      .def_property_readonly("bits", &CodeMatrix::bits)
      .def_property_readonly("words", &CodeMatrix::words)
      .def("to_numpy", &codes_to_array)
      .def("__len__", &CodeMatrix::rows)
      .def("__eq__", [](const CodeMatrix& a, const CodeMatrix& b) { return a == b; });

  py::class_<HashModel>(m, "HashModel")
      .def_readonly("embedding", &HashModel::embedding)
      .def_readonly("constellation", &HashModel::constellation)
      .def_property_readonly("bits", &HashModel::bits)
      .def_property_readonly("is_lsh", &HashModel::is_lsh)
      .def("hash", &hash_vectors, py::arg("x"))
      .def(
          "save", [](const HashModel& self, const std::filesystem::path& path) { write_model(path, self); },
          py::arg("path"))
      .def_static("load", py::overload_cast<const std::filesystem::path&>(&read_model), py::arg("path"));

  m.def("fit_pca", &fit_pca, py::arg("x"), py::arg("d"));
  m.def(
      "fit_cca",
      [](const Matrix& x, const std::vector<int>& labels, std::size_t d, double reg) {
        return fit_cca(x, one_hot(labels), d, reg);
      },
      py::arg("x"), py::arg("labels"), py::arg("d"), py::arg("reg") = 1e-4);
  m.def("embed", &embed, py::arg("model"), py::arg("x"));

  m.def(
      "train",
      [](const Matrix& x, std::size_t bits, const std::string& method, std::optional<double> rho, double r_s,
         std::uint64_t seed, std::optional<std::size_t> dims, std::optional<std::vector<int>> labels,
         bool supervised) {
        TrainOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = train_model(x, make_options(method, bits, rho, r_s, seed, dims, supervised),
                                labels ? &*labels : nullptr);
        }
        py::dict info;
        info["seconds"] = outcome.seconds;
        if (outcome.dd_report) {
          std::vector<double> trace;
          for (const auto& it : outcome.dd_report->trace) trace.push_back(it.loss);
          info["initial_loss"] = outcome.dd_report->initial_loss;
          info["loss_trace"] = trace;
          info["converged"] = outcome.dd_report->converged;
        }
        if (outcome.di_result) {
          info["initial_objective"] = outcome.di_result->initial_objective;
          info["final_objective"] = outcome.di_result->final_objective;
          info["iterations"] = outcome.di_result->iterations;
          info["converged"] = outcome.di_result->converged;
        }
        return py::make_tuple(outcome.model, info);
      },
      py::arg("x"), py::arg("bits") = 32, py::arg("method") = "dd", py::arg("rho") = py::none(),
      py::arg("r_s") = 2.0, py::arg("seed") = 0, py::arg("dims") = py::none(), py::arg("labels") = py::none(),
      py::arg("supervised") = false,
      "Fit a model; returns (HashModel, info dict).");

  m.def("encode", &encode, py::arg("y"), py::arg("constellation"), "Hash already-embedded points.");
  m.def("hash", &hash_vectors, py::arg("model"), py::arg("x"));
  m.def("hamming", [](const CodeMatrix& a, std::size_t i, const CodeMatrix& b, std::size_t k) {
    if (i >= a.rows() || k >= b.rows() || a.bits() != b.bits()) throw Error("hamming: bad rows or code lengths");
    return hamming(a.row(i), b.row(k));
  });
  m.def(
      "rank",
      [](const CodeMatrix& queries, const CodeMatrix& base, std::size_t k) {
        if (queries.bits() != base.bits()) throw Error("rank: inconsistent code lengths");
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < queries.rows(); ++i) out.push_back(rank_by_hamming(queries.row(i), base, k));
        return out;
      },
      py::arg("queries"), py::arg("base"), py::arg("k"));
  m.def(
      "evaluate",
      [](const CodeMatrix& base, const CodeMatrix& queries, std::optional<Matrix> base_vectors,
         std::optional<Matrix> query_vectors, std::optional<std::vector<std::vector<std::size_t>>> neighbors,
         double fraction, std::size_t radius) {
        GroundTruth truth;
        if (neighbors) {
          truth.neighbors = *neighbors;
          truth.base_size = base.rows();
          for (auto& row : truth.neighbors) std::sort(row.begin(), row.end());
        } else if (base_vectors && query_vectors) {
          truth = build_ground_truth(*base_vectors, *query_vectors, fraction);
        } else {
          throw Error("evaluate needs neighbors or both vector sets");
        }
        return report_dict(evaluate(base, queries, truth, radius));
      },
      py::arg("base"), py::arg("queries"), py::arg("base_vectors") = py::none(),
      py::arg("query_vectors") = py::none(), py::arg("neighbors") = py::none(), py::arg("fraction") = 0.02,
      py::arg("radius") = 2);

  m.def("read_model", py::overload_cast<const std::filesystem::path&>(&read_model), py::arg("path"));
  m.def("write_model", py::overload_cast<const std::filesystem::path&, const HashModel&>(&write_model),
        py::arg("path"), py::arg("model"));
  m.def("read_codes", py::overload_cast<const std::filesystem::path&>(&read_codes), py::arg("path"));
  m.def("write_codes", py::overload_cast<const std::filesystem::path&, const CodeMatrix&>(&write_codes),
        py::arg("path"), py::arg("codes"));
  m.def(
      "read_vectors",
      [](const std::filesystem::path& path, std::optional<std::string> format, std::optional<std::size_t> limit) {
        return read_vectors(path, format ? parse_format(*format) : format_from_path(path), limit);
      },
      py::arg("path"), py::arg("format") = py::none(), py::arg("limit") = py::none());
  m.def(
      "write_vectors",
      [](const std::filesystem::path& path, const Matrix& x, std::optional<std::string> format) {
        write_vectors(path, x, format ? parse_format(*format) : format_from_path(path));
      },
      py::arg("path"), py::arg("x"), py::arg("format") = py::none());
  m.def(
      "make_synthetic",
      [](const std::string& kind, std::size_t n, std::size_t dim, std::size_t clusters, std::uint64_t seed) {
        if (kind != "clusters" && kind != "ball") throw Error("kind must be 'clusters' or 'ball'");
        SyntheticData data = make_synthetic(kind == "ball" ? SyntheticKind::uniform_ball
                                                           : SyntheticKind::gaussian_clusters,
                                            n, dim, clusters, seed);
        return py::make_tuple(std::move(data.points), std::move(data.labels));
      },
      py::arg("kind") = "clusters", py::arg("n") = 1000, py::arg("dim") = 16, py::arg("clusters") = 10,
      py::arg("seed") = 0);

  m.def("gps_solve_satellite", &gps_solve_satellite, py::arg("y"), py::arg("bprime"), py::arg("r_s"),
        py::arg("ridge") = 1e-10);
  m.def("procrustes_rotation", &procrustes_rotation, py::arg("target"), py::arg("source"));
  m.def("theorem1_test", &theorem1_test, py::arg("d"), py::arg("n"), py::arg("rs_factor"), py::arg("seed") = 1,
        "Largest absolute pairwise bit correlation for d orthogonal satellites on uniform-ball data.");
  m.def("di_objective", &di_objective, py::arg("satellites"));
  m.def(
      "bench",
      [](const Matrix& x, std::size_t bits, const std::string& method, std::optional<double> rho, double r_s,
         std::uint64_t seed, std::size_t queries, double fraction, std::size_t radius,
         std::optional<std::vector<int>> labels, bool label_truth, bool supervised) {
        BenchOptions b;
        b.train = make_options(method, bits, rho, r_s, seed, std::nullopt, supervised);
        b.query_count = queries;
        b.fraction = fraction;
        b.radius = radius;
        b.label_truth = label_truth;
        BenchResult r;
        {
          py::gil_scoped_release release;
          r = run_bench(x, b, labels ? &*labels : nullptr);
        }
        py::dict d = report_dict(r.report);
        d["dims"] = r.dims;
        d["seconds"] = r.outcome.seconds;
        return d;
      },
      py::arg("x"), py::arg("bits") = 32, py::arg("method") = "dd", py::arg("rho") = py::none(),
      py::arg("r_s") = 2.0, py::arg("seed") = 0, py::arg("queries") = 1000, py::arg("fraction") = 0.02,
      py::arg("radius") = 2, py::arg("labels") = py::none(), py::arg("label_truth") = false,
      py::arg("supervised") = false);
  m.def("set_thread_count", &set_thread_count, py::arg("threads"));
}
