#include "ghs/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ghs/binary_io.hpp"

namespace ghs {

VectorFormat parse_format(const std::string& name) {
  if (name == "fvecs") return VectorFormat::fvecs;
  if (name == "bvecs") return VectorFormat::bvecs;
  if (name == "ivecs") return VectorFormat::ivecs;
  if (name == "csv") return VectorFormat::csv;
  throw Error("unknown vector format '" + name + "'");
}

VectorFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".fvecs") return VectorFormat::fvecs;
  if (ext == ".bvecs") return VectorFormat::bvecs;
  if (ext == ".ivecs") return VectorFormat::ivecs;
  return VectorFormat::csv;
}

const char* to_string(VectorFormat format) {
  switch (format) {
    case VectorFormat::fvecs: return "fvecs";
    case VectorFormat::bvecs: return "bvecs";
    case VectorFormat::ivecs: return "ivecs";
    case VectorFormat::csv: return "csv";
  }
  return "unknown";
}

namespace {

Matrix to_matrix(const std::vector<double>& values, std::size_t rows, std::size_t cols) {
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (rows * cols > 0) std::copy(values.begin(), values.end(), out.data());
  return out;
}

template <class Element>
Matrix read_binary(std::istream& in, std::optional<std::size_t> limit) {
  std::vector<double> values;
  std::size_t dim = 0;
  std::size_t rows = 0;
  while (!limit || rows < *limit) {
    if (in.peek() == std::char_traits<char>::eof()) break;
    std::int32_t record_dim;
    try {
      record_dim = binio::read_le<std::int32_t>(in, "record header");
    } catch (const Error&) {
      throw Error("truncated record header at record " + std::to_string(rows));
    }
    if (record_dim <= 0) throw Error("non-positive dimension at record " + std::to_string(rows));
    if (rows == 0) {
      dim = static_cast<std::size_t>(record_dim);
    } else if (static_cast<std::size_t>(record_dim) != dim) {
      throw Error("dimension mismatch at record " + std::to_string(rows) + ": expected " + std::to_string(dim) +
                  ", found " + std::to_string(record_dim));
    }
    for (std::size_t k = 0; k < dim; ++k) {
      Element v;
      try {
        v = binio::read_le<Element>(in, "vector payload");
      } catch (const Error&) {
        throw Error("truncated record " + std::to_string(rows));
      }
      values.push_back(static_cast<double>(v));
    }
    ++rows;
  }
  return to_matrix(values, rows, dim);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

Matrix read_csv(std::istream& in, std::optional<std::size_t> limit) {
  std::vector<double> values;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while ((!limit || rows < *limit) && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      double v;
      if (!parse_double(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows == 0 && line_no == 1) continue;  // header
      throw Error("non-numeric field on line " + std::to_string(line_no));
    }
    if (rows == 0) {
      dim = row.size();
    } else if (row.size() != dim) {
      throw Error("dimension mismatch at record " + std::to_string(rows) + " (line " + std::to_string(line_no) + ")");
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  return to_matrix(values, rows, dim);
}

template <class Element>
void write_binary(std::ostream& out, const Matrix& x) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    binio::write_le<std::int32_t>(out, static_cast<std::int32_t>(x.cols()));
    for (Eigen::Index k = 0; k < x.cols(); ++k) binio::write_le<Element>(out, static_cast<Element>(x(i, k)));
  }
}

}  // namespace

Matrix read_vectors(const std::filesystem::path& path, VectorFormat format, std::optional<std::size_t> limit) {
  std::ifstream in(path, format == VectorFormat::csv ? std::ios::in : std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  Matrix x;
  switch (format) {
    case VectorFormat::fvecs: x = read_binary<float>(in, limit); break;
    case VectorFormat::bvecs: x = read_binary<std::uint8_t>(in, limit); break;
    case VectorFormat::ivecs: x = read_binary<std::int32_t>(in, limit); break;
    case VectorFormat::csv: x = read_csv(in, limit); break;
  }
  if (!x.allFinite()) throw Error("non-finite value in " + path.string());
  return x;
}

Matrix read_vectors(const DatasetSpec& spec) {
  Matrix x = read_vectors(spec.path, spec.format, spec.limit);
  if (spec.query_count > 0 && spec.query_count >= static_cast<std::size_t>(x.rows())) {
    throw Error("query count must be smaller than the number of rows");
  }
  return x;
}

void write_vectors(const std::filesystem::path& path, const Matrix& x, VectorFormat format) {
  std::ofstream out(path, format == VectorFormat::csv ? std::ios::out : std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  switch (format) {
    case VectorFormat::fvecs: write_binary<float>(out, x); break;
    case VectorFormat::bvecs: write_binary<std::uint8_t>(out, x); break;
    case VectorFormat::ivecs: write_binary<std::int32_t>(out, x); break;
    case VectorFormat::csv:
      out.precision(std::numeric_limits<double>::max_digits10);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index k = 0; k < x.cols(); ++k) out << (k ? "," : "") << x(i, k);
        out << '\n';
      }
      break;
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string first = line.substr(0, line.find(','));
    double v;
    if (!parse_double(first, v)) {
      if (line_no == 1) continue;
      throw Error("bad label on line " + std::to_string(line_no));
    }
    if (v < 0 || v != std::floor(v)) throw Error("labels must be non-negative integers (line " + std::to_string(line_no) + ")");
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

Split split(const Matrix& x, std::size_t query_count, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (query_count > 0 && query_count >= n) throw Error("split: query count must be smaller than n");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first query_count slots are the sample.
  for (std::size_t i = 0; i < query_count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  Split out;
  out.query_index.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(query_count));
  std::sort(out.query_index.begin(), out.query_index.end());
  std::vector<char> is_query(n, 0);
  for (std::size_t q : out.query_index) is_query[q] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_query[i]) out.train_index.push_back(i);
  }
  out.train.resize(static_cast<Eigen::Index>(out.train_index.size()), x.cols());
  for (std::size_t r = 0; r < out.train_index.size(); ++r) {
    out.train.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(out.train_index[r]));
  }
  out.queries.resize(static_cast<Eigen::Index>(query_count), x.cols());
  for (std::size_t r = 0; r < query_count; ++r) {
    out.queries.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(out.query_index[r]));
  }
  return out;
}

std::vector<int> gather(const std::vector<int>& values, const std::vector<std::size_t>& index) {
  std::vector<int> out;
  out.reserve(index.size());
  for (std::size_t i : index) out.push_back(values.at(i));
  return out;
}

SyntheticData make_synthetic(SyntheticKind kind, std::size_t n, std::size_t d, std::size_t clusters,
                             std::uint64_t seed, const ClusterShape& shape) {
  if (n < 1) throw Error("make_synthetic: need n >= 1");
  if (d < 1) throw Error("make_synthetic: need d >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto direction = [&](double radius) {
    Eigen::RowVectorXd v(static_cast<Eigen::Index>(d));
    double norm = 0.0;
    while (norm == 0.0) {
      for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = gauss(rng);
      norm = v.norm();
    }
    return Eigen::RowVectorXd(v * (radius / norm));
  };

  SyntheticData out;
  out.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  out.labels.assign(n, 0);
  if (kind == SyntheticKind::uniform_ball) {
    // Radius U^{1/d} makes the radial CDF r^d.
    const double inv_d = 1.0 / static_cast<double>(d);
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::RowVectorXd dir = direction(1.0);
      out.points.row(static_cast<Eigen::Index>(i)) = dir * std::pow(unit(rng), inv_d);
    }
    return out;
  }

  if (clusters < 1) throw Error("make_synthetic: need at least one cluster");
  Matrix centers(static_cast<Eigen::Index>(clusters), static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < centers.rows(); ++c) centers.row(c) = direction(shape.center_radius);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(clusters) - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = pick(rng);
    out.labels[i] = label;
    auto row = out.points.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index k = 0; k < row.size(); ++k) row(k) = centers(label, k) + shape.noise * gauss(rng);
  }
  return out;
}

}  // namespace ghs
