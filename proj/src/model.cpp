#include "ghs/model.hpp"

#include <fstream>
#include <limits>

#include "ghs/binary_io.hpp"

namespace ghs {

using binio::read_le;
using binio::write_le;

std::size_t HashModel::bits() const {
  return is_lsh() ? embedding.output_dim() : constellation.bits();
}

HashModel make_lsh_model(const LshModel& lsh) {
  HashModel model;
  model.embedding.kind = EmbeddingKind::lsh;
  model.embedding.mean = lsh.mean;
  model.embedding.projection = lsh.projection;
  model.embedding.scale = 1.0;
  return model;
}

CodeMatrix hash_vectors(const HashModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.embedding.input_dim()) {
    throw Error("dimension mismatch: model expects " + std::to_string(model.embedding.input_dim()) +
                " columns, input has " + std::to_string(x.cols()));
  }
  if (model.is_lsh()) {
    return lsh_encode(x, LshModel{model.embedding.mean, model.embedding.projection, 0});
  }
  if (x.rows() == 0) return CodeMatrix(0, model.constellation.bits());
  return encode(embed(model.embedding, x), model.constellation);
}

namespace {

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw Error(std::string("write_model: ") + what + " too large");
  return static_cast<std::uint32_t>(v);
}

void write_block(std::ostream& out, const double* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) write_le<double>(out, data[i]);
}

void read_block(std::istream& in, double* data, std::size_t count, const char* what) {
  for (std::size_t i = 0; i < count; ++i) data[i] = read_le<double>(in, what);
}

}  // namespace

void write_model(std::ostream& out, const HashModel& model) {
  const EmbeddingModel& emb = model.embedding;
  const std::size_t dim_in = emb.input_dim();
  const std::size_t dim_out = emb.output_dim();
  if (static_cast<std::size_t>(emb.mean.size()) != dim_in) throw Error("write_model: mean length mismatch");
  const std::size_t c = model.bits();
  if (!model.is_lsh()) {
    model.constellation.validate();
    if (model.constellation.dim() != dim_out) throw Error("write_model: satellite dimension mismatch");
  }

  binio::write_magic(out, "GHS1");
  write_le<std::uint32_t>(out, kModelVersion);
  write_le<std::uint8_t>(out, static_cast<std::uint8_t>(emb.kind));
  write_le<std::uint32_t>(out, checked_u32(dim_in, "D"));
  write_le<std::uint32_t>(out, checked_u32(dim_out, "d"));
  write_le<std::uint32_t>(out, checked_u32(c, "c"));
  write_le<double>(out, model.is_lsh() ? 0.0 : model.constellation.r_s);
  write_block(out, emb.mean.data(), dim_in);
  write_block(out, emb.projection.data(), dim_in * dim_out);  // row-major storage
  write_le<double>(out, emb.scale);

  if (model.is_lsh()) {
    write_le<std::uint32_t>(out, 0);
  } else {
    const Constellation& con = model.constellation;
    write_le<std::uint32_t>(out, checked_u32(con.groups.size(), "group count"));
    for (const Group& g : con.groups) {
      write_le<std::uint32_t>(out, g.start);
      write_le<std::uint32_t>(out, g.len);
    }
    write_block(out, con.satellites.data(), c * dim_out);
    write_block(out, con.thresholds.data(), c);
  }
  if (!out) throw Error("write_model: write failed");
}

HashModel read_model(std::istream& in) {
  binio::expect_magic(in, "GHS1");
  const auto version = read_le<std::uint32_t>(in, "version");
  if (version != kModelVersion) throw Error("read_model: unsupported version " + std::to_string(version));
  const auto kind_raw = read_le<std::uint8_t>(in, "kind");
  if (kind_raw > static_cast<std::uint8_t>(EmbeddingKind::lsh)) throw Error("read_model: unknown embedding kind");
  const auto dim_in = read_le<std::uint32_t>(in, "D");
  const auto dim_out = read_le<std::uint32_t>(in, "d");
  const auto c = read_le<std::uint32_t>(in, "c");
  if (dim_in == 0 || dim_out == 0 || c == 0) throw Error("read_model: zero dimension in header");

  HashModel model;
  EmbeddingModel& emb = model.embedding;
  emb.kind = static_cast<EmbeddingKind>(kind_raw);
  const double r_s = read_le<double>(in, "r_s");
  emb.mean.resize(dim_in);
  read_block(in, emb.mean.data(), dim_in, "mean");
  emb.projection.resize(dim_in, dim_out);
  read_block(in, emb.projection.data(), std::size_t{dim_in} * dim_out, "projection");
  emb.scale = read_le<double>(in, "scale");
  if (!(emb.scale > 0.0)) throw Error("read_model: scale must be positive");

  const auto group_count = read_le<std::uint32_t>(in, "group count");
  if (model.is_lsh()) {
    if (dim_out != c || group_count != 0) throw Error("read_model: malformed lsh model");
    return model;
  }

  Constellation& con = model.constellation;
  con.r_s = r_s;
  con.rho = static_cast<double>(c) / (static_cast<double>(dim_out) + 1.0);
  con.groups.resize(group_count);
  for (Group& g : con.groups) {
    g.start = read_le<std::uint32_t>(in, "group start");
    g.len = read_le<std::uint32_t>(in, "group length");
  }
  con.satellites.resize(c, dim_out);
  read_block(in, con.satellites.data(), std::size_t{c} * dim_out, "satellites");
  con.thresholds.resize(c);
  read_block(in, con.thresholds.data(), c, "thresholds");
  con.validate();
  return model;
}

void write_model(const std::filesystem::path& path, const HashModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_model(out, model);
}

HashModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_model(in);
}

}  // namespace ghs
