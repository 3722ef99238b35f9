#include "ghs/codes.hpp"

#include <bit>
#include <fstream>
#include <limits>

#include "ghs/binary_io.hpp"

namespace ghs {

namespace {

std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

std::uint64_t pad_mask(std::size_t bits) {
  const std::size_t used = bits % 64;
  return used == 0 ? 0 : ~((std::uint64_t{1} << used) - 1);
}

}  // namespace

CodeMatrix::CodeMatrix(std::size_t rows, std::size_t bits)
    : rows_(rows), bits_(bits), words_per_row_(words_for(bits)), words_(rows * words_for(bits), 0) {
  if (bits == 0) throw Error("CodeMatrix: code length must be at least 1");
}

CodeMatrix CodeMatrix::from_words(std::size_t rows, std::size_t bits, std::vector<std::uint64_t> words) {
  CodeMatrix out(rows, bits);
  if (words.size() != out.words_.size()) throw Error("CodeMatrix: word count does not match n and c");
  const std::uint64_t mask = pad_mask(bits);
  if (mask != 0) {
    for (std::size_t i = 0; i < rows; ++i) {
      if (words[i * out.words_per_row_ + out.words_per_row_ - 1] & mask) {
        throw Error("CodeMatrix: nonzero pad bits in row " + std::to_string(i));
      }
    }
  }
  out.words_ = std::move(words);
  return out;
}

void CodeMatrix::set_bit(std::size_t i, std::size_t j, bool value) {
  auto& word = words_[i * words_per_row_ + j / 64];
  const std::uint64_t m = std::uint64_t{1} << (j % 64);
  word = value ? (word | m) : (word & ~m);
}

long CodeMatrix::column_sum(std::size_t j) const {
  long plus = 0;
  for (std::size_t i = 0; i < rows_; ++i) plus += bit(i, j) ? 1 : 0;
  return 2 * plus - static_cast<long>(rows_);
}

std::size_t hamming(CodeRow a, CodeRow b) {
  if (a.size() != b.size()) throw Error("hamming: code length mismatch");
  std::size_t sum = 0;
  for (std::size_t w = 0; w < a.size(); ++w) sum += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
  return sum;
}

std::vector<std::size_t> rank_by_hamming(CodeRow query, const CodeMatrix& base, std::size_t k) {
  if (query.size() != base.words_per_row()) throw Error("rank_by_hamming: code length mismatch");
  if (k > base.rows()) throw Error("rank_by_hamming: k exceeds base size");
  const std::size_t n = base.rows();
  std::vector<std::uint32_t> dist(n);
  std::vector<std::size_t> bucket_start(base.bits() + 2, 0);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = static_cast<std::uint32_t>(hamming(query, base.row(i)));
    ++bucket_start[dist[i] + 1];
  }
  for (std::size_t h = 1; h < bucket_start.size(); ++h) bucket_start[h] += bucket_start[h - 1];

  // Stable counting sort; only slots below k are kept.
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = bucket_start[dist[i]]++;
    if (slot < k) out[slot] = i;
  }
  return out;
}

std::vector<std::size_t> lookup_within_radius(CodeRow query, const CodeMatrix& base, std::size_t radius) {
  if (query.size() != base.words_per_row()) throw Error("lookup_within_radius: code length mismatch");
  if (radius > base.bits()) throw Error("lookup_within_radius: radius exceeds code length");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < base.rows(); ++i) {
    if (hamming(query, base.row(i)) <= radius) out.push_back(i);
  }
  return out;
}

void write_codes(std::ostream& out, const CodeMatrix& codes) {
  using binio::write_le;
  if (codes.rows() > std::numeric_limits<std::uint32_t>::max()) throw Error("write_codes: too many rows");
  binio::write_magic(out, "GHSC");
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(codes.rows()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(codes.bits()));
  for (std::uint64_t w : codes.words()) write_le<std::uint64_t>(out, w);
  if (!out) throw Error("write_codes: write failed");
}

CodeMatrix read_codes(std::istream& in) {
  using binio::read_le;
  binio::expect_magic(in, "GHSC");
  const auto n = read_le<std::uint32_t>(in, "code count");
  const auto c = read_le<std::uint32_t>(in, "code length");
  if (c == 0) throw Error("read_codes: zero code length");
  std::vector<std::uint64_t> words(static_cast<std::size_t>(n) * words_for(c));
  for (auto& w : words) w = read_le<std::uint64_t>(in, "code words");
  return CodeMatrix::from_words(n, c, std::move(words));
}

void write_codes(const std::filesystem::path& path, const CodeMatrix& codes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_codes(out, codes);
}

CodeMatrix read_codes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_codes(in);
}

}  // namespace ghs
