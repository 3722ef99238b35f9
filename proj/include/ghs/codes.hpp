#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace ghs {

/// n x c binary codes packed 64 bits per word, row after row. Bit j of a
/// row lives in word j/64 at position j%64; a set bit means code +1, a
/// clear bit means -1. Pad bits past c are always zero.
class CodeMatrix {
 public:
  CodeMatrix() = default;
  CodeMatrix(std::size_t rows, std::size_t bits);

  /// Adopts raw words; throws if the size is wrong or pad bits are set.
  static CodeMatrix from_words(std::size_t rows, std::size_t bits, std::vector<std::uint64_t> words);

  std::size_t rows() const { return rows_; }
  std::size_t bits() const { return bits_; }
  std::size_t words_per_row() const { return words_per_row_; }

  std::span<const std::uint64_t> row(std::size_t i) const {
    return {words_.data() + i * words_per_row_, words_per_row_};
  }
  std::span<std::uint64_t> row(std::size_t i) { return {words_.data() + i * words_per_row_, words_per_row_}; }

  bool bit(std::size_t i, std::size_t j) const {
    return (words_[i * words_per_row_ + j / 64] >> (j % 64)) & 1u;
  }
  void set_bit(std::size_t i, std::size_t j, bool value);

  /// +1 or -1.
  int code(std::size_t i, std::size_t j) const { return bit(i, j) ? 1 : -1; }

  /// Sum of codes in column j, i.e. #(+1) - #(-1).
  long column_sum(std::size_t j) const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const CodeMatrix&, const CodeMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t bits_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

using CodeRow = std::span<const std::uint64_t>;

std::size_t hamming(CodeRow a, CodeRow b);

/// Indices of the k nearest base rows by Hamming distance, nearest first,
/// ties by ascending index. Uses counting buckets over the 0..c distance range.
std::vector<std::size_t> rank_by_hamming(CodeRow query, const CodeMatrix& base, std::size_t k);

/// All base indices within the radius, ascending.
std::vector<std::size_t> lookup_within_radius(CodeRow query, const CodeMatrix& base, std::size_t radius);

/// GHSC code file: "GHSC", u32 n, u32 c, then n * ceil(c/64) u64 words,
/// all little-endian.
void write_codes(std::ostream& out, const CodeMatrix& codes);
CodeMatrix read_codes(std::istream& in);
void write_codes(const std::filesystem::path& path, const CodeMatrix& codes);
CodeMatrix read_codes(const std::filesystem::path& path);

}  // namespace ghs
