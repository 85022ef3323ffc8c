#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stabrank/config.hpp"

namespace stabrank::f2 {

// A vector over F2 of length n <= kMaxBits, packed into 64-bit words.
// Bits at positions >= n are kept zero at all times.
class BitVector {
 public:
  static constexpr std::size_t kWords = kMaxBits / 64;

  BitVector() : n_(0) {}
  explicit BitVector(std::size_t n) : n_(n) { check_length(n); }

  static BitVector zeros(std::size_t n) { return BitVector(n); }
  static BitVector ones(std::size_t n);
  static BitVector unit(std::size_t n, std::size_t i);
  static BitVector from_indices(std::size_t n, std::initializer_list<std::size_t> idx);
  static BitVector from_bits(std::size_t n, std::uint64_t low_bits);
  // Hex masks use bit i of the integer value for coordinate i.
  static BitVector from_hex(std::size_t n, const std::string& hex);

  std::size_t size() const { return n_; }

  bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool v) {
    std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::size_t weight() const;
  bool is_zero() const;
  // Parity of <*this, other>, i.e. popcount(a & b) mod 2.
  bool dot(const BitVector& other) const;

  BitVector& operator^=(const BitVector& o);
  BitVector& operator&=(const BitVector& o);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }

  bool operator==(const BitVector& o) const {
    return n_ == o.n_ && words_ == o.words_;
  }
  bool operator!=(const BitVector& o) const { return !(*this == o); }
  // Lexicographic on (length, coordinates as little-endian integer).
  bool operator<(const BitVector& o) const;

  // Index of the lowest set bit, or size() if zero.
  std::size_t lowest_set() const;
  std::vector<std::size_t> set_bits() const;

  std::string to_string01() const;
  std::string to_hex() const;

  // Truncated view: keeps coordinates [0, m), m <= n.
  BitVector truncated(std::size_t m) const;
  // Gather the coordinates listed in idx into a fresh vector of length idx.size().
  BitVector gather(const std::vector<std::size_t>& idx) const;
  // Scatter this vector (length idx.size()) into an n-bit vector at positions idx.
  BitVector scatter(std::size_t n, const std::vector<std::size_t>& idx) const;

  std::uint64_t word(std::size_t w) const { return words_[w]; }
  std::size_t hash() const;

 private:
  static void check_length(std::size_t n) {
    if (n > kMaxBits) {
      throw guard_error("BitVector length exceeds STABRANK_MAX_BITS");
    }
  }
  void mask_tail();

  std::array<std::uint64_t, kWords> words_{};
  std::uint32_t n_;
};

struct RrefResult {
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;  // pivot column per reduced row, ascending
};

// A matrix over F2 stored as rows of equal length.
class BitMatrix {
 public:
  BitMatrix() : cols_(0) {}
  BitMatrix(std::size_t rows, std::size_t cols)
      : cols_(cols), rows_(rows, BitVector(cols)) {}
  explicit BitMatrix(std::vector<BitVector> rows);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }

  const BitVector& row(std::size_t i) const { return rows_[i]; }
  BitVector& row(std::size_t i) { return rows_[i]; }
  bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
  void set(std::size_t i, std::size_t j, bool v) { rows_[i].set(j, v); }

  void append_row(const BitVector& r);
  void swap_rows(std::size_t a, std::size_t b) { std::swap(rows_[a], rows_[b]); }
  // rows_[dst] += rows_[src]
  void add_row(std::size_t src, std::size_t dst) { rows_[dst] ^= rows_[src]; }

  // In-place reduced row echelon form; returns rank and pivot columns.
  RrefResult rref();
  std::size_t rank() const;
  BitMatrix transpose() const;
  // Matrix-vector product over F2; x has cols() coordinates.
  BitVector multiply(const BitVector& x) const;
  // Basis of {c : M c = 0} where rows of M act as linear functionals.
  std::vector<BitVector> nullspace() const;

  bool operator==(const BitMatrix& o) const {
    return cols_ == o.cols_ && rows_ == o.rows_;
  }

 private:
  std::size_t cols_;
  std::vector<BitVector> rows_;
};

// Exact maximal pairwise Hamming distance; quadratic scan.
std::size_t diameter(const std::vector<BitVector>& points);

}  // namespace stabrank::f2

template <>
struct std::hash<stabrank::f2::BitVector> {
  std::size_t operator()(const stabrank::f2::BitVector& v) const {
    return v.hash();
  }
};
