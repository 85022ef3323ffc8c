#include "stabrank/bitvec.hpp"

#include <bit>
#include <stdexcept>

namespace stabrank::f2 {

void BitVector::mask_tail() {
  std::size_t full = n_ >> 6;
  if (full < kWords) {
    std::size_t rem = n_ & 63;
    words_[full] &= rem ? ((std::uint64_t{1} << rem) - 1) : 0;
    for (std::size_t w = full + 1; w < kWords; ++w) {
      words_[w] = 0;
    }
  }
}

BitVector BitVector::ones(std::size_t n) {
  BitVector v(n);
  for (std::size_t w = 0; w < kWords; ++w) {
    v.words_[w] = ~std::uint64_t{0};
  }
  v.mask_tail();
  return v;
}

BitVector BitVector::unit(std::size_t n, std::size_t i) {
  BitVector v(n);
  v.set(i, true);
  return v;
}

BitVector BitVector::from_indices(std::size_t n, std::initializer_list<std::size_t> idx) {
  BitVector v(n);
  for (std::size_t i : idx) {
    v.set(i, true);
  }
  return v;
}

BitVector BitVector::from_bits(std::size_t n, std::uint64_t low_bits) {
  BitVector v(n);
  v.words_[0] = low_bits;
  v.mask_tail();
  return v;
}

static int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

BitVector BitVector::from_hex(std::size_t n, const std::string& hex) {
  BitVector v(n);
  std::size_t bit = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
    int d = hex_digit(*it);
    if (d < 0) {
      throw std::invalid_argument("invalid hex bitmask: " + hex);
    }
    for (int b = 0; b < 4; ++b, ++bit) {
      if (d & (1 << b)) {
        if (bit >= n) {
          throw std::invalid_argument("hex bitmask has bits beyond length");
        }
        v.set(bit, true);
      }
    }
  }
  return v;
}

std::size_t BitVector::weight() const {
  std::size_t s = 0;
  for (std::uint64_t w : words_) {
    s += std::popcount(w);
  }
  return s;
}

bool BitVector::is_zero() const {
  for (std::uint64_t w : words_) {
    if (w) return false;
  }
  return true;
}

bool BitVector::dot(const BitVector& other) const {
  if (n_ != other.n_) {
    throw std::invalid_argument("BitVector length mismatch in dot");
  }
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < kWords; ++w) {
    acc ^= words_[w] & other.words_[w];
  }
  return std::popcount(acc) & 1;
}

BitVector& BitVector::operator^=(const BitVector& o) {
  if (n_ != o.n_) {
    throw std::invalid_argument("BitVector length mismatch in xor");
  }
  for (std::size_t w = 0; w < kWords; ++w) {
    words_[w] ^= o.words_[w];
  }
  return *this;
}

BitVector& BitVector::operator&=(const BitVector& o) {
  if (n_ != o.n_) {
    throw std::invalid_argument("BitVector length mismatch in and");
  }
  for (std::size_t w = 0; w < kWords; ++w) {
    words_[w] &= o.words_[w];
  }
  return *this;
}

bool BitVector::operator<(const BitVector& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  for (std::size_t w = kWords; w-- > 0;) {
    if (words_[w] != o.words_[w]) return words_[w] < o.words_[w];
  }
  return false;
}

std::size_t BitVector::lowest_set() const {
  for (std::size_t w = 0; w < kWords; ++w) {
    if (words_[w]) {
      return (w << 6) + std::countr_zero(words_[w]);
    }
  }
  return n_;
}

std::vector<std::size_t> BitVector::set_bits() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < kWords; ++w) {
    std::uint64_t x = words_[w];
    while (x) {
      out.push_back((w << 6) + std::countr_zero(x));
      x &= x - 1;
    }
  }
  return out;
}

std::string BitVector::to_string01() const {
  std::string s;
  s.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    s.push_back(get(i) ? '1' : '0');
  }
  return s;
}

std::string BitVector::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  bool leading = true;
  std::size_t nibbles = (n_ + 3) / 4;
  for (std::size_t k = nibbles; k-- > 0;) {
    int d = 0;
    for (int b = 3; b >= 0; --b) {
      std::size_t bit = 4 * k + b;
      d = (d << 1) | (bit < n_ && get(bit) ? 1 : 0);
    }
    if (d == 0 && leading && k != 0) continue;
    leading = false;
    s.push_back(digits[d]);
  }
  if (s.empty()) s = "0";
  return s;
}

BitVector BitVector::truncated(std::size_t m) const {
  if (m > n_) {
    throw std::invalid_argument("truncated: m exceeds length");
  }
  BitVector v(m);
  v.words_ = words_;
  v.mask_tail();
  return v;
}

BitVector BitVector::gather(const std::vector<std::size_t>& idx) const {
  BitVector v(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (get(idx[i])) v.set(i, true);
  }
  return v;
}

BitVector BitVector::scatter(std::size_t n, const std::vector<std::size_t>& idx) const {
  if (idx.size() != n_) {
    throw std::invalid_argument("scatter: index count must equal length");
  }
  BitVector v(n);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (get(i)) v.set(idx[i], true);
  }
  return v;
}

std::size_t BitVector::hash() const {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
  for (std::uint64_t w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

BitMatrix::BitMatrix(std::vector<BitVector> rows) : cols_(0), rows_(std::move(rows)) {
  if (!rows_.empty()) {
    cols_ = rows_[0].size();
    for (const auto& r : rows_) {
      if (r.size() != cols_) {
        throw std::invalid_argument("BitMatrix rows have unequal lengths");
      }
    }
  }
}

void BitMatrix::append_row(const BitVector& r) {
  if (rows_.empty()) {
    cols_ = r.size();
  } else if (r.size() != cols_) {
    throw std::invalid_argument("BitMatrix::append_row length mismatch");
  }
  rows_.push_back(r);
}

RrefResult BitMatrix::rref() {
  RrefResult res;
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < cols_ && pivot_row < rows(); ++c) {
    std::size_t r = pivot_row;
    while (r < rows() && !get(r, c)) ++r;
    if (r == rows()) continue;
    swap_rows(r, pivot_row);
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i != pivot_row && get(i, c)) {
        add_row(pivot_row, i);
      }
    }
    res.pivots.push_back(c);
    ++pivot_row;
  }
  res.rank = pivot_row;
  return res;
}

std::size_t BitMatrix::rank() const {
  BitMatrix copy = *this;
  return copy.rref().rank;
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j : rows_[i].set_bits()) {
      t.set(j, i, true);
    }
  }
  return t;
}

BitVector BitMatrix::multiply(const BitVector& x) const {
  if (x.size() != cols_) {
    throw std::invalid_argument("BitMatrix::multiply dimension mismatch");
  }
  BitVector out(rows());
  for (std::size_t i = 0; i < rows(); ++i) {
    if (rows_[i].dot(x)) out.set(i, true);
  }
  return out;
}

std::vector<BitVector> BitMatrix::nullspace() const {
  BitMatrix red = *this;
  RrefResult rr = red.rref();
  std::vector<bool> is_pivot(cols_, false);
  for (std::size_t c : rr.pivots) is_pivot[c] = true;

  std::vector<BitVector> basis;
  for (std::size_t f = 0; f < cols_; ++f) {
    if (is_pivot[f]) continue;
    BitVector v(cols_);
    v.set(f, true);
    // Row i pins pivot column pivots[i]: value = entry of the row at column f.
    for (std::size_t i = 0; i < rr.rank; ++i) {
      if (red.get(i, f)) v.set(rr.pivots[i], true);
    }
    basis.push_back(v);
  }
  return basis;
}

std::size_t diameter(const std::vector<BitVector>& points) {
  if (points.empty()) {
    throw std::invalid_argument("diameter of an empty point set");
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      std::size_t d = (points[i] ^ points[j]).weight();
      if (d > best) best = d;
    }
  }
  return best;
}

}  // namespace stabrank::f2
