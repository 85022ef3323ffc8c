#include "stabrank/boolean.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace stabrank::approx {

namespace {

constexpr std::uint64_t kHalfMasks[6] = {
    0x5555555555555555ull, 0x3333333333333333ull, 0x0f0f0f0f0f0f0f0full,
    0x00ff00ff00ff00ffull, 0x0000ffff0000ffffull, 0x00000000ffffffffull,
};

// In-place xor-butterfly: a[x] ^= a[x ^ 2^i] for every x with bit i set.
// Self-inverse over F2; maps truth tables to ANF coefficients and back.
void moebius(std::vector<std::uint64_t>& words, std::size_t m) {
  for (std::size_t i = 0; i < m && i < 6; ++i) {
    std::uint64_t shift = std::uint64_t{1} << i;
    for (auto& w : words) {
      w ^= (w & kHalfMasks[i]) << shift;
    }
  }
  for (std::size_t i = 6; i < m; ++i) {
    std::size_t block = std::size_t{1} << (i - 6);
    for (std::size_t base = 0; base < words.size(); base += 2 * block) {
      for (std::size_t k = 0; k < block; ++k) {
        words[base + block + k] ^= words[base + k];
      }
    }
  }
}

}  // namespace

BooleanFunction::BooleanFunction(std::size_t m) : m_(m) {
  if (m > kBooleanMaxM) {
    throw guard_error("BooleanFunction: arity exceeds the dense guard");
  }
  words_.assign(std::max<std::size_t>(1, (std::size_t{1} << m) >> 6), 0);
}

BooleanFunction BooleanFunction::constant(std::size_t m, bool v) {
  BooleanFunction f(m);
  if (v) {
    for (auto& w : f.words_) w = ~std::uint64_t{0};
    if (m < 6) f.words_[0] = (std::uint64_t{1} << (std::size_t{1} << m)) - 1;
  }
  return f;
}

BooleanFunction BooleanFunction::majority(std::size_t m) {
  // tie convention: |x| >= m/2 counts as 1
  return threshold_weight(m, (m + 1) / 2);
}

BooleanFunction BooleanFunction::threshold_weight(std::size_t m, std::size_t k) {
  BooleanFunction f(m);
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << m); ++x) {
    if (std::popcount(x) >= static_cast<int>(k)) f.set(x, true);
  }
  return f;
}

std::uint64_t BooleanFunction::count_ones() const {
  std::uint64_t s = 0;
  for (std::uint64_t w : words_) s += std::popcount(w);
  return s;
}

std::uint64_t BooleanFunction::count_disagree(const BooleanFunction& o) const {
  if (m_ != o.m_) {
    throw std::invalid_argument("count_disagree: arity mismatch");
  }
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    s += std::popcount(words_[i] ^ o.words_[i]);
  }
  return s;
}

BooleanFunction& BooleanFunction::operator^=(const BooleanFunction& o) {
  if (m_ != o.m_) throw std::invalid_argument("xor: arity mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
  return *this;
}

BooleanFunction& BooleanFunction::operator&=(const BooleanFunction& o) {
  if (m_ != o.m_) throw std::invalid_argument("and: arity mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

void BooleanFunction::invert() {
  for (auto& w : words_) w = ~w;
  if (m_ < 6) words_[0] &= (std::uint64_t{1} << (std::size_t{1} << m_)) - 1;
}

BooleanFunction BooleanFunction::restricted(const std::vector<std::size_t>& d) const {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] >= m_ || (i && d[i] <= d[i - 1])) {
      throw std::invalid_argument("restricted: index set must be sorted within range");
    }
  }
  BooleanFunction g(d.size());
  for (std::uint32_t xb = 0; xb < (std::uint32_t{1} << d.size()); ++xb) {
    std::uint32_t x = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if ((xb >> i) & 1) x |= std::uint32_t{1} << d[i];
    }
    if (get(x)) g.set(xb, true);
  }
  return g;
}

F2Polynomial::F2Polynomial(std::size_t m, std::vector<std::uint32_t> monomials)
    : m_(m), monomials_(std::move(monomials)) {
  std::sort(monomials_.begin(), monomials_.end());
  monomials_.erase(std::unique(monomials_.begin(), monomials_.end()),
                   monomials_.end());
  for (std::uint32_t mono : monomials_) {
    if (m_ < 32 && (mono >> m_)) {
      throw std::invalid_argument("F2Polynomial: monomial uses variables beyond arity");
    }
  }
}

F2Polynomial F2Polynomial::from_affine(const AffineForm& a) {
  std::vector<std::uint32_t> monos;
  for (std::size_t i : a.coeffs().set_bits()) {
    monos.push_back(std::uint32_t{1} << i);
  }
  if (a.constant()) monos.push_back(0);
  return F2Polynomial(a.arity(), std::move(monos));
}

F2Polynomial F2Polynomial::from_truth_table(const BooleanFunction& f) {
  std::vector<std::uint64_t> words = f.words();
  moebius(words, f.arity());
  std::vector<std::uint32_t> monos;
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t bits = words[w];
    while (bits) {
      monos.push_back(static_cast<std::uint32_t>((w << 6) + std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return F2Polynomial(f.arity(), std::move(monos));
}

std::size_t F2Polynomial::degree() const {
  std::size_t d = 0;
  for (std::uint32_t mono : monomials_) {
    d = std::max<std::size_t>(d, std::popcount(mono));
  }
  return d;
}

bool F2Polynomial::eval(std::uint32_t x) const {
  int acc = 0;
  for (std::uint32_t mono : monomials_) {
    acc ^= ((x & mono) == mono) ? 1 : 0;
  }
  return acc;
}

BooleanFunction F2Polynomial::truth_table() const {
  BooleanFunction f(m_);
  for (std::uint32_t mono : monomials_) f.set(mono, true);
  moebius(f.words(), m_);
  return f;
}

}  // namespace stabrank::approx
