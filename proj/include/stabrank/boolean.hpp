#pragma once

#include <cstdint>
#include <vector>

#include "stabrank/affine.hpp"

namespace stabrank::approx {

using f2::AffineForm;
using f2::AffineSubspace;
using f2::BitVector;

// Dense truth table of a boolean function on m <= kBooleanMaxM bits, packed
// 64 inputs per word. Input x is addressed by its integer value.
class BooleanFunction {
 public:
  BooleanFunction() : BooleanFunction(0) {}
  explicit BooleanFunction(std::size_t m);

  static BooleanFunction constant(std::size_t m, bool v);
  static BooleanFunction majority(std::size_t m);  // |x| >= m/2
  static BooleanFunction threshold_weight(std::size_t m, std::size_t k);  // |x| >= k

  std::size_t arity() const { return m_; }
  std::size_t table_size() const { return std::size_t{1} << m_; }

  bool get(std::uint32_t x) const {
    return (words_[x >> 6] >> (x & 63)) & 1u;
  }
  void set(std::uint32_t x, bool v) {
    std::uint64_t mask = std::uint64_t{1} << (x & 63);
    if (v) {
      words_[x >> 6] |= mask;
    } else {
      words_[x >> 6] &= ~mask;
    }
  }
  void flip(std::uint32_t x) { words_[x >> 6] ^= std::uint64_t{1} << (x & 63); }

  std::uint64_t count_ones() const;
  std::uint64_t count_disagree(const BooleanFunction& o) const;
  BooleanFunction& operator^=(const BooleanFunction& o);
  BooleanFunction& operator&=(const BooleanFunction& o);
  void invert();

  bool operator==(const BooleanFunction& o) const {
    return m_ == o.m_ && words_ == o.words_;
  }

  // g(xbar) = f(embed of xbar into the sorted index set d, zeros elsewhere).
  BooleanFunction restricted(const std::vector<std::size_t>& d) const;

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

 private:
  std::size_t m_;
  std::vector<std::uint64_t> words_;
};

// Multilinear polynomial over F2 in m variables: a set of monomial bitmasks.
// Evaluation is the parity of satisfied monomials; the representation is the
// (unique) algebraic normal form.
class F2Polynomial {
 public:
  F2Polynomial() : m_(0) {}
  F2Polynomial(std::size_t m, std::vector<std::uint32_t> monomials);

  static F2Polynomial zero(std::size_t m) { return F2Polynomial(m, {}); }
  static F2Polynomial one(std::size_t m) { return F2Polynomial(m, {0}); }
  static F2Polynomial from_affine(const AffineForm& a);
  // Moebius transform of the truth table.
  static F2Polynomial from_truth_table(const BooleanFunction& f);

  std::size_t arity() const { return m_; }
  std::size_t size() const { return monomials_.size(); }
  std::size_t degree() const;
  const std::vector<std::uint32_t>& monomials() const { return monomials_; }

  bool eval(std::uint32_t x) const;
  BooleanFunction truth_table() const;

  bool operator==(const F2Polynomial& o) const {
    return m_ == o.m_ && monomials_ == o.monomials_;
  }

 private:
  std::size_t m_;
  std::vector<std::uint32_t> monomials_;  // sorted, unique
};

}  // namespace stabrank::approx
