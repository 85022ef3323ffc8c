#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include <gmpxx.h>

#include "stabrank/bitvec.hpp"

namespace stabrank::f2 {

// a(x) = <coeffs, x> + constant over F2.
class AffineForm {
 public:
  AffineForm() : coeffs_(0), constant_(false) {}
  AffineForm(BitVector coeffs, bool constant)
      : coeffs_(std::move(coeffs)), constant_(constant) {}

  static AffineForm zero(std::size_t n) { return AffineForm(BitVector(n), false); }

  std::size_t arity() const { return coeffs_.size(); }
  const BitVector& coeffs() const { return coeffs_; }
  bool constant() const { return constant_; }
  bool is_zero() const { return !constant_ && coeffs_.is_zero(); }

  bool eval(const BitVector& x) const { return coeffs_.dot(x) ^ constant_; }

  AffineForm& operator+=(const AffineForm& o) {
    coeffs_ ^= o.coeffs_;
    constant_ ^= o.constant_;
    return *this;
  }
  friend AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
  bool operator==(const AffineForm& o) const {
    return coeffs_ == o.coeffs_ && constant_ == o.constant_;
  }

 private:
  BitVector coeffs_;
  bool constant_;
};

// q(x) = sum_{i<j} quad_ij x_i x_j + <linear, x> + constant over F2.
// The quadratic coefficient matrix is kept strictly upper triangular;
// x_i^2 = x_i is folded into the linear part at construction.
class QuadraticForm {
 public:
  explicit QuadraticForm(std::size_t n)
      : n_(n), quad_(n, n), linear_(n), constant_(false) {}
  QuadraticForm(BitMatrix quad, BitVector linear, bool constant);

  static QuadraticForm zero(std::size_t n) { return QuadraticForm(n); }

  std::size_t arity() const { return n_; }
  const BitMatrix& quad() const { return quad_; }
  const BitVector& linear() const { return linear_; }
  bool constant() const { return constant_; }

  void set_quad(std::size_t i, std::size_t j);  // adds the monomial x_i x_j
  void set_linear(std::size_t i) { linear_.flip(i); }
  void set_constant(bool c) { constant_ = c; }

  bool eval(const BitVector& x) const;
  // Delta_y(q)(x) = q(x) + q(x+y); always affine in x.
  AffineForm directional_derivative(const BitVector& y) const;

  bool operator==(const QuadraticForm& o) const {
    return n_ == o.n_ && quad_ == o.quad_ && linear_ == o.linear_ &&
           constant_ == o.constant_;
  }

 private:
  std::size_t n_;
  BitMatrix quad_;
  BitVector linear_;
  bool constant_;
};

// Solution set of M x = b, kept in two synchronized representations:
// canonical RREF constraints and offset + nullspace basis. The empty set is
// an explicit state rather than an exception, since the witness engine
// branches on emptiness.
class AffineSubspace {
 public:
  // Default-constructed state is the empty set over an ambient of 0.
  AffineSubspace() = default;

  static AffineSubspace whole(std::size_t n);
  static AffineSubspace empty(std::size_t n);
  static AffineSubspace point(const BitVector& v);
  // b lives in F2^rows: bit i is the right-hand side of row i.
  static AffineSubspace from_constraints(const BitMatrix& m, const BitVector& b);
  static AffineSubspace from_parametric(const BitVector& offset,
                                        const std::vector<BitVector>& basis);

  std::size_t ambient() const { return n_; }
  bool is_empty() const { return empty_; }
  std::size_t dim() const;
  std::size_t codim() const;

  // Constraint form (canonical RREF, full row rank).
  const BitMatrix& constraints() const { return require(), m_; }
  const BitVector& rhs() const { return require(), b_; }
  const std::vector<std::size_t>& pivots() const { return require(), pivots_; }
  // Parametric form.
  const BitVector& offset() const { return require(), offset_; }
  const std::vector<BitVector>& basis() const { return require(), basis_; }

  bool contains(const BitVector& x) const;
  // Independent membership route through the parametric form (for tests).
  bool contains_parametric(const BitVector& x) const;

  // offset + sum of basis vectors selected by the low bits of `combo`.
  BitVector element_from_combination(std::uint64_t combo) const;
  // Visits all 2^dim elements; guarded by the caller.
  void for_each_element(const std::function<void(const BitVector&)>& fn) const;

  bool same_set(const AffineSubspace& o) const;

 private:
  void require() const {
    if (empty_) throw std::domain_error("operation on an empty affine subspace");
  }

  std::size_t n_ = 0;
  bool empty_ = true;
  BitMatrix m_;
  BitVector b_;
  BitVector offset_;
  std::vector<BitVector> basis_;
  std::vector<std::size_t> pivots_;
};

// --- module operations ---

// (rank, reduced, pivots); the input is left untouched.
std::tuple<std::size_t, BitMatrix, std::vector<std::size_t>> rref(const BitMatrix& m);

AffineSubspace solve_affine(const BitMatrix& m, const BitVector& b);

AffineSubspace intersect(const AffineSubspace& u1, const AffineSubspace& u2);
// Smallest affine subspace containing both; exposed for the dimension-formula
// checks dim(U1+U2) = dim U1 + dim U2 - dim(U1 cap U2).
AffineSubspace affine_span(const AffineSubspace& u1, const AffineSubspace& u2);

// a with a(v) = 1 and a|_u = 0; requires v outside the nonempty subspace u.
AffineForm separating_functional(const AffineSubspace& u, const BitVector& v);

// A set S of dim(u) coordinates such that every assignment on S extends to an
// element of u (the complement of the pivot columns).
std::vector<std::size_t> coordinate_section(const AffineSubspace& u);

// An element of u with weight <= codim(u): the zero assignment on the section.
BitVector low_weight_element(const AffineSubspace& u);

AffineForm directional_derivative(const QuadraticForm& q, const BitVector& y);

BitVector sample_uniform(const AffineSubspace& u, std::uint64_t seed);
BitVector sample_uniform(const AffineSubspace& u, class Rng& rng);

// Kleitman: a set of diameter <= 2k in F2^n has size at most sum_{j<=k} C(n,j).
mpz_class kleitman_bound(unsigned n, unsigned k);
// Companion 2^{H2(k/n) n} as an arbitrary-precision float.
mpf_class kleitman_entropy_bound(unsigned n, unsigned k);

// Deterministic RNG used across the library (engine output is standardized;
// bounded sampling is hand-rolled so results are platform-stable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next();
  // Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bit() { return next() & 1; }
  BitVector vector(std::size_t n);
  // Sorted m-element subset of [0, n).
  std::vector<std::size_t> subset(std::size_t n, std::size_t m);

 private:
  std::uint64_t state_;
};

}  // namespace stabrank::f2
