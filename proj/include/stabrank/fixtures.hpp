#pragma once

#include <bit>

#include "stabrank/stabilizer.hpp"

// Deterministic generators for decomposition fixtures. Used by the CLI's
// --random inputs and by the test suites; everything is a pure function of
// the seed.

namespace stabrank::fixtures {

using f2::AffineForm;
using f2::AffineSubspace;
using f2::BitMatrix;
using f2::BitVector;
using f2::QuadraticForm;
using f2::Rng;
using stab::Cyclo;
using stab::MagicTarget;
using stab::StabilizerDecomposition;
using stab::StabilizerFunction;

inline AffineSubspace random_nonempty_subspace(Rng& rng, std::size_t n,
                                               std::size_t max_codim) {
  std::size_t k = rng.below(max_codim + 1);
  BitVector anchor = rng.vector(n);
  BitMatrix m(0, n);
  for (std::size_t i = 0; i < k; ++i) m.append_row(rng.vector(n));
  return f2::solve_affine(m, m.multiply(anchor));
}

inline StabilizerFunction random_stabilizer_function(Rng& rng, std::size_t n,
                                                     std::size_t max_codim = 3) {
  AffineForm ell(rng.vector(n), false);
  QuadraticForm q(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bit()) q.set_quad(i, j);
    }
    if (rng.bit()) q.set_linear(i);
  }
  if (rng.bit()) q.set_constant(true);
  return StabilizerFunction(ell, q, random_nonempty_subspace(rng, n, max_codim));
}

inline Cyclo random_nonzero_cyclo(Rng& rng) {
  Cyclo c;
  do {
    for (std::size_t j = 0; j < 8; ++j) {
      long num = static_cast<long>(rng.below(5)) - 2;
      long den = 1 + static_cast<long>(rng.below(2));
      c.coeff(j) = mpq_class(num, den);
      c.coeff(j).canonicalize();
    }
  } while (c.is_zero());
  return c;
}

inline StabilizerDecomposition random_decomposition(std::size_t n, std::size_t r,
                                                    std::uint64_t seed,
                                                    bool exact = true,
                                                    std::size_t max_codim = 3) {
  Rng rng(seed);
  StabilizerDecomposition d(n, exact);
  for (std::size_t j = 0; j < r; ++j) {
    StabilizerFunction phi = random_stabilizer_function(rng, n, max_codim);
    if (exact) {
      d.add_term(random_nonzero_cyclo(rng), std::move(phi));
    } else {
      double re = (static_cast<double>(rng.below(4001)) - 2000) / 1000.0;
      double im = (static_cast<double>(rng.below(4001)) - 2000) / 1000.0;
      if (re == 0 && im == 0) re = 1;
      d.add_term(stab::ComplexMP::from_double(re, im), std::move(phi));
    }
  }
  return d;
}

inline StabilizerDecomposition constant_one_decomposition(std::size_t n) {
  StabilizerDecomposition d(n, true);
  d.add_term(Cyclo::one(),
             StabilizerFunction(AffineForm::zero(n), QuadraticForm::zero(n),
                                AffineSubspace::whole(n)));
  return d;
}

// The trivial 2^n-term representation: one point-supported term per input.
inline StabilizerDecomposition point_decomposition(const MagicTarget& t) {
  std::size_t n = t.n();
  if (n > kDenseMaxN) {
    throw guard_error("point_decomposition: n exceeds the dense guard");
  }
  StabilizerDecomposition d(n, true);
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
    BitVector x = BitVector::from_bits(n, w);
    d.add_term(t.amplitude_exact(x.weight()),
               StabilizerFunction(AffineForm::zero(n), QuadraticForm::zero(n),
                                  AffineSubspace::point(x)));
  }
  return d;
}

}  // namespace stabrank::fixtures
