#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "stabrank/affine.hpp"
#include "stabrank/bitvec.hpp"

using namespace stabrank;
using namespace stabrank::f2;

namespace {

AffineSubspace random_subspace(Rng& rng, std::size_t n, std::size_t max_codim) {
  // Always consistent: constraints are pinned at a random point.
  std::size_t k = rng.below(max_codim + 1);
  BitVector anchor = rng.vector(n);
  BitMatrix m(0, n);
  for (std::size_t i = 0; i < k; ++i) m.append_row(rng.vector(n));
  BitVector b = m.multiply(anchor);
  return solve_affine(m, b);
}

}  // namespace

TEST_CASE("bitvector basics") {
  BitVector v(10);
  CHECK(v.is_zero());
  v.set(3, true);
  v.set(9, true);
  CHECK(v.weight() == 2);
  CHECK(v.get(3));
  CHECK_FALSE(v.get(4));
  CHECK(v.to_hex() == "208");
  CHECK(BitVector::from_hex(10, "208") == v);
  CHECK(BitVector::from_hex(10, "0") == BitVector(10));

  BitVector u = BitVector::from_indices(10, {3, 5});
  CHECK((u ^ v).weight() == 2);
  CHECK(u.dot(v) == true);  // overlap at 3
  CHECK(BitVector::ones(10).weight() == 10);
}

TEST_CASE("bitvector hex round trip across word boundaries") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + rng.below(200);
    BitVector v = rng.vector(n);
    CHECK(BitVector::from_hex(n, v.to_hex()) == v);
  }
}

TEST_CASE("rref identity and degenerate cases") {
  BitMatrix id(2, 2);
  id.set(0, 0, true);
  id.set(1, 1, true);
  auto [rank, reduced, pivots] = rref(id);
  CHECK(rank == 2);
  CHECK(pivots == std::vector<std::size_t>{0, 1});
  CHECK(reduced == id);

  BitMatrix zero(2, 2);
  auto [rank0, red0, piv0] = rref(zero);
  CHECK(rank0 == 0);
  CHECK(piv0.empty());

  BitMatrix dup(0, 2);
  dup.append_row(BitVector::from_indices(2, {0, 1}));
  dup.append_row(BitVector::from_indices(2, {0, 1}));
  CHECK(std::get<0>(rref(dup)) == 1);
}

TEST_CASE("solve_affine examples") {
  // x1 + x2 = 1 over F2^3
  BitMatrix m(0, 3);
  m.append_row(BitVector::from_indices(3, {0, 1}));
  AffineSubspace s = solve_affine(m, BitVector::from_bits(1, 1));
  REQUIRE_FALSE(s.is_empty());
  CHECK(s.dim() == 2);
  CHECK(s.contains(BitVector::from_indices(3, {0})));

  // inconsistent system
  BitMatrix m2(0, 2);
  m2.append_row(BitVector::from_indices(2, {0}));
  m2.append_row(BitVector::from_indices(2, {0}));
  BitVector b2(2);
  b2.set(1, true);
  CHECK(solve_affine(m2, b2).is_empty());

  // empty constraint set: everything
  AffineSubspace all = solve_affine(BitMatrix(0, 4), BitVector(0));
  CHECK(all.dim() == 4);

  CHECK_THROWS_AS(solve_affine(m2, BitVector(1)), std::invalid_argument);
}

TEST_CASE("constraint and parametric forms agree exhaustively") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng.below(10);  // n <= 11
    AffineSubspace s = random_subspace(rng, n, 4);
    REQUIRE_FALSE(s.is_empty());
    std::size_t members = 0;
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
      BitVector x = BitVector::from_bits(n, w);
      bool a = s.contains(x);
      bool b = s.contains_parametric(x);
      CHECK(a == b);
      if (a) ++members;
    }
    CHECK(members == (std::uint64_t{1} << s.dim()));
    CHECK(s.constraints().multiply(s.offset()) == s.rhs());
  }
}

TEST_CASE("intersect examples and dimension formula") {
  // two distinct hyperplanes through 0 in F2^4
  BitMatrix m1(0, 4), m2(0, 4);
  m1.append_row(BitVector::from_indices(4, {0}));
  m2.append_row(BitVector::from_indices(4, {1}));
  AffineSubspace h1 = solve_affine(m1, BitVector(1));
  AffineSubspace h2 = solve_affine(m2, BitVector(1));
  AffineSubspace both = intersect(h1, h2);
  CHECK(both.dim() == 2);

  CHECK(intersect(h1, h1).same_set(h1));

  // parallel distinct hyperplanes x1 = 0 and x1 = 1
  AffineSubspace h1b = solve_affine(m1, BitVector::from_bits(1, 1));
  CHECK(intersect(h1, h1b).is_empty());

  // dim(U1+U2) = dim U1 + dim U2 - dim(U1 cap U2) on random instances
  Rng rng(13);
  int checked = 0;
  while (checked < 1000) {
    std::size_t n = 2 + rng.below(15);  // n <= 16
    AffineSubspace a = random_subspace(rng, n, 4);
    AffineSubspace b = random_subspace(rng, n, 4);
    AffineSubspace cap = intersect(a, b);
    if (cap.is_empty()) continue;
    AffineSubspace span = affine_span(a, b);
    CHECK(span.dim() == a.dim() + b.dim() - cap.dim());
    ++checked;
  }
}

TEST_CASE("separating functional examples") {
  BitMatrix m(0, 3);
  m.append_row(BitVector::from_indices(3, {0}));
  AffineSubspace u = solve_affine(m, BitVector(1));  // x1 = 0
  AffineForm a = separating_functional(u, BitVector::from_indices(3, {0}));
  CHECK(a.eval(BitVector::from_indices(3, {0})));
  CHECK(a.coeffs() == BitVector::from_indices(3, {0}));
  CHECK_FALSE(a.constant());

  AffineSubspace pt = AffineSubspace::point(BitVector::from_indices(2, {0, 1}));
  AffineForm a2 = separating_functional(pt, BitVector(2));
  CHECK(a2.eval(BitVector(2)));
  CHECK_FALSE(a2.eval(BitVector::from_indices(2, {0, 1})));

  CHECK_THROWS_AS(separating_functional(u, BitVector::from_indices(3, {1})),
                  std::domain_error);
  CHECK_THROWS_AS(separating_functional(AffineSubspace::empty(3), BitVector(3)),
                  std::domain_error);
}

TEST_CASE("separating functional postcondition on random subspaces") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    // dim-5 subspace of F2^10 and an external point
    BitMatrix m(0, 10);
    AffineSubspace u = AffineSubspace::empty(10);
    do {
      m = BitMatrix(0, 10);
      BitVector anchor = rng.vector(10);
      for (int i = 0; i < 5; ++i) m.append_row(rng.vector(10));
      u = solve_affine(m, m.multiply(anchor));
    } while (u.is_empty() || u.dim() != 5);
    BitVector v = rng.vector(10);
    while (u.contains(v)) v = rng.vector(10);
    AffineForm a = separating_functional(u, v);
    CHECK(a.eval(v));
    u.for_each_element([&](const BitVector& x) { CHECK_FALSE(a.eval(x)); });
  }
}

TEST_CASE("coordinate section examples") {
  AffineSubspace all = AffineSubspace::whole(3);
  CHECK(coordinate_section(all) == std::vector<std::size_t>{0, 1, 2});

  BitMatrix m(0, 3);
  m.append_row(BitVector::from_indices(3, {0, 1}));
  AffineSubspace u = solve_affine(m, BitVector::from_bits(1, 1));
  auto s = coordinate_section(u);
  CHECK(s == std::vector<std::size_t>{1, 2});

  CHECK_THROWS_AS(coordinate_section(AffineSubspace::empty(3)), std::domain_error);
}

TEST_CASE("coordinate section: every assignment extends") {
  Rng rng(23);
  AffineSubspace u = AffineSubspace::empty(12);
  BitMatrix m(0, 12);
  do {
    m = BitMatrix(0, 12);
    BitVector anchor = rng.vector(12);
    for (int i = 0; i < 6; ++i) m.append_row(rng.vector(12));
    u = solve_affine(m, m.multiply(anchor));
  } while (u.is_empty() || u.dim() != 6);
  auto s = coordinate_section(u);
  REQUIRE(s.size() == 6);
  for (std::uint64_t assign = 0; assign < 64; ++assign) {
    // Count elements restricting to this assignment; must be exactly one
    // candidate in the section coordinates per solvability of the residual.
    bool found = false;
    u.for_each_element([&](const BitVector& x) {
      bool match = true;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (x.get(s[i]) != ((assign >> i) & 1)) match = false;
      }
      if (match) found = true;
    });
    CHECK(found);
  }
}

TEST_CASE("low weight element") {
  BitMatrix m(0, 3);
  m.append_row(BitVector::from_indices(3, {0, 1}));
  AffineSubspace u = solve_affine(m, BitVector::from_bits(1, 1));
  BitVector w = low_weight_element(u);
  CHECK(u.contains(w));
  CHECK(w.weight() <= 1);

  CHECK(low_weight_element(AffineSubspace::whole(5)).is_zero());

  // random codim-4 subspaces in F2^16
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    BitMatrix mm(0, 16);
    BitVector anchor = rng.vector(16);
    for (int i = 0; i < 4; ++i) mm.append_row(rng.vector(16));
    AffineSubspace uu = solve_affine(mm, mm.multiply(anchor));
    REQUIRE_FALSE(uu.is_empty());
    BitVector least = low_weight_element(uu);
    CHECK(uu.contains(least));
    CHECK(least.weight() <= uu.codim());
  }
}

TEST_CASE("directional derivative") {
  // q = x1 x2, y = e1 -> derivative x2
  QuadraticForm q(4);
  q.set_quad(0, 1);
  AffineForm d = directional_derivative(q, BitVector::from_indices(4, {0}));
  CHECK(d.coeffs() == BitVector::from_indices(4, {1}));
  CHECK_FALSE(d.constant());

  // y = 0 -> zero form
  AffineForm dz = directional_derivative(q, BitVector(4));
  CHECK(dz.is_zero());

  // purely linear q: derivative is the constant <linear, y>
  QuadraticForm lin(4);
  lin.set_linear(2);
  AffineForm dl = directional_derivative(lin, BitVector::from_indices(4, {2, 3}));
  CHECK(dl.coeffs().is_zero());
  CHECK(dl.constant());

  // pointwise identity q(x) + q(x+y) == derivative(x), exhaustive small n
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + rng.below(8);
    QuadraticForm qq(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng.bit()) qq.set_quad(i, j);
      }
      if (rng.bit()) qq.set_linear(i);
    }
    if (rng.bit()) qq.set_constant(true);
    BitVector y = rng.vector(n);
    AffineForm der = directional_derivative(qq, y);
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
      BitVector x = BitVector::from_bits(n, w);
      CHECK(der.eval(x) == (qq.eval(x) ^ qq.eval(x ^ y)));
    }
  }
}

TEST_CASE("quadratic form normalization") {
  // Lower-triangle and diagonal input coefficients are folded.
  BitMatrix raw(3, 3);
  raw.set(2, 0, true);  // x3 x1 -> quad(0,2)
  raw.set(1, 1, true);  // x2^2 -> linear x2
  QuadraticForm q(raw, BitVector(3), false);
  CHECK(q.quad().get(0, 2));
  CHECK_FALSE(q.quad().get(2, 0));
  CHECK(q.linear().get(1));
}

TEST_CASE("diameter") {
  CHECK(diameter({BitVector::from_bits(8, 0x55)}) == 0);
  CHECK(diameter({BitVector(6), BitVector::ones(6)}) == 6);
  // Hamming ball of radius 2 around 0 in F2^8 has diameter 4
  std::vector<BitVector> ball;
  for (std::uint64_t w = 0; w < 256; ++w) {
    BitVector x = BitVector::from_bits(8, w);
    if (x.weight() <= 2) ball.push_back(x);
  }
  CHECK(diameter(ball) == 4);
  CHECK_THROWS_AS(diameter({}), std::invalid_argument);
}

TEST_CASE("kleitman bound") {
  CHECK(kleitman_bound(10, 3) == 176);
  CHECK(kleitman_bound(10, 0) == 1);
  CHECK_THROWS_AS(kleitman_bound(10, 5), std::domain_error);

  // Tightness: the radius-k Hamming ball has diameter 2k and size equal
  // to the bound (n = 10, k = 3).
  std::vector<BitVector> ball;
  for (std::uint64_t w = 0; w < 1024; ++w) {
    BitVector x = BitVector::from_bits(10, w);
    if (x.weight() <= 3) ball.push_back(x);
  }
  CHECK(diameter(ball) == 6);
  CHECK(mpz_class(ball.size()) == kleitman_bound(10, 3));

  // Entropy bound dominates for all 1 <= k < n/2, n <= 64.
  for (unsigned n = 3; n <= 64; ++n) {
    for (unsigned k = 1; 2 * k < n; ++k) {
      mpf_class lhs(kleitman_bound(n, k), kFloatBits);
      CHECK(lhs <= kleitman_entropy_bound(n, k));
    }
  }
}

TEST_CASE("sample_uniform") {
  AffineSubspace pt = AffineSubspace::point(BitVector::from_indices(3, {1}));
  CHECK(sample_uniform(pt, 1) == BitVector::from_indices(3, {1}));
  CHECK(sample_uniform(pt, 99) == BitVector::from_indices(3, {1}));

  // coordinate frequencies on the full cube: within 5 sigma of 1/2
  AffineSubspace all = AffineSubspace::whole(8);
  Rng rng(42);
  std::array<int, 8> counts{};
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    BitVector x = sample_uniform(all, rng);
    for (int i = 0; i < 8; ++i) {
      if (x.get(i)) ++counts[i];
    }
  }
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(counts[i] - samples / 2) <= 250);  // 5 * sqrt(n/4)
  }

  // membership contract on random subspaces
  Rng rng2(43);
  for (int trial = 0; trial < 20; ++trial) {
    AffineSubspace u = random_subspace(rng2, 20, 5);
    REQUIRE_FALSE(u.is_empty());
    for (int s = 0; s < 50; ++s) {
      CHECK(u.contains(sample_uniform(u, rng2)));
    }
  }
  CHECK_THROWS_AS(sample_uniform(AffineSubspace::empty(4), 1), std::domain_error);
}

TEST_CASE("determinism of seeded sampling") {
  AffineSubspace all = AffineSubspace::whole(32);
  CHECK(sample_uniform(all, 7) == sample_uniform(all, 7));
}
