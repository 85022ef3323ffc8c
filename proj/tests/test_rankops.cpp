#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stabrank/fixtures.hpp"
#include "stabrank/rank_search.hpp"
#include "stabrank/witness.hpp"

using namespace stabrank;
using namespace stabrank::rankops;
using stab::Cyclo;
using stab::MagicTarget;
using stab::StabilizerDecomposition;
using stab::StabilizerFunction;
using stab::TargetKind;
using f2::AffineForm;
using f2::AffineSubspace;
using f2::BitVector;
using f2::QuadraticForm;

TEST_CASE("constant subspace: forced construction") {
  // r=1, l = x1, A = {x : x2 = 0}, n = 8 -> U = {x1 = 0, x2 = 0}, dim 6
  std::size_t n = 8;
  f2::BitMatrix m(0, n);
  m.append_row(BitVector::from_indices(n, {1}));
  StabilizerDecomposition d(n, true);
  d.add_term(Cyclo::one(),
             StabilizerFunction(AffineForm(BitVector::from_indices(n, {0}), false),
                                QuadraticForm::zero(n),
                                f2::solve_affine(m, BitVector(1))));
  auto res = find_constant_subspace(d, SearchMode::Exhaustive, 1);
  CHECK(res.u.dim() == 6);
  CHECK(res.alpha == std::vector<bool>{true});
  CHECK(res.dim_bound_asserted);
  res.u.for_each_element([&](const BitVector& x) {
    CHECK_FALSE(x.get(0));
    CHECK_FALSE(x.get(1));
  });

  // r=1 with trivial term: U is everything
  auto trivial = find_constant_subspace(fixtures::constant_one_decomposition(6),
                                        SearchMode::Exhaustive, 1);
  CHECK(trivial.u.dim() == 6);
}

TEST_CASE("constant subspace: random instances, exhaustive enumeration check") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    std::size_t n = 16;
    std::size_t r = 3;
    auto d = fixtures::random_decomposition(n, r, 1000 + seed);
    auto res = find_constant_subspace(d, SearchMode::Exhaustive, seed);
    CHECK(res.u.dim() + 3 * r >= n);  // dim >= n - 3r
    CHECK(res.dim_bound_asserted);
    // constancy, exhaustively
    res.u.for_each_element([&](const BitVector& x) {
      for (std::size_t j = 0; j < r; ++j) {
        CHECK_FALSE(d.terms()[j].phi.ell().eval(x));
        CHECK(d.terms()[j].phi.support().contains(x) == res.alpha[j]);
      }
    });
  }
}

TEST_CASE("heavy direction: trivial and forced cases") {
  // all q_j = 0, U = F2^n: v = 1^n with x0 = 0 is acceptable
  std::size_t n = 9;
  auto d0 = fixtures::constant_one_decomposition(n);
  auto u0 = find_constant_subspace(d0, SearchMode::Exhaustive, 1);
  auto check = verify_witness(d0, BitVector(n), BitVector::ones(n));
  CHECK(check.all_pass);
  auto h0 = find_heavy_direction(d0, u0, SearchMode::Exhaustive, 1);
  REQUIRE(h0.found);
  CHECK(h0.direction.weight() >= (2 * n + 2) / 3);
  for (const auto& term : d0.terms()) {
    CHECK(term.phi.quad_form().eval(h0.solution) ==
          term.phi.quad_form().eval(h0.solution ^ h0.direction));
  }

  // n=9, r=1, q = x1 x2 on the full cube: exhaustive bucket scan
  StabilizerDecomposition d1(n, true);
  QuadraticForm q(n);
  q.set_quad(0, 1);
  d1.add_term(Cyclo::one(),
              StabilizerFunction(AffineForm::zero(n), q, AffineSubspace::whole(n)));
  auto u1 = find_constant_subspace(d1, SearchMode::Exhaustive, 1);
  auto h1 = find_heavy_direction(d1, u1, SearchMode::Exhaustive, 1);
  REQUIRE(h1.found);
  CHECK(h1.direction.weight() >= 6);
  CHECK(q.eval(h1.solution) == q.eval(h1.solution ^ h1.direction));
}

TEST_CASE("heavy direction: sampled mode at n = 128") {
  std::size_t n = 128;
  auto d = fixtures::random_decomposition(n, 2, 777);
  auto u = find_constant_subspace(d, SearchMode::Sampled, 5);
  auto h = find_heavy_direction(d, u, SearchMode::Sampled, 5, 10000);
  if (h.found) {
    CHECK(h.direction.weight() >= (2 * n + 2) / 3);
    CHECK(u.u.contains(h.solution));
    for (const auto& term : d.terms()) {
      CHECK(term.phi.quad_form().eval(h.solution) ==
            term.phi.quad_form().eval(h.solution ^ h.direction));
    }
  }
}

TEST_CASE("collision witness: constant-1 fixture") {
  std::size_t n = 12;
  auto d = fixtures::constant_one_decomposition(n);
  auto w = find_collision_witness(d, SearchMode::Exhaustive, 3);
  REQUIRE(w.found);
  CHECK(w.y.is_zero());
  CHECK(w.weight_z >= 8);
  CHECK(w.weight_y < w.weight_z);
  auto check = verify_witness(d, w.y, w.z);
  CHECK(check.all_pass);
}

TEST_CASE("collision witness: single sign term keeps coordinate 1") {
  // d = (-1)^{x1} on F2^16
  std::size_t n = 16;
  StabilizerDecomposition d(n, true);
  QuadraticForm q(n);
  q.set_linear(0);
  d.add_term(Cyclo::one(),
             StabilizerFunction(AffineForm::zero(n), q, AffineSubspace::whole(n)));
  auto w = find_collision_witness(d, SearchMode::Exhaustive, 11);
  REQUIRE(w.found);
  // q(y) = q(z) here means y and z agree on coordinate 1
  CHECK(w.y.get(0) == w.z.get(0));
  CHECK(verify_witness(d, w.y, w.z).all_pass);
}

TEST_CASE("collision witness: random decompositions verify, zero failures") {
  int found = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    std::size_t n = 16 + (seed % 5);
    std::size_t r = 1 + (seed % 3);
    auto d = fixtures::random_decomposition(n, r, 5000 + seed);
    auto w = find_collision_witness(d, SearchMode::Exhaustive, seed, 4000);
    ++total;
    CHECK(w.dim_bound_asserted);
    CHECK(w.dim_u + 3 * r >= n);
    if (!w.found) continue;
    ++found;
    auto check = verify_witness(d, w.y, w.z);
    CHECK(check.all_pass);
    CHECK(check.value_equal);
    CHECK(w.weight_y < w.weight_z);
    // corollary chain: dim(V) >= dim(U) - r, so |y| <= n - dim(U) + r
    CHECK(w.dim_v + r >= w.dim_u);
    CHECK(w.weight_y + w.dim_v <= n);
  }
  CHECK(found > 0);

  // sampled mode at n = 128, including float-mode decompositions
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    bool exact = seed % 2 == 0;
    auto d = fixtures::random_decomposition(128, 2, 9000 + seed, exact);
    auto w = find_collision_witness(d, SearchMode::Sampled, seed, 10000);
    if (w.found) {
      auto check = verify_witness(d, w.y, w.z);
      CHECK(check.all_pass);
      CHECK(w.weight_z >= (2 * 128 + 2) / 3 - w.weight_y);
    }
  }
}

TEST_CASE("collision witness: determinism per seed") {
  auto d = fixtures::random_decomposition(128, 2, 424242);
  auto w1 = find_collision_witness(d, SearchMode::Sampled, 7, 3000);
  auto w2 = find_collision_witness(d, SearchMode::Sampled, 7, 3000);
  CHECK(w1.found == w2.found);
  if (w1.found) {
    CHECK(w1.y == w2.y);
    CHECK(w1.z == w2.z);
    CHECK(w1.direction == w2.direction);
  }
}

TEST_CASE("verify_witness flags failures") {
  std::size_t n = 8;
  auto d = fixtures::constant_one_decomposition(n);
  BitVector y = BitVector::from_indices(n, {0});
  auto same = verify_witness(d, y, y);
  CHECK_FALSE(same.weights_distinct);
  CHECK_FALSE(same.all_pass);
  CHECK(same.per_term_pass);  // trivially equal on the same point

  // (-1)^{x1}: a pair differing in x1 fails the quadratic condition
  StabilizerDecomposition ds(n, true);
  QuadraticForm q(n);
  q.set_linear(0);
  ds.add_term(Cyclo::one(),
              StabilizerFunction(AffineForm::zero(n), q, AffineSubspace::whole(n)));
  auto bad = verify_witness(ds, BitVector(n), BitVector::from_indices(n, {0, 1, 2}));
  CHECK_FALSE(bad.quad_equal[0]);
  CHECK_FALSE(bad.value_equal);
  CHECK_FALSE(bad.all_pass);
}

TEST_CASE("witness engine cannot contradict layer-injectivity of exact targets") {
  // A rank-2 certificate for F_T at n = 2 evaluates exactly to F_T, which
  // takes distinct values on distinct layers for n < 8. Any witness would
  // force equal values across layers, so the engine must come up empty.
  MagicTarget t = MagicTarget::make(TargetKind::T, 2);
  auto rank = exact_rank_search(t, 3);
  REQUIRE(rank.found);
  REQUIRE(rank.r == 2);
  auto w = find_collision_witness(*rank.certificate, SearchMode::Exhaustive, 1, 5000);
  CHECK_FALSE(w.found);
}

TEST_CASE("empty decomposition is rejected") {
  StabilizerDecomposition d(4, true);
  CHECK_THROWS_AS(find_constant_subspace(d, SearchMode::Exhaustive, 1),
                  std::invalid_argument);
}
