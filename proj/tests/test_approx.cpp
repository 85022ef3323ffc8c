#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>

#include "stabrank/fixtures.hpp"
#include "stabrank/pipeline.hpp"

using namespace stabrank;
using namespace stabrank::approx;
using stab::Cyclo;
using stab::MagicTarget;
using stab::StabilizerDecomposition;
using stab::TargetKind;
using f2::BitMatrix;
using f2::BitVector;

TEST_CASE("threshold function") {
  BooleanFunction f = threshold_fn(4, mpq_class(3, 10));  // k* = ceil(1.2) = 2
  CHECK(f.get(0b0011));
  CHECK_FALSE(f.get(0b0001));
  CHECK(f.get(0b1111));
  CHECK(threshold_fn(6, mpq_class(1, 2)) == BooleanFunction::majority(6));
  CHECK(threshold_fn(7, mpq_class(1, 2)) == BooleanFunction::majority(7));
  CHECK_THROWS_AS(threshold_fn(4, mpq_class(3, 4)), std::invalid_argument);
}

TEST_CASE("threshold context for the H target") {
  MagicTarget h = MagicTarget::make(TargetKind::H, 48);
  ThresholdContext ctx = threshold_context(h);
  // pn = 48 sin^2(pi/8) = 7.029...
  CHECK(ctx.k_star == 8);
  CHECK(ctx.m == 14);
  // 5 sqrt(2pn) = 5 sqrt(14.058) = 18.74..., so halfwidth 19
  CHECK(ctx.window_halfwidth == 19);
  CHECK(ctx.window_lo == 0);   // clamped from 8 - 19
  CHECK(ctx.window_hi == 26);  // 7 + 19
  CHECK(ctx.exact);

  // threshold sits strictly between consecutive layer magnitudes
  CHECK(stab::cmp_real(h.layer_weight_exact(8), ctx.thr_sq) < 0);
  CHECK(stab::cmp_real(ctx.thr_sq, h.layer_weight_exact(7)) < 0);

  // T is excluded (p = 1/2)
  MagicTarget t = MagicTarget::make(TargetKind::T, 8);
  CHECK_THROWS_AS(threshold_context(t), std::invalid_argument);

  // R context at 512-bit floats
  MagicTarget r = MagicTarget::make(TargetKind::R, 48);
  ThresholdContext rc = threshold_context(r);
  double pr = (1 - 1 / std::sqrt(3.0)) / 2;
  CHECK(rc.k_star == static_cast<std::size_t>(std::ceil(pr * 48)));
  CHECK(rc.m == 2 * static_cast<std::size_t>(std::floor(pr * 48)));
}

TEST_CASE("build_f_psi on an exact magic decomposition is the threshold") {
  for (std::size_t n : {10, 16}) {
    MagicTarget h = MagicTarget::make(TargetKind::H, n);
    StabilizerDecomposition d = fixtures::point_decomposition(h);
    BooleanFunction f = build_f_psi(d, h);
    ThresholdContext ctx = threshold_context(h);
    CHECK(f == BooleanFunction::threshold_weight(n, ctx.k_star));
  }
}

TEST_CASE("build_f_psi trivial and perturbed cases") {
  std::size_t n = 10;
  MagicTarget h = MagicTarget::make(TargetKind::H, n);
  ThresholdContext ctx = threshold_context(h);

  // zero decomposition: |0| <= thr everywhere
  StabilizerDecomposition zero(n, true);
  CHECK(build_f_psi(zero, h) == BooleanFunction::constant(n, true));

  // push one amplitude at a layer-k* point above the threshold
  StabilizerDecomposition d = fixtures::point_decomposition(h);
  StabilizerDecomposition corrupted(n, true);
  BitVector special(n);
  for (std::size_t i = 0; i < ctx.k_star; ++i) special.set(i, true);
  for (const auto& term : d.terms()) {
    Cyclo c = term.c;
    if (term.phi.support().offset() == special) {
      c += Cyclo::one();  // way above thr
    }
    corrupted.add_term(c, term.phi);
  }
  BooleanFunction f = build_f_psi(corrupted, h);
  BooleanFunction thr = BooleanFunction::threshold_weight(n, ctx.k_star);
  CHECK(f.count_disagree(thr) == 1);
  CHECK_FALSE(f.get(static_cast<std::uint32_t>(special.word(0))));
}

TEST_CASE("layer error report") {
  std::size_t n = 16;
  ThresholdContext ctx = threshold_context_rational(n, mpq_class(49, 100));
  BooleanFunction thr = BooleanFunction::threshold_weight(n, ctx.k_star);
  LayerReport ok = layer_error_report(thr, ctx);
  CHECK(ok.passes);
  CHECK(ok.wrong_in_window == 0);
  for (const auto& row : ok.rows) CHECK(row.errors == 0);

  BooleanFunction neg = thr;
  neg.invert();
  LayerReport bad = layer_error_report(neg, ctx);
  CHECK_FALSE(bad.passes);
  CHECK(bad.wrong_in_window == bad.window_layers);

  // a few flips in one large layer stay under eps = 1/100
  BooleanFunction flipped = thr;
  std::size_t k_mid = ctx.k_star;
  int flips = 0;
  for (std::uint32_t x = 0; x < (1u << n) && flips < 5; ++x) {
    if (std::popcount(x) == static_cast<int>(k_mid)) {
      flipped.flip(x);
      ++flips;
    }
  }
  LayerReport few = layer_error_report(flipped, ctx);
  CHECK(few.passes);
  CHECK(few.rows[k_mid].errors == 5);
  CHECK_FALSE(few.rows[k_mid].eps_wrong);
}

TEST_CASE("restrict") {
  // D = [n] is the identity
  f2::Rng rng(31);
  BooleanFunction f(6);
  for (std::uint32_t x = 0; x < 64; ++x) {
    if (rng.bit()) f.set(x, true);
  }
  std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
  CHECK(f.restricted(all) == f);

  // f = x1 AND x2, D = {x1} -> restriction is 0
  BooleanFunction andf(2);
  andf.set(0b11, true);
  BooleanFunction g = andf.restricted({0});
  CHECK(g.count_ones() == 0);

  // threshold restriction keeps the weight threshold
  BooleanFunction thr = BooleanFunction::threshold_weight(10, 4);
  BooleanFunction gt = thr.restricted({1, 3, 4, 6, 8});
  CHECK(gt == BooleanFunction::threshold_weight(5, 4));
}

TEST_CASE("find_good_restriction") {
  // n = 16 with p = 0.49: k* = 8, m = 14; the restriction of THR_8 to any
  // 14 coordinates is the weight-8 threshold, which agrees with Maj_14
  // everywhere except the weight-7 band.
  std::size_t n = 16;
  ThresholdContext ctx = threshold_context_rational(n, mpq_class(49, 100));
  REQUIRE(ctx.k_star == 8);
  REQUIRE(ctx.m == 14);
  BooleanFunction f = BooleanFunction::threshold_weight(n, 8);
  auto res = find_good_restriction(f, 14, 5, 42);
  CHECK(res.achieved);
  CHECK(res.agreement == mpq_class(16384 - 3432, 16384));

  // constant zero fails the 3/4 bar
  BooleanFunction zeroqf = BooleanFunction::constant(n, false);
  auto bad = find_good_restriction(zeroqf, 14, 5, 42);
  CHECK_FALSE(bad.achieved);
  CHECK(bad.agreement == mpq_class(6476, 16384));
}

TEST_CASE("rs subspace approximation") {
  // whole space: P = 1 with zero error
  auto whole = rs_subspace_approx(f2::AffineSubspace::whole(8), 5, 1);
  CHECK(whole.achieved);
  CHECK(whole.error_count == 0);
  CHECK(whole.poly == F2Polynomial::one(8));

  // single constraint x1 = 0 in F2^10 with t = 7
  BitMatrix m(0, 10);
  m.append_row(BitVector::from_indices(10, {0}));
  auto res = rs_subspace_approx(f2::solve_affine(m, BitVector(1)), 7, 3);
  CHECK(res.achieved);
  CHECK(res.error_count <= 8);
  CHECK(res.one_sided);
  CHECK(res.poly.degree() <= 7);

  // random subspaces: one-sided, degree bounded, achieved within retries
  f2::Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t mm = 12;
    f2::AffineSubspace a = fixtures::random_nonempty_subspace(rng, mm, 6);
    auto r = rs_subspace_approx(a, 8, 1000 + trial);
    CHECK(r.achieved);
    CHECK(r.error_count <= 16);
    CHECK(r.one_sided);
    CHECK(r.poly.degree() <= 8);
    // one-sidedness re-checked on every point
    BooleanFunction tt = r.poly.truth_table();
    a.for_each_element([&](const BitVector& x) {
      CHECK(tt.get(static_cast<std::uint32_t>(x.word(0))));
    });
  }
}

TEST_CASE("truth table to polynomial") {
  // parity
  BooleanFunction parity(5);
  for (std::uint32_t x = 0; x < 32; ++x) {
    if (std::popcount(x) & 1) parity.set(x, true);
  }
  F2Polynomial pp = truth_table_to_polynomial(parity);
  CHECK(pp.size() == 5);
  CHECK(pp.degree() == 1);

  // AND
  BooleanFunction andf(4);
  andf.set(0b1111, true);
  F2Polynomial pa = truth_table_to_polynomial(andf);
  CHECK(pa.monomials() == std::vector<std::uint32_t>{0b1111});

  // random round trips
  f2::Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    BooleanFunction f(10);
    for (std::uint32_t x = 0; x < 1024; ++x) {
      if (rng.bit()) f.set(x, true);
    }
    F2Polynomial p = truth_table_to_polynomial(f);
    CHECK(p.truth_table() == f);
    for (std::uint32_t x = 0; x < 1024; x += 37) {
      CHECK(p.eval(x) == f.get(x));
    }
  }
}

TEST_CASE("project decomposition") {
  std::size_t n = 6;
  // A = {x : x1 + x3 = 1}, D = {3} (1-based) -> A' = {xbar : xbar_1 = 1}
  BitMatrix m(0, n);
  m.append_row(BitVector::from_indices(n, {0, 2}));
  StabilizerDecomposition d(n, true);
  f2::QuadraticForm q(n);
  q.set_quad(0, 4);  // x1 x5
  q.set_linear(1);   // + x2
  d.add_term(Cyclo::one(),
             stab::StabilizerFunction(f2::AffineForm(BitVector::from_indices(n, {1}), false),
                                      q, f2::solve_affine(m, BitVector::from_bits(1, 1))));

  // D = {3}: only coordinate index 2 survives
  auto proj1 = project_decomposition(d, {2});
  REQUIRE(proj1.size() == 1);
  CHECK_FALSE(proj1[0].support.is_empty());
  CHECK(proj1[0].support.dim() == 0);
  CHECK(proj1[0].support.contains(BitVector::from_bits(1, 1)));
  CHECK_FALSE(proj1[0].support.contains(BitVector::from_bits(1, 0)));

  // D = {2,5} (indices 1 and 4): q' = xbar_1 (the linear x2 term survives)
  auto proj2 = project_decomposition(d, {1, 4});
  CHECK(proj2[0].q.quad().rank() == 0);
  CHECK(proj2[0].q.linear() == BitVector::from_indices(2, {0}));
  CHECK(proj2[0].ell.coeffs() == BitVector::from_indices(2, {0}));

  // D = [n] is the identity
  auto proj3 = project_decomposition(d, {0, 1, 2, 3, 4, 5});
  CHECK(proj3[0].support.same_set(d.terms()[0].phi.support()));
  CHECK(proj3[0].q == d.terms()[0].phi.quad_form());

  // empty projected support: A = {x : x1 = 1}, D excluding coordinate 0
  BitMatrix m2(0, n);
  m2.append_row(BitVector::from_indices(n, {0}));
  StabilizerDecomposition d2(n, true);
  d2.add_term(Cyclo::one(),
              stab::StabilizerFunction(f2::AffineForm::zero(n), f2::QuadraticForm(n),
                                       f2::solve_affine(m2, BitVector::from_bits(1, 1))));
  auto proj4 = project_decomposition(d2, {1, 2});
  CHECK(proj4[0].support.is_empty());

  // pointwise consistency: projected term evaluates like the embedded point
  f2::Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    auto dd = fixtures::random_decomposition(10, 2, 300 + t);
    std::vector<std::size_t> dset{1, 3, 4, 7, 8};
    auto proj = project_decomposition(dd, dset);
    for (std::uint32_t xb = 0; xb < 32; ++xb) {
      BitVector xbar = BitVector::from_bits(5, xb);
      BitVector x = xbar.scatter(10, dset);
      for (std::size_t j = 0; j < dd.rank(); ++j) {
        const auto& phi = dd.terms()[j].phi;
        CHECK(proj[j].ell.eval(xbar) == phi.ell().eval(x));
        CHECK(proj[j].q.eval(xbar) == phi.quad_form().eval(x));
        bool in = !proj[j].support.is_empty() && proj[j].support.contains(xbar);
        CHECK(in == phi.support().contains(x));
      }
    }
  }
}

TEST_CASE("build_g_tilde") {
  MagicTarget h = MagicTarget::make(TargetKind::H, 20);

  // r = 1 with full support: P_1 = 1 exactly, so g~ is the exact ANF of g
  StabilizerDecomposition d1(20, true);
  d1.add_term(Cyclo::from_rational(mpq_class(1, 3)),
              stab::StabilizerFunction(f2::AffineForm::zero(20),
                                       f2::QuadraticForm(20),
                                       f2::AffineSubspace::whole(20)));
  std::vector<std::size_t> dset{0, 2, 4, 6, 8, 10, 12, 14, 16, 18};
  auto g1 = build_g_tilde(d1, dset, h, 5);
  CHECK(g1.agreement == 1);
  CHECK(g1.disagreements == 0);
  CHECK(g1.rs_errors == std::vector<std::uint64_t>{0});

  // r = 2 random: union bound gives agreement >= 19/20 unconditionally
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto d = fixtures::random_decomposition(20, 2, 600 + seed);
    auto gt = build_g_tilde(d, {0, 1, 3, 5, 7, 9, 11, 13, 15, 17, 18, 19}, h, seed);
    CHECK(gt.agreement >= mpq_class(19, 20));
    CHECK(gt.degree <= gt.degree_bound);
    CHECK(gt.disagreements <= gt.rs_error_total);
    // exact ANF of the comparator matches g pointwise
    BooleanFunction gt_tt = gt.g_tilde.truth_table();
    CHECK(gt_tt.count_disagree(gt.g) == gt.disagreements);
  }
}

TEST_CASE("wrong point mass bound") {
  std::size_t n = 12;
  MagicTarget h = MagicTarget::make(TargetKind::H, n);
  auto exact = wrong_point_mass_bound_check(fixtures::point_decomposition(h), h);
  CHECK(exact.wrong_points == 0);
  CHECK(exact.inequality_holds);
  CHECK(exact.wrong_mass.is_zero());

  // corrupt a few amplitudes; the claimed pointwise bound must hold at every
  // wrong point
  f2::Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    StabilizerDecomposition d = fixtures::point_decomposition(h);
    StabilizerDecomposition corrupted(n, true);
    for (const auto& term : d.terms()) {
      Cyclo c = term.c;
      if (rng.below(100) < 5) {
        long num = static_cast<long>(rng.below(5)) - 2;
        c += Cyclo::zeta_pow(static_cast<long>(rng.below(16))) *
             Cyclo::from_rational(mpq_class(num, 4));
      }
      corrupted.add_term(c, term.phi);
    }
    auto rep = wrong_point_mass_bound_check(corrupted, h);
    CHECK(rep.inequality_holds);
  }
}

TEST_CASE("binomial layer mass") {
  CHECK(binomial_layer_mass(2, mpq_class(1, 2), 1) == mpq_class(1, 2));

  // sum over layers is exactly 1
  for (unsigned long n : {1ul, 7ul, 50ul, 200ul}) {
    mpq_class sum = 0;
    for (unsigned long k = 0; k <= n; ++k) {
      sum += binomial_layer_mass(n, mpq_class(1, 3), k);
    }
    CHECK(sum == 1);
  }

  // C = 0 gives ratio exactly 1
  auto rep0 = binomial_ratio_check(10000, mpq_class(14644, 100000), 0);
  CHECK(rep0.ratio == 1);
  CHECK(rep0.within_bound);
}

TEST_CASE("shifted layer index") {
  // perfect square n: exact rational arithmetic
  CHECK(shifted_layer_index(10000, mpq_class(1, 4), 1) == 2600);
  CHECK(shifted_layer_index(10000, mpq_class(1, 4), -1) == 2400);
  // non-square n: enclosure; sqrt(10) = 3.1622..., 0.25*10 + 3.162.. = 5.66..
  CHECK(shifted_layer_index(10, mpq_class(1, 4), 1) == 6);
  CHECK(shifted_layer_index(10, mpq_class(1, 4), -1) == 0);
}

TEST_CASE("survivor expectation stays under 12/100 of the cube") {
  std::size_t n = 20;
  ThresholdContext ctx = threshold_context_rational(n, mpq_class(49, 100));
  BooleanFunction f = BooleanFunction::threshold_weight(n, ctx.k_star);
  // scatter sub-eps flips across window layers
  f2::Rng rng(9);
  for (long k = ctx.window_lo; k <= ctx.window_hi; ++k) {
    mpz_class size;
    mpz_bin_uiui(size.get_mpz_t(), n, static_cast<unsigned long>(k));
    mpz_class budget = size / 150;  // strictly below 1/100
    long flips = std::min<long>(budget.get_si(), 40);
    for (std::uint32_t x = 0; x < (1u << n) && flips > 0; ++x) {
      if (std::popcount(x) == k && rng.below(3) == 0) {
        f.flip(x);
        --flips;
      }
    }
  }
  LayerReport rep = layer_error_report(f, ctx);
  REQUIRE(rep.passes);
  mpq_class expectation = expected_incorrect_survivors(n, ctx.m, rep);
  mpq_class bound = mpq_class(12, 100) * mpq_class(std::uint64_t{1} << ctx.m);
  CHECK(expectation <= bound);
}

TEST_CASE("rational p approximation") {
  MagicTarget h = MagicTarget::make(TargetKind::H, 4);
  mpq_class p = rational_p(h, 30);
  double exact = std::pow(std::sin(M_PI / 8), 2);
  CHECK(std::abs(p.get_d() - exact) < 1e-15);
  // denominator is 10^30 before canonicalization; value within 1e-30 below
  mpq_class p50 = rational_p(h, 50);
  CHECK(p50 >= p);
  CHECK(p50 - p < mpq_class(1, mpz_class("1000000000000000000000000000000")));
}

TEST_CASE("structured pipeline at n = 48") {
  MagicTarget h = MagicTarget::make(TargetKind::H, 48);

  // exact amplitudes: f_psi is the threshold on every layer
  auto exact = pipeline::run_pipeline_structured(h, 0, 0, 1, 20, 64);
  CHECK(exact.f_equals_thr);
  CHECK(exact.stage2_pass);
  CHECK(exact.stage3_pass);
  CHECK(exact.restriction.agreement == mpq_class(16384 - 3432, 16384));
  CHECK(exact.g_agreement == 1);
  CHECK(exact.maj_pass);
  CHECK(exact.completed);

  // delta = 1/20 with 25 bumps: every stage passes, exactly
  for (std::uint64_t seed : {1ull, 7ull, 23ull}) {
    auto res = pipeline::run_pipeline_structured(h, mpq_class(1, 20), 25, seed, 100, 64);
    CHECK(res.perturbation_norm_sq == mpq_class(1, 400));
    CHECK(res.bump_count == 25);
    CHECK(res.stage2_pass);
    CHECK(res.stage3_pass);
    CHECK(res.restriction.agreement >= mpq_class(3, 4));
    CHECK(res.g_agreement >= mpq_class(19, 20));
    CHECK(res.maj_agreement >= mpq_class(2, 3));
    CHECK(res.completed);
  }

  // adversarial injection trips stage 2
  auto bad = pipeline::run_pipeline_structured(h, 0, 0, 1, 10, 64, true);
  CHECK_FALSE(bad.stage2_pass);
  CHECK(bad.failed_stage == "layer_report");
}

TEST_CASE("structured stage 4 exercises the point corrections") {
  // Force in-plane bumps by perturbing low-weight points, then check the
  // union-bound accounting on the restricted comparator.
  MagicTarget h = MagicTarget::make(TargetKind::H, 48);
  auto psi = pipeline::PerturbedMagicState::make(h, mpq_class(1, 20), 25, 99);
  // take D0 = the union of supports of a few bumps, padded to m = 14
  std::vector<std::size_t> d0;
  for (const auto& b : psi.bumps()) {
    if (b.point.weight() <= 10) {
      for (std::size_t i : b.point.set_bits()) {
        if (std::find(d0.begin(), d0.end(), i) == d0.end()) d0.push_back(i);
      }
    }
    if (d0.size() >= 10) break;
  }
  for (std::size_t i = 0; d0.size() < 14 && i < 48; ++i) {
    if (std::find(d0.begin(), d0.end(), i) == d0.end()) d0.push_back(i);
  }
  d0.resize(14);
  std::sort(d0.begin(), d0.end());
  auto gt = pipeline::build_g_tilde_structured(psi, d0, 5, 64);
  CHECK(gt.agreement >= mpq_class(19, 20));
  CHECK(gt.disagreements <= gt.rs_error_total);
  if (gt.r_star > 0) {
    CHECK(gt.rs_errors.size() == gt.r_star);
  }
}

TEST_CASE("dense pipeline fails honestly for low-rank states") {
  MagicTarget h = MagicTarget::make(TargetKind::H, 12);
  auto d = fixtures::random_decomposition(12, 2, 33);
  auto res = pipeline::run_pipeline_dense(d, h, 3, 10, 32);
  // a random rank-2 state cannot approximate the threshold structure
  CHECK_FALSE(res.completed);
  CHECK(res.failed_stage == "layer_report");
  CHECK_FALSE(res.layers.passes);
}
