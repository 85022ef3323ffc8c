#include "stabrank/approx.hpp"

#include <mpfr.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace stabrank::approx {

using f2::BitMatrix;
using f2::BitVector;
using f2::Rng;

namespace {

// Smallest integer j >= value, for an exact real cyclotomic value.
long exact_ceil(const Cyclo& value, double estimate) {
  long j = static_cast<long>(std::floor(estimate)) - 2;
  while ((Cyclo::from_rational(mpq_class(j)) - value).sign_real() < 0) ++j;
  // Back off in case the estimate overshot by more than the slack.
  while (j > 0 &&
         (Cyclo::from_rational(mpq_class(j - 1)) - value).sign_real() >= 0) {
    --j;
  }
  return j;
}

mpz_class rational_ceil(const mpq_class& q) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return out;
}

mpz_class rational_floor(const mpq_class& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return out;
}

}  // namespace

ThresholdContext threshold_context(const MagicTarget& t) {
  ThresholdContext ctx;
  ctx.n = t.n();
  const std::size_t n = t.n();

  if (t.exact()) {
    Cyclo p = t.p_exact();
    // 0 < p < 1/2 is required; T sits exactly at 1/2 and is rejected.
    if (p.sign_real() <= 0 ||
        (p - Cyclo::from_rational(mpq_class(1, 2))).sign_real() >= 0) {
      throw std::invalid_argument(
          "threshold_context: target needs 0 < p < 1/2 (T is excluded)");
    }
    ctx.exact = true;
    ctx.p_estimate = t.p_float().get_d();
    Cyclo pn = p * mpq_class(static_cast<long>(n));
    long ks = exact_ceil(pn, ctx.p_estimate * n);
    bool pn_integral =
        (Cyclo::from_rational(mpq_class(ks)) - pn).sign_real() == 0;
    long floor_pn = pn_integral ? ks : ks - 1;
    ctx.k_star = static_cast<std::size_t>(ks);
    ctx.m = static_cast<std::size_t>(2 * floor_pn);

    // halfwidth: least h with h^2 >= 50 p n
    Cyclo fifty_pn = pn * mpq_class(50);
    long h = static_cast<long>(std::floor(std::sqrt(50.0 * ctx.p_estimate * n)));
    h = std::max<long>(h - 2, 0);
    while (
        (Cyclo::from_rational(mpq_class(h) * mpq_class(h)) - fifty_pn).sign_real() <
        0) {
      ++h;
    }
    ctx.window_halfwidth = static_cast<std::size_t>(h);
    ctx.window_lo = std::max<long>(0, ks - h);
    ctx.window_hi = std::min<long>(static_cast<long>(n), floor_pn + h);

    if (ctx.k_star >= 1) {
      Cyclo half_one_plus_eta = (Cyclo::one() + t.eta_exact()) * mpq_class(1, 2);
      ctx.thr_sq = half_one_plus_eta * half_one_plus_eta *
                   t.layer_weight_exact(ctx.k_star - 1);
    }
    return ctx;
  }

  // Float target (R): 512-bit arithmetic; p is irrational, so the integer
  // boundaries are unambiguous at this precision.
  const unsigned prec = 512;
  mpf_class p = t.p_float(prec);
  if (p <= 0 || p >= mpf_class(1, prec) / 2) {
    throw std::invalid_argument("threshold_context: target needs 0 < p < 1/2");
  }
  ctx.exact = false;
  ctx.p_estimate = p.get_d();
  mpf_class pn = p * static_cast<unsigned long>(n);
  mpf_class c(0, prec);
  mpf_ceil(c.get_mpf_t(), pn.get_mpf_t());
  ctx.k_star = static_cast<std::size_t>(c.get_ui());
  mpf_floor(c.get_mpf_t(), pn.get_mpf_t());
  long floor_pn = static_cast<long>(c.get_ui());
  ctx.m = static_cast<std::size_t>(2 * floor_pn);
  mpf_class root(0, prec);
  mpf_class arg = 50 * pn;
  mpf_sqrt(root.get_mpf_t(), arg.get_mpf_t());
  mpf_ceil(root.get_mpf_t(), root.get_mpf_t());
  long h = static_cast<long>(root.get_ui());
  ctx.window_halfwidth = static_cast<std::size_t>(h);
  ctx.window_lo = std::max<long>(0, static_cast<long>(ctx.k_star) - h);
  ctx.window_hi = std::min<long>(static_cast<long>(n), floor_pn + h);
  if (ctx.k_star >= 1) {
    mpf_class eta = t.eta_float(prec);
    mpf_class thr = (1 + eta) / 2 * t.layer_magnitude_float(ctx.k_star - 1, prec);
    ctx.thr_sq_f = thr * thr;
  }
  return ctx;
}

ThresholdContext threshold_context_rational(std::size_t n, const mpq_class& p) {
  if (p <= 0 || p > mpq_class(1, 2)) {
    throw std::invalid_argument("threshold_context_rational: need 0 < p <= 1/2");
  }
  ThresholdContext ctx;
  ctx.n = n;
  ctx.exact = false;
  ctx.p_estimate = p.get_d();
  mpq_class pn = p * static_cast<long>(n);
  mpz_class ks = rational_ceil(pn);
  mpz_class fl = rational_floor(pn);
  ctx.k_star = ks.get_ui();
  ctx.m = 2 * fl.get_ui();
  // least h with h^2 >= 50 p n
  mpq_class fifty_pn = 50 * pn;
  mpz_class num = fifty_pn.get_num(), den = fifty_pn.get_den();
  mpz_class scaled = num / den;
  mpz_class h;
  mpz_sqrt(h.get_mpz_t(), scaled.get_mpz_t());
  while (h * h * den < num) ++h;
  long hw = static_cast<long>(h.get_si());
  ctx.window_halfwidth = static_cast<std::size_t>(hw);
  ctx.window_lo = std::max<long>(0, static_cast<long>(ctx.k_star) - hw);
  ctx.window_hi =
      std::min<long>(static_cast<long>(n), static_cast<long>(fl.get_si()) + hw);
  return ctx;
}

BooleanFunction threshold_fn(std::size_t n, const mpq_class& p) {
  ThresholdContext ctx = threshold_context_rational(n, p);
  return BooleanFunction::threshold_weight(n, ctx.k_star);
}

BooleanFunction build_f_psi(const StabilizerDecomposition& d, const MagicTarget& t) {
  if (d.n() != t.n()) {
    throw std::invalid_argument("build_f_psi: dimension mismatch");
  }
  const std::size_t n = d.n();
  if (n > kDenseMaxN || n > kBooleanMaxM) {
    throw guard_error("build_f_psi: n exceeds the dense guard");
  }
  ThresholdContext ctx = threshold_context(t);
  BooleanFunction f(n);

  if (ctx.exact && d.exact_mode()) {
    std::vector<Cyclo> dv = d.eval_full_exact();
    for (std::uint32_t x = 0; x < (std::uint32_t{1} << n); ++x) {
      if (cmp_real(dv[x].norm_sq(), ctx.thr_sq) <= 0) f.set(x, true);
    }
    return f;
  }

  const mpf_class tol(1e-20, kFloatBits);
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << n); ++x) {
    BitVector xb = BitVector::from_bits(n, x);
    ComplexMP v = d.exact_mode() ? d.eval_exact(xb).to_complex() : d.eval_float(xb);
    if (v.norm_sq() <= ctx.thr_sq_f + tol) f.set(x, true);
  }
  return f;
}

LayerReport layer_report_from_counts(std::size_t n,
                                     const std::vector<mpz_class>& errors,
                                     const ThresholdContext& ctx,
                                     const mpq_class& eps, const mpq_class& gamma) {
  if (errors.size() != n + 1) {
    throw std::invalid_argument("layer_report_from_counts: need n+1 error counts");
  }
  LayerReport rep;
  rep.k_star = ctx.k_star;
  rep.window_halfwidth = ctx.window_halfwidth;
  rep.window_lo = ctx.window_lo;
  rep.window_hi = ctx.window_hi;
  rep.eps = eps;
  rep.gamma = gamma;
  for (unsigned k = 0; k <= n; ++k) {
    LayerRow row;
    row.k = k;
    mpz_bin_uiui(row.size.get_mpz_t(), n, k);
    row.errors = errors[k];
    row.fraction = mpq_class(row.errors) / mpq_class(row.size);
    row.fraction.canonicalize();
    row.eps_wrong = row.fraction >= eps;
    row.in_window = static_cast<long>(k) >= ctx.window_lo &&
                    static_cast<long>(k) <= ctx.window_hi;
    if (row.in_window) {
      ++rep.window_layers;
      if (row.eps_wrong) ++rep.wrong_in_window;
    }
    rep.rows.push_back(std::move(row));
  }
  rep.wrong_layer_fraction =
      rep.window_layers
          ? mpq_class(static_cast<unsigned long>(rep.wrong_in_window),
                      static_cast<unsigned long>(rep.window_layers))
          : mpq_class(0);
  rep.wrong_layer_fraction.canonicalize();
  rep.passes = rep.wrong_layer_fraction <= gamma;
  return rep;
}

LayerReport layer_error_report(const BooleanFunction& f, const ThresholdContext& ctx,
                               const mpq_class& eps, const mpq_class& gamma) {
  const std::size_t n = f.arity();
  std::vector<mpz_class> errors(n + 1, 0);
  std::vector<std::uint64_t> errs(n + 1, 0);
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << n); ++x) {
    bool thr = std::popcount(x) >= static_cast<int>(ctx.k_star);
    if (f.get(x) != thr) ++errs[std::popcount(x)];
  }
  for (std::size_t k = 0; k <= n; ++k) errors[k] = static_cast<unsigned long>(errs[k]);
  return layer_report_from_counts(n, errors, ctx, eps, gamma);
}

BooleanFunction restrict_fn(const BooleanFunction& f, const std::vector<std::size_t>& d) {
  return f.restricted(d);
}

RestrictionSearchResult restriction_search(
    std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed,
    const std::function<BooleanFunction(const std::vector<std::size_t>&)>& make_g) {
  if (m > n || m == 0) {
    throw std::invalid_argument("restriction_search: need 0 < m <= n");
  }
  BooleanFunction maj = BooleanFunction::majority(m);
  const std::uint64_t total = std::uint64_t{1} << m;
  Rng rng(seed);
  RestrictionSearchResult best;
  best.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<std::size_t> d = rng.subset(n, m);
    BooleanFunction g = make_g(d);
    std::uint64_t agree = total - g.count_disagree(maj);
    if (agree > best.agree_count || trial == 0) {
      best.agree_count = agree;
      best.d0 = d;
    }
  }
  best.agreement = mpq_class(best.agree_count, total);
  best.agreement.canonicalize();
  best.achieved = 4 * best.agree_count >= 3 * total;
  return best;
}

RestrictionSearchResult find_good_restriction(const BooleanFunction& f, std::size_t m,
                                              std::size_t trials, std::uint64_t seed) {
  return restriction_search(f.arity(), m, trials, seed,
                            [&](const std::vector<std::size_t>& d) {
                              return f.restricted(d);
                            });
}

RsApproxResult rs_subspace_approx(const AffineSubspace& a, std::size_t t,
                                  std::uint64_t seed, int retries) {
  if (a.is_empty()) {
    throw std::invalid_argument("rs_subspace_approx: subspace is empty");
  }
  const std::size_t m = a.ambient();
  if (m > kBooleanMaxM) {
    throw guard_error("rs_subspace_approx: ambient dimension exceeds the guard");
  }
  const std::size_t k = a.codim();

  BooleanFunction indicator(m);
  a.for_each_element(
      [&](const BitVector& x) { indicator.set(static_cast<std::uint32_t>(x.word(0)), true); });

  const std::uint64_t allowed =
      t >= m ? 0 : (std::uint64_t{1} << (m - t));

  Rng rng(seed);
  RsApproxResult best;
  bool have_best = false;
  BooleanFunction best_table(m);

  for (int attempt = 0; attempt < std::max(retries, 1); ++attempt) {
    // P = prod_{s=1..t} (a_{D_s} + 1) for random subsets D_s of the
    // constraint rows; always 1 on A.
    BooleanFunction p = BooleanFunction::constant(m, true);
    for (std::size_t s = 0; s < t; ++s) {
      std::uint64_t mask = k ? (rng.next() & ((std::uint64_t{1} << k) - 1)) : 0;
      BitVector coeffs(m);
      bool constant = false;
      for (std::size_t row = 0; row < k; ++row) {
        if ((mask >> row) & 1) {
          coeffs ^= a.constraints().row(row);
          constant ^= a.rhs().get(row);
        }
      }
      // factor = a_D(x) + 1: zero out the points where a_D(x) = 1
      for (std::uint32_t x = 0; x < (std::uint32_t{1} << m); ++x) {
        bool val = coeffs.dot(BitVector::from_bits(m, x)) ^ constant;
        if (val) p.set(x, false);
      }
    }
    std::uint64_t err = p.count_disagree(indicator);
    if (!have_best || err < best.error_count) {
      have_best = true;
      best.error_count = err;
      best.retries_used = static_cast<std::size_t>(attempt) + 1;
      best_table = p;
      if (err <= allowed) break;
    }
  }

  best.achieved = best.error_count <= allowed;
  // One-sidedness: P must dominate the indicator pointwise.
  BooleanFunction off = indicator;
  off &= [&] {
    BooleanFunction q = best_table;
    q.invert();
    return q;
  }();
  best.one_sided = off.count_ones() == 0;
  if (!best.one_sided) {
    throw std::logic_error("rs_subspace_approx: construction lost one-sidedness");
  }
  best.poly = F2Polynomial::from_truth_table(best_table);
  if (best.poly.degree() > t) {
    throw std::logic_error("rs_subspace_approx: degree exceeded t");
  }
  return best;
}

F2Polynomial truth_table_to_polynomial(const BooleanFunction& f) {
  return F2Polynomial::from_truth_table(f);
}

std::vector<ProjectedTerm> project_decomposition(const StabilizerDecomposition& d,
                                                 const std::vector<std::size_t>& dset) {
  const std::size_t n = d.n();
  const std::size_t m = dset.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (dset[i] >= n || (i && dset[i] <= dset[i - 1])) {
      throw std::invalid_argument("project_decomposition: D must be sorted within [n]");
    }
  }
  std::vector<ProjectedTerm> out;
  out.reserve(d.rank());
  for (const auto& term : d.terms()) {
    ProjectedTerm p{AffineForm(term.phi.ell().coeffs().gather(dset), false),
                    f2::QuadraticForm(m), AffineSubspace()};
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (term.phi.quad_form().quad().get(dset[i], dset[j])) {
          p.q.set_quad(i, j);
        }
      }
      if (term.phi.quad_form().linear().get(dset[i])) p.q.set_linear(i);
    }
    p.q.set_constant(term.phi.quad_form().constant());

    const AffineSubspace& a = term.phi.support();
    BitMatrix md(0, m);
    for (std::size_t row = 0; row < a.codim(); ++row) {
      md.append_row(a.constraints().row(row).gather(dset));
    }
    if (md.rows() == 0) md = BitMatrix(0, m);
    p.support = AffineSubspace::from_constraints(md, a.rhs());
    out.push_back(std::move(p));
  }
  return out;
}

GTildeResult build_g_tilde(const StabilizerDecomposition& d,
                           const std::vector<std::size_t>& dset,
                           const MagicTarget& t, std::uint64_t seed, int retries,
                           std::optional<std::size_t> t_override) {
  const std::size_t r = d.rank();
  const std::size_t m = dset.size();
  if (r == 0) {
    throw std::invalid_argument("build_g_tilde: decomposition is empty");
  }
  if (3 * r > 18) {
    throw guard_error("build_g_tilde: comparator arity 3r exceeds the guard (r <= 6)");
  }
  if (m > kBooleanMaxM) {
    throw guard_error("build_g_tilde: |D| exceeds the dense guard");
  }
  ThresholdContext ctx = threshold_context(t);
  std::vector<ProjectedTerm> proj = project_decomposition(d, dset);

  GTildeResult res;
  res.g = BooleanFunction(m);
  res.h_arity = 3 * r;

  // h on (y_1..y_r, z_1..z_r, v_1..v_r): the comparator of the weighted sum.
  const std::size_t h_size = std::size_t{1} << (3 * r);
  std::vector<bool> h(h_size);
  const bool exact = ctx.exact && d.exact_mode();
  const mpf_class tol(1e-20, kFloatBits);
  for (std::size_t pat = 0; pat < h_size; ++pat) {
    if (exact) {
      Cyclo val;
      for (std::size_t j = 0; j < r; ++j) {
        if (!((pat >> (2 * r + j)) & 1)) continue;
        unsigned y = (pat >> j) & 1, z = (pat >> (r + j)) & 1;
        val += d.terms()[j].c * Cyclo::zeta_pow(4 * static_cast<long>(y + 2 * z));
      }
      h[pat] = cmp_real(val.norm_sq(), ctx.thr_sq) <= 0;
    } else {
      ComplexMP val;
      for (std::size_t j = 0; j < r; ++j) {
        if (!((pat >> (2 * r + j)) & 1)) continue;
        unsigned y = (pat >> j) & 1, z = (pat >> (r + j)) & 1;
        ComplexMP c = d.exact_mode() ? d.terms()[j].c.to_complex()
                                     : d.terms()[j].c_float;
        val += c * Cyclo::zeta_pow(4 * static_cast<long>(y + 2 * z)).to_complex();
      }
      h[pat] = val.norm_sq() <= ctx.thr_sq_f + tol;
    }
  }

  // RS polynomials for the projected supports.
  std::size_t tj = t_override.value_or(static_cast<std::size_t>(
      std::ceil(std::log2(20.0 * static_cast<double>(r)))));
  std::vector<BooleanFunction> p_tables;
  std::vector<F2Polynomial> p_polys;
  for (std::size_t j = 0; j < r; ++j) {
    res.rs_t.push_back(tj);
    if (proj[j].support.is_empty()) {
      p_polys.push_back(F2Polynomial::zero(m));
      p_tables.push_back(BooleanFunction(m));
      res.rs_errors.push_back(0);
      continue;
    }
    RsApproxResult rs = rs_subspace_approx(proj[j].support, tj, seed + 101 * j, retries);
    res.rs_errors.push_back(rs.error_count);
    p_tables.push_back(rs.poly.truth_table());
    p_polys.push_back(std::move(rs.poly));
  }
  for (auto e : res.rs_errors) res.rs_error_total += e;

  // g and g~ share the pattern plumbing; only the v-inputs differ.
  BooleanFunction g_tilde_table(m);
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << m); ++x) {
    BitVector xb = BitVector::from_bits(m, x);
    std::size_t pat_exact = 0, pat_approx = 0;
    for (std::size_t j = 0; j < r; ++j) {
      std::size_t y = proj[j].ell.eval(xb) ? 1 : 0;
      std::size_t z = proj[j].q.eval(xb) ? 1 : 0;
      std::size_t v = (!proj[j].support.is_empty() && proj[j].support.contains(xb)) ? 1 : 0;
      std::size_t vp = p_tables[j].get(x) ? 1 : 0;
      pat_exact |= (y << j) | (z << (r + j)) | (v << (2 * r + j));
      pat_approx |= (y << j) | (z << (r + j)) | (vp << (2 * r + j));
    }
    if (h[pat_exact]) res.g.set(x, true);
    if (h[pat_approx]) g_tilde_table.set(x, true);
  }

  res.g_tilde = F2Polynomial::from_truth_table(g_tilde_table);
  res.degree = res.g_tilde.degree();
  std::size_t log_term = static_cast<std::size_t>(
      std::ceil(std::log2(20.0 * static_cast<double>(r))));
  res.degree_bound = 3 * r * std::max<std::size_t>(2, log_term);
  if (!t_override && res.degree > res.degree_bound) {
    throw std::logic_error("build_g_tilde: degree bound violated");
  }

  res.disagreements = g_tilde_table.count_disagree(res.g);
  if (res.disagreements > res.rs_error_total) {
    throw std::logic_error("build_g_tilde: union bound violated");
  }
  res.agreement = mpq_class(
      static_cast<unsigned long>((std::uint64_t{1} << m) - res.disagreements),
      static_cast<unsigned long>(std::uint64_t{1} << m));
  res.agreement.canonicalize();
  return res;
}

WrongMassReport wrong_point_mass_bound_check(const StabilizerDecomposition& d,
                                             const MagicTarget& t) {
  if (!t.exact() || !d.exact_mode()) {
    throw std::domain_error("wrong_point_mass_bound_check: exact mode only");
  }
  const std::size_t n = d.n();
  if (n > kDenseMaxN || n > kBooleanMaxM) {
    throw guard_error("wrong_point_mass_bound_check: n exceeds the dense guard");
  }
  ThresholdContext ctx = threshold_context(t);
  std::vector<Cyclo> dv = d.eval_full_exact();
  Cyclo half_one_minus_eta = (Cyclo::one() - t.eta_exact()) * mpq_class(1, 2);
  Cyclo factor_sq = half_one_minus_eta * half_one_minus_eta;

  WrongMassReport rep;
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << n); ++x) {
    std::size_t k = std::popcount(x);
    bool f_val = cmp_real(dv[x].norm_sq(), ctx.thr_sq) <= 0;
    bool thr = k >= ctx.k_star;
    if (f_val == thr) continue;
    ++rep.wrong_points;
    Cyclo diff_sq = (dv[x] - t.amplitude_exact(k)).norm_sq();
    rep.wrong_mass += diff_sq;
    if (cmp_real(diff_sq, t.layer_weight_exact(k) * factor_sq) < 0) {
      rep.inequality_holds = false;
    }
  }
  return rep;
}

mpq_class binomial_layer_mass(unsigned long n, const mpq_class& p, unsigned long k) {
  if (k > n) {
    throw std::invalid_argument("binomial_layer_mass: k out of range");
  }
  if (p < 0 || p > 1) {
    throw std::invalid_argument("binomial_layer_mass: p out of [0,1]");
  }
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), n, k);
  mpz_class num = p.get_num(), den = p.get_den();
  mpz_class comp = den - num;  // (1-p) numerator over the same denominator
  mpz_class num_k, comp_nk, den_n;
  mpz_pow_ui(num_k.get_mpz_t(), num.get_mpz_t(), k);
  mpz_pow_ui(comp_nk.get_mpz_t(), comp.get_mpz_t(), n - k);
  mpz_pow_ui(den_n.get_mpz_t(), den.get_mpz_t(), n);
  mpq_class mass(binom * num_k * comp_nk, den_n);
  mass.canonicalize();
  return mass;
}

unsigned long shifted_layer_index(unsigned long n, const mpq_class& p, long c) {
  mpq_class pn = p * mpz_class(n);
  if (c == 0) {
    return rational_ceil(pn).get_ui();
  }
  mpz_class s;
  mpz_class nn(n);
  mpz_sqrt(s.get_mpz_t(), nn.get_mpz_t());
  if (s * s == nn) {
    mpq_class exact = pn + mpq_class(c) * s;
    mpz_class idx = rational_ceil(exact);
    if (idx < 0) throw std::invalid_argument("shifted_layer_index: below zero");
    return idx.get_ui();
  }
  // Enclose sqrt(n) between L/2^b and (L+1)/2^b and tighten until the
  // ceiling is determined.
  for (unsigned b = 32;; b *= 2) {
    mpz_class scaled = nn << (2 * b);
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    mpq_class lo_r(root, mpz_class(1) << b);
    mpq_class hi_r(root + 1, mpz_class(1) << b);
    lo_r.canonicalize();
    hi_r.canonicalize();
    mpq_class lo = pn + mpq_class(c) * (c > 0 ? lo_r : hi_r);
    mpq_class hi = pn + mpq_class(c) * (c > 0 ? hi_r : lo_r);
    mpz_class cl = rational_ceil(lo), ch = rational_ceil(hi);
    if (cl == ch) {
      if (cl < 0) throw std::invalid_argument("shifted_layer_index: below zero");
      return cl.get_ui();
    }
    if (b > 4096) {
      throw std::logic_error("shifted_layer_index: enclosure failed to converge");
    }
  }
}

BinomialRatioReport binomial_ratio_check(unsigned long n, const mpq_class& p, long c) {
  BinomialRatioReport rep;
  rep.c = c;
  rep.k_center = rational_ceil(p * mpz_class(n)).get_ui();
  rep.k_shifted = shifted_layer_index(n, p, c);
  if (rep.k_shifted > n || rep.k_center > n) {
    throw std::invalid_argument("binomial_ratio_check: shifted layer out of range");
  }
  rep.w_center = binomial_layer_mass(n, p, rep.k_center);
  rep.w_shifted = binomial_layer_mass(n, p, rep.k_shifted);
  rep.ratio = rep.w_center / rep.w_shifted;
  rep.ratio.canonicalize();

  // bound = e^{C^2/p + C^2/(1-p)} * 1.1
  mpq_class exponent = mpq_class(c * c) / p + mpq_class(c * c) / (1 - p);
  exponent.canonicalize();
  mpfr_t e, x;
  mpfr_inits2(kFloatBits, e, x, nullptr);
  mpfr_set_q(x, exponent.get_mpq_t(), MPFR_RNDN);
  mpfr_exp(e, x, MPFR_RNDN);
  mpfr_mul_d(e, e, 1.1, MPFR_RNDN);
  mpf_class bound(0, kFloatBits);
  mpfr_get_f(bound.get_mpf_t(), e, MPFR_RNDN);
  mpfr_clears(e, x, nullptr);
  rep.bound = bound;

  mpf_class ratio_f(0, kFloatBits);
  mpf_set_q(ratio_f.get_mpf_t(), rep.ratio.get_mpq_t());
  rep.within_bound = ratio_f <= rep.bound;
  return rep;
}

mpq_class expected_incorrect_survivors(std::size_t n, std::size_t m,
                                       const LayerReport& report) {
  mpq_class total = 0;
  for (const auto& row : report.rows) {
    if (!row.in_window || row.k > m) continue;
    mpz_class cm, cn;
    mpz_bin_uiui(cm.get_mpz_t(), m, row.k);
    mpz_bin_uiui(cn.get_mpz_t(), n, row.k);
    total += mpq_class(row.errors * cm) / mpq_class(cn);
  }
  total.canonicalize();
  return total;
}

mpq_class rational_p(const MagicTarget& t, unsigned digits) {
  unsigned prec = std::max<unsigned>(kFloatBits, digits * 4 + 64);
  mpf_class p = t.p_float(prec);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpf_class scaled = p;
  mpf_class scale_f(0, prec);
  mpf_set_z(scale_f.get_mpf_t(), scale.get_mpz_t());
  scaled *= scale_f;
  mpf_class fl(0, prec);
  mpf_floor(fl.get_mpf_t(), scaled.get_mpf_t());
  mpz_class num;
  mpz_set_f(num.get_mpz_t(), fl.get_mpf_t());
  mpq_class out(num, scale);
  out.canonicalize();
  return out;
}

}  // namespace stabrank::approx
