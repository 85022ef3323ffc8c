#include "stabrank/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace stabrank::pipeline {

using f2::Rng;

ComplexMP PerturbedMagicState::bump_value_float(const Bump& b) const {
  ComplexMP z = Cyclo::zeta_pow(static_cast<long>(b.phase)).to_complex(512);
  mpf_class mag(0, 512);
  mpf_set_q(mag.get_mpf_t(), b.magnitude.get_mpq_t());
  z.re *= mag;
  z.im *= mag;
  return z;
}

PerturbedMagicState PerturbedMagicState::make(const MagicTarget& t,
                                              const mpq_class& delta,
                                              std::size_t count,
                                              std::uint64_t seed) {
  if (delta < 0) {
    throw std::invalid_argument("PerturbedMagicState: delta must be nonnegative");
  }
  PerturbedMagicState st;
  st.target_ = t;
  st.ctx_ = approx::threshold_context(t);
  const std::size_t n = t.n();

  // Base comparator verdicts per layer; for valid targets this is exactly
  // the threshold [k >= k*], which the loop verifies rather than assumes.
  st.base_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    st.base_[k] = st.base_verdict(k);
    if (st.base_[k] != (k >= st.ctx_.k_star)) {
      throw std::logic_error("PerturbedMagicState: base comparator is not THR");
    }
  }

  if (delta == 0 || count == 0) {
    return st;
  }

  // |bump|^2 = delta^2 / count; the magnitude must be rational to stay in
  // the field, so delta/sqrt(count) is rounded to 30 digits when count is
  // not a perfect square (exact otherwise).
  mpq_class mag;
  mpz_class root;
  mpz_class cnt(static_cast<unsigned long>(count));
  mpz_sqrt(root.get_mpz_t(), cnt.get_mpz_t());
  if (root * root == cnt) {
    mag = delta / mpq_class(root);
  } else {
    mpf_class df(0, 320);
    mpf_set_q(df.get_mpf_t(), delta.get_mpq_t());
    mpf_class cf(static_cast<double>(count), 320);
    mpf_sqrt(cf.get_mpf_t(), cf.get_mpf_t());
    df /= cf;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, 30);
    mpf_class scale_f(0, 320);
    mpf_set_z(scale_f.get_mpf_t(), scale.get_mpz_t());
    df *= scale_f;
    mpf_class fl(0, 320);
    mpf_floor(fl.get_mpf_t(), df.get_mpf_t());
    mpz_class num;
    mpz_set_f(num.get_mpz_t(), fl.get_mpf_t());
    mag = mpq_class(num, scale);
  }
  mag.canonicalize();
  if (mag <= 0) {
    throw std::invalid_argument("PerturbedMagicState: delta too small for count");
  }

  // Eligible layers: inside the window and large enough that `count` flips
  // can never reach an eps = 1/100 fraction.
  mpz_class min_size(static_cast<unsigned long>(100 * count + 1));
  std::vector<std::size_t> eligible;
  std::vector<double> weights;
  for (long k = st.ctx_.window_lo; k <= st.ctx_.window_hi; ++k) {
    mpz_class size;
    mpz_bin_uiui(size.get_mpz_t(), n, static_cast<unsigned long>(k));
    if (size < min_size) continue;
    eligible.push_back(static_cast<std::size_t>(k));
    double logw = std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1) +
                  k * std::log(st.ctx_.p_estimate) +
                  (n - k) * std::log1p(-st.ctx_.p_estimate);
    weights.push_back(logw);
  }
  if (eligible.empty()) {
    throw std::invalid_argument(
        "PerturbedMagicState: no window layer can absorb the perturbation");
  }
  double max_logw = *std::max_element(weights.begin(), weights.end());
  std::vector<double> cumulative;
  double acc = 0;
  for (double lw : weights) {
    acc += std::exp(lw - max_logw);
    cumulative.push_back(acc);
  }

  Rng rng(seed);
  std::map<BitVector, bool> taken;
  while (st.bumps_.size() < count) {
    double u = static_cast<double>(rng.next() >> 11) * 0x1.0p-53 * acc;
    std::size_t pick = std::lower_bound(cumulative.begin(), cumulative.end(), u) -
                       cumulative.begin();
    if (pick >= eligible.size()) pick = eligible.size() - 1;
    std::size_t k = eligible[pick];
    std::vector<std::size_t> support = rng.subset(n, k);
    BitVector point(n);
    for (std::size_t i : support) point.set(i, true);
    if (taken.count(point)) continue;
    taken.emplace(point, true);
    Bump b;
    b.point = point;
    b.phase = static_cast<unsigned>(rng.below(16));
    b.magnitude = mag;
    st.bumps_.push_back(std::move(b));
  }

  // Comparator verdict at each bump point.
  for (const Bump& b : st.bumps_) {
    std::size_t k = b.point.weight();
    if (t.exact()) {
      Cyclo val = t.amplitude_exact(k) +
                  Cyclo::zeta_pow(static_cast<long>(b.phase)) *
                      Cyclo::from_rational(b.magnitude);
      st.bump_f_.push_back(stab::cmp_real(val.norm_sq(), st.ctx_.thr_sq) <= 0);
    } else {
      ComplexMP val = t.amplitude_float(k, 512) + st.bump_value_float(b);
      st.bump_f_.push_back(val.norm_sq() <= st.ctx_.thr_sq_f);
    }
  }
  return st;
}

mpq_class PerturbedMagicState::perturbation_norm_sq() const {
  mpq_class s = 0;
  for (const Bump& b : bumps_) s += b.magnitude * b.magnitude;
  s.canonicalize();
  return s;
}

Cyclo PerturbedMagicState::eval_exact(const BitVector& x) const {
  if (!target_.exact()) {
    throw std::domain_error("eval_exact: float-mode target");
  }
  Cyclo v = target_.amplitude_exact(x.weight());
  for (const Bump& b : bumps_) {
    if (b.point == x) {
      v += Cyclo::zeta_pow(static_cast<long>(b.phase)) *
           Cyclo::from_rational(b.magnitude);
    }
  }
  return v;
}

bool PerturbedMagicState::base_verdict(std::size_t k) const {
  if (target_.exact()) {
    return stab::cmp_real(target_.layer_weight_exact(k), ctx_.thr_sq) <= 0;
  }
  mpf_class mk = target_.layer_magnitude_float(k, 512);
  return mk * mk <= ctx_.thr_sq_f;
}

bool PerturbedMagicState::f_value(const BitVector& x) const {
  for (std::size_t i = 0; i < bumps_.size(); ++i) {
    if (bumps_[i].point == x) return bump_f_[i];
  }
  return base_[x.weight()];
}

bool PerturbedMagicState::f_equals_threshold() const {
  for (std::size_t k = 0; k < base_.size(); ++k) {
    if (base_[k] != (k >= ctx_.k_star)) return false;
  }
  for (std::size_t i = 0; i < bumps_.size(); ++i) {
    if (bump_f_[i] != (bumps_[i].point.weight() >= ctx_.k_star)) return false;
  }
  return true;
}

LayerReport PerturbedMagicState::layer_report(const mpq_class& eps,
                                              const mpq_class& gamma) const {
  const std::size_t n = target_.n();
  std::vector<mpz_class> errors(n + 1, 0);
  for (std::size_t i = 0; i < bumps_.size(); ++i) {
    std::size_t k = bumps_[i].point.weight();
    bool thr = k >= ctx_.k_star;
    if (bump_f_[i] != thr) errors[k] += 1;
  }
  return approx::layer_report_from_counts(n, errors, ctx_, eps, gamma);
}

std::vector<std::pair<BitVector, bool>> PerturbedMagicState::plane_flips(
    const std::vector<std::size_t>& d) const {
  std::vector<std::pair<BitVector, bool>> out;
  const std::size_t m = d.size();
  for (std::size_t i = 0; i < bumps_.size(); ++i) {
    const BitVector& pt = bumps_[i].point;
    BitVector reduced = pt.gather(d);
    if (reduced.scatter(target_.n(), d) == pt) {
      // support lies inside D; record the comparator verdict at the point
      BitVector xbar(m);
      for (std::size_t j = 0; j < m; ++j) {
        if (pt.get(d[j])) xbar.set(j, true);
      }
      out.emplace_back(xbar, bump_f_[i]);
    }
  }
  return out;
}

BooleanFunction PerturbedMagicState::restrict_dense(
    const std::vector<std::size_t>& d) const {
  const std::size_t m = d.size();
  if (m > kBooleanMaxM) {
    throw guard_error("restrict_dense: |D| exceeds the dense guard");
  }
  BooleanFunction g(m);
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << m); ++x) {
    if (base_[std::popcount(x)]) g.set(x, true);
  }
  for (const auto& [xbar, verdict] : plane_flips(d)) {
    g.set(static_cast<std::uint32_t>(xbar.word(0)), verdict);
  }
  return g;
}

StructuredGTilde build_g_tilde_structured(const PerturbedMagicState& psi,
                                          const std::vector<std::size_t>& d0,
                                          std::uint64_t seed, int retries) {
  const std::size_t m = d0.size();
  if (m > kBooleanMaxM) {
    throw guard_error("build_g_tilde_structured: |D| exceeds the dense guard");
  }
  StructuredGTilde res;
  res.g = psi.restrict_dense(d0);

  auto flips = psi.plane_flips(d0);
  res.r_star = flips.size();

  // Exact ANF of the base threshold; corrections use RS point indicators.
  BooleanFunction thr_table =
      BooleanFunction::threshold_weight(m, psi.ctx().k_star);
  std::size_t tj = res.r_star
                       ? static_cast<std::size_t>(std::ceil(
                             std::log2(20.0 * static_cast<double>(res.r_star))))
                       : 0;

  std::vector<BooleanFunction> p_tables;
  for (std::size_t b = 0; b < res.r_star; ++b) {
    auto rs = approx::rs_subspace_approx(
        f2::AffineSubspace::point(flips[b].first), tj, seed + 131 * b, retries);
    res.rs_t.push_back(tj);
    res.rs_errors.push_back(rs.error_count);
    res.rs_error_total += rs.error_count;
    p_tables.push_back(rs.poly.truth_table());
  }

  // g~(x) = g_b at the first bump whose indicator fires, else THR(x).
  BooleanFunction g_tilde_table = thr_table;
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << m); ++x) {
    for (std::size_t b = 0; b < res.r_star; ++b) {
      if (p_tables[b].get(x)) {
        g_tilde_table.set(x, flips[b].second);
        break;
      }
    }
  }

  res.g_tilde = F2Polynomial::from_truth_table(g_tilde_table);
  res.degree = res.g_tilde.degree();
  res.disagreements = g_tilde_table.count_disagree(res.g);
  if (res.disagreements > res.rs_error_total) {
    throw std::logic_error("build_g_tilde_structured: union bound violated");
  }
  const std::uint64_t total = std::uint64_t{1} << m;
  res.agreement = mpq_class(static_cast<unsigned long>(total - res.disagreements),
                            static_cast<unsigned long>(total));
  res.agreement.canonicalize();
  BooleanFunction maj = BooleanFunction::majority(m);
  res.maj_agree_count = total - g_tilde_table.count_disagree(maj);
  res.maj_agreement = mpq_class(static_cast<unsigned long>(res.maj_agree_count),
                                static_cast<unsigned long>(total));
  res.maj_agreement.canonicalize();
  return res;
}

namespace {

void finish_stage4(PipelineResult& out, const mpq_class& g_agreement,
                   const mpq_class& maj_agreement, std::size_t degree,
                   std::size_t r_star, const std::vector<std::uint64_t>& rs_errors) {
  out.g_agreement = g_agreement;
  out.maj_agreement = maj_agreement;
  out.degree = degree;
  out.r_star = r_star;
  out.rs_errors = rs_errors;
  out.stage4_pass = g_agreement >= mpq_class(19, 20);
  out.maj_pass = maj_agreement >= mpq_class(2, 3);
  out.completed = true;
  if (!out.stage4_pass) {
    out.failed_stage = "g_tilde_agreement";
  } else if (!out.maj_pass) {
    out.failed_stage = "maj_agreement";
  }
}

}  // namespace

PipelineResult run_pipeline_structured(const MagicTarget& t, const mpq_class& delta,
                                       std::size_t bump_count, std::uint64_t seed,
                                       std::size_t trials, int retries,
                                       bool inject_not_thr) {
  PipelineResult out;
  out.structured = true;
  out.exact_arithmetic = t.exact();
  out.n = t.n();

  PerturbedMagicState psi = PerturbedMagicState::make(t, delta, bump_count, seed);
  out.ctx = psi.ctx();
  out.perturbation_norm_sq = psi.perturbation_norm_sq();
  out.bump_count = psi.bumps().size();

  // Stage 1: with no perturbation f_psi must equal THR_{k*} exactly.
  out.f_equals_thr = !inject_not_thr && psi.f_equals_threshold();

  // Stage 2: layer report.
  if (inject_not_thr) {
    // f = not THR: every point of every layer is wrong.
    std::vector<mpz_class> errors(out.n + 1);
    for (std::size_t k = 0; k <= out.n; ++k) {
      mpz_bin_uiui(errors[k].get_mpz_t(), out.n, k);
    }
    out.layers = approx::layer_report_from_counts(out.n, errors, psi.ctx(),
                                                  mpq_class(1, 100), mpq_class(1, 100));
  } else {
    out.layers = psi.layer_report(mpq_class(1, 100), mpq_class(1, 100));
  }
  out.stage2_pass = out.layers.passes;
  if (!out.stage2_pass) {
    out.failed_stage = "layer_report";
    return out;
  }

  // Stage 3: restriction search against Maj_m.
  const std::size_t m = psi.ctx().m;
  out.restriction = approx::restriction_search(
      out.n, m, trials, seed ^ 0x9e3779b97f4a7c15ull,
      [&](const std::vector<std::size_t>& d) { return psi.restrict_dense(d); });
  out.stage3_pass = out.restriction.achieved;
  if (!out.stage3_pass) {
    out.failed_stage = "restriction";
    return out;
  }

  // Stage 4: low-degree approximation of the restricted comparator.
  StructuredGTilde gt =
      build_g_tilde_structured(psi, out.restriction.d0, seed + 7, retries);
  finish_stage4(out, gt.agreement, gt.maj_agreement, gt.degree, gt.r_star,
                gt.rs_errors);
  return out;
}

PipelineResult run_pipeline_dense(const StabilizerDecomposition& d,
                                  const MagicTarget& t, std::uint64_t seed,
                                  std::size_t trials, int retries) {
  PipelineResult out;
  out.structured = false;
  out.exact_arithmetic = t.exact() && d.exact_mode();
  out.n = t.n();
  out.ctx = approx::threshold_context(t);

  BooleanFunction f = approx::build_f_psi(d, t);
  BooleanFunction thr = BooleanFunction::threshold_weight(out.n, out.ctx.k_star);
  out.f_equals_thr = (f == thr);

  out.layers = approx::layer_error_report(f, out.ctx);
  out.stage2_pass = out.layers.passes;
  if (!out.stage2_pass) {
    out.failed_stage = "layer_report";
    return out;
  }

  const std::size_t m = out.ctx.m;
  out.restriction =
      approx::find_good_restriction(f, m, trials, seed ^ 0x9e3779b97f4a7c15ull);
  out.stage3_pass = out.restriction.achieved;
  if (!out.stage3_pass) {
    out.failed_stage = "restriction";
    return out;
  }

  GTildeResult gt = approx::build_g_tilde(d, out.restriction.d0, t, seed + 7, retries);
  // g from the projected terms must match the restriction of f.
  BooleanFunction g_check = f.restricted(out.restriction.d0);
  if (!(g_check == gt.g)) {
    throw std::logic_error("pipeline: projected comparator disagrees with restriction");
  }
  BooleanFunction maj = BooleanFunction::majority(m);
  BooleanFunction gt_table = gt.g_tilde.truth_table();
  const std::uint64_t total = std::uint64_t{1} << m;
  std::uint64_t maj_agree = total - gt_table.count_disagree(maj);
  mpq_class maj_agreement(static_cast<unsigned long>(maj_agree),
                          static_cast<unsigned long>(total));
  maj_agreement.canonicalize();
  finish_stage4(out, gt.agreement, maj_agreement, gt.degree, d.rank(), gt.rs_errors);
  return out;
}

}  // namespace stabrank::pipeline
