#pragma once

#include "stabrank/approx.hpp"

namespace stabrank::pipeline {

using approx::BooleanFunction;
using approx::F2Polynomial;
using approx::GTildeResult;
using approx::LayerReport;
using approx::RestrictionSearchResult;
using approx::ThresholdContext;
using f2::BitVector;
using stab::ComplexMP;
using stab::Cyclo;
using stab::MagicTarget;
using stab::StabilizerDecomposition;

// A sparse perturbation of F_B: finitely many bumped points, each carrying an
// exact value s * zeta^phase with rational s > 0. Keeps every pipeline
// quantity computable at large n: off the bumps the state is layer-symmetric,
// so layer counts reduce to combinatorics plus a handful of exact
// comparisons.
struct Bump {
  BitVector point;
  unsigned phase = 0;      // value multiplies zeta^phase
  mpq_class magnitude;     // s > 0, rational so the state stays in the field
};

class PerturbedMagicState {
 public:
  // K bump points sampled from the binomial layer profile restricted to
  // window layers large enough that the perturbation can never make a layer
  // eps-wrong; |bump|^2 = delta^2/count each, so the exact perturbation norm
  // is delta when delta/sqrt(count) is rational (count=25, delta=1/20 in the
  // standard configuration).
  static PerturbedMagicState make(const MagicTarget& t, const mpq_class& delta,
                                  std::size_t count, std::uint64_t seed);

  const MagicTarget& target() const { return target_; }
  const ThresholdContext& ctx() const { return ctx_; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  mpq_class perturbation_norm_sq() const;

  Cyclo eval_exact(const BitVector& x) const;
  // f_psi(x) = [ |psi(x)| <= thr ]; exact for H, 512-bit floats for R.
  bool f_value(const BitVector& x) const;
  // Comparator outcome for an unperturbed point on layer k.
  bool base_verdict(std::size_t k) const;
  // True iff f_psi == THR_{k*} on every layer (layer-symmetric check plus
  // per-bump comparisons).
  bool f_equals_threshold() const;

  LayerReport layer_report(const mpq_class& eps, const mpq_class& gamma) const;
  // Dense restriction to a sorted index set D (|D| <= kBooleanMaxM).
  BooleanFunction restrict_dense(const std::vector<std::size_t>& d) const;
  // Bumps whose support lies inside D, reindexed to m-bit points.
  std::vector<std::pair<BitVector, bool>> plane_flips(
      const std::vector<std::size_t>& d) const;

 private:
  MagicTarget target_;
  ThresholdContext ctx_;
  std::vector<Bump> bumps_;
  std::vector<bool> base_;       // base comparator verdict per layer 0..n
  std::vector<bool> bump_f_;     // comparator verdict at each bump point
  ComplexMP bump_value_float(const Bump& b) const;
};

// Stage 4 on a structured state: the restricted comparator is the exact
// threshold ANF corrected at the in-plane bump points, whose indicators are
// replaced by RS approximations with per-point error at most 1/(20 r*).
struct StructuredGTilde {
  F2Polynomial g_tilde;
  BooleanFunction g;
  std::size_t r_star = 0;          // in-plane bumps
  std::uint64_t disagreements = 0; // vs g, exact
  mpq_class agreement;
  std::uint64_t maj_agree_count = 0;
  mpq_class maj_agreement;
  std::size_t degree = 0;
  std::vector<std::size_t> rs_t;
  std::vector<std::uint64_t> rs_errors;
  std::uint64_t rs_error_total = 0;
};

StructuredGTilde build_g_tilde_structured(const PerturbedMagicState& psi,
                                          const std::vector<std::size_t>& d0,
                                          std::uint64_t seed, int retries);

struct PipelineResult {
  bool structured = false;
  bool exact_arithmetic = false;
  std::size_t n = 0;
  ThresholdContext ctx;
  mpq_class perturbation_norm_sq;
  std::size_t bump_count = 0;
  bool f_equals_thr = false;       // stage 1
  LayerReport layers;              // stage 2
  bool stage2_pass = false;
  RestrictionSearchResult restriction;  // stage 3
  bool stage3_pass = false;
  // stage 4
  std::size_t degree = 0;
  mpq_class g_agreement;       // g~ vs g
  mpq_class maj_agreement;     // g~ vs Maj_m
  bool stage4_pass = false;    // g agreement >= 19/20
  bool maj_pass = false;       // maj agreement >= 2/3
  std::size_t r_star = 0;
  std::vector<std::uint64_t> rs_errors;
  bool completed = false;      // all stages ran
  std::string failed_stage;    // first failing stage, if any
};

// Structured pipeline at arbitrary n: exact target plus sparse perturbation.
// `inject_not_thr` replaces f by the negated threshold to exercise the
// failure path.
PipelineResult run_pipeline_structured(const MagicTarget& t, const mpq_class& delta,
                                       std::size_t bump_count, std::uint64_t seed,
                                       std::size_t trials, int retries,
                                       bool inject_not_thr = false);

// Dense pipeline from an explicit decomposition (n within the dense guard).
PipelineResult run_pipeline_dense(const StabilizerDecomposition& d,
                                  const MagicTarget& t, std::uint64_t seed,
                                  std::size_t trials, int retries);

}  // namespace stabrank::pipeline
