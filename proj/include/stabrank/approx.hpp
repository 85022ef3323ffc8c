#pragma once

#include <functional>
#include <optional>

#include "stabrank/boolean.hpp"
#include "stabrank/stabilizer.hpp"

namespace stabrank::approx {

using stab::ComplexMP;
using stab::Cyclo;
using stab::MagicTarget;
using stab::StabilizerDecomposition;

// Paper-parameter conventions for a target at a given n, with every integer
// derived exactly: k* = ceil(pn) (threshold index), m = 2 floor(pn)
// (restriction size), half = ceil(5 sqrt(2pn)) and the closed layer window
// [ceil(pn - half), floor(pn + half)] clamped to [0, n].
struct ThresholdContext {
  std::size_t n = 0;
  std::size_t k_star = 0;
  std::size_t m = 0;
  std::size_t window_halfwidth = 0;
  long window_lo = 0, window_hi = 0;  // clamped, inclusive
  bool exact = false;                 // true for H (cyclotomic comparisons)
  Cyclo thr_sq;                       // ((1+eta)/2 m_{k*-1})^2, exact targets
  mpf_class thr_sq_f{0, kFloatBits};  // float targets
  double p_estimate = 0;
};

ThresholdContext threshold_context(const MagicTarget& t);
// Exact-rational p (no comparator threshold; index machinery only).
ThresholdContext threshold_context_rational(std::size_t n, const mpq_class& p);

// THR_{pn} as a dense function: 1 iff |x| >= ceil(pn).
BooleanFunction threshold_fn(std::size_t n, const mpq_class& p);

// f_psi(x) = [ |d(x)| <= (1+eta)/2 * m_{k*-1} ], dense over 2^n.
BooleanFunction build_f_psi(const StabilizerDecomposition& d, const MagicTarget& t);

struct LayerRow {
  unsigned k = 0;
  mpz_class size;
  mpz_class errors;
  mpq_class fraction;
  bool eps_wrong = false;
  bool in_window = false;
};

struct LayerReport {
  std::vector<LayerRow> rows;  // k = 0..n
  std::size_t k_star = 0;
  std::size_t window_halfwidth = 0;
  long window_lo = 0, window_hi = 0;
  mpq_class eps, gamma;
  std::size_t window_layers = 0;
  std::size_t wrong_in_window = 0;
  mpq_class wrong_layer_fraction;
  bool passes = false;
};

LayerReport layer_error_report(const BooleanFunction& f, const ThresholdContext& ctx,
                               const mpq_class& eps = mpq_class(1, 100),
                               const mpq_class& gamma = mpq_class(1, 100));

// Assemble a LayerReport from precomputed per-layer error counts.
LayerReport layer_report_from_counts(std::size_t n,
                                     const std::vector<mpz_class>& errors,
                                     const ThresholdContext& ctx,
                                     const mpq_class& eps, const mpq_class& gamma);

BooleanFunction restrict_fn(const BooleanFunction& f, const std::vector<std::size_t>& d);

struct RestrictionSearchResult {
  std::vector<std::size_t> d0;
  std::uint64_t agree_count = 0;
  mpq_class agreement;
  bool achieved = false;  // agreement >= 3/4
  std::size_t trials = 0;
};

// Samples `trials` uniform size-m subsets and keeps the best exact agreement
// of the restriction with Maj_m. `make_g` produces the restriction for a
// sorted index set; the dense overload restricts f directly.
RestrictionSearchResult restriction_search(
    std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed,
    const std::function<BooleanFunction(const std::vector<std::size_t>&)>& make_g);

RestrictionSearchResult find_good_restriction(const BooleanFunction& f, std::size_t m,
                                              std::size_t trials, std::uint64_t seed);

struct RsApproxResult {
  F2Polynomial poly;
  std::uint64_t error_count = 0;  // exact disagreements with 1_A
  std::size_t retries_used = 0;
  bool achieved = false;  // error_count <= 2^{m-t}
  bool one_sided = false; // P == 1 everywhere on A (structural, rechecked)
};

// Razborov-Smolensky: product of t randomized parity-sums of the constraints
// of A, retried until the exact error is at most 2^{-t}.
RsApproxResult rs_subspace_approx(const AffineSubspace& a, std::size_t t,
                                  std::uint64_t seed, int retries = kRsDefaultRetries);

F2Polynomial truth_table_to_polynomial(const BooleanFunction& f);

struct ProjectedTerm {
  AffineForm ell;                // over |D| variables
  f2::QuadraticForm q;           // over |D| variables
  AffineSubspace support;        // over |D| variables; may be empty
};

// Substitutes zero for every coordinate outside the sorted index set D.
std::vector<ProjectedTerm> project_decomposition(const StabilizerDecomposition& d,
                                                 const std::vector<std::size_t>& dset);

struct GTildeResult {
  F2Polynomial g_tilde;
  BooleanFunction g;        // comparator of the projected decomposition
  std::uint64_t disagreements = 0;
  mpq_class agreement;
  std::size_t degree = 0;
  std::size_t degree_bound = 0;  // 3r max(2, ceil(log2 20r))
  std::vector<std::size_t> rs_t;
  std::vector<std::uint64_t> rs_errors;
  std::uint64_t rs_error_total = 0;
  std::size_t h_arity = 0;
};

// The low-degree approximation of the restricted comparator: the exact ANF of
// the 3r-variable comparator h with l'_j, q'_j substituted exactly and each
// indicator replaced by an RS polynomial with error at most 1/(20r).
GTildeResult build_g_tilde(const StabilizerDecomposition& d,
                           const std::vector<std::size_t>& dset,
                           const MagicTarget& t, std::uint64_t seed,
                           int retries = kRsDefaultRetries,
                           std::optional<std::size_t> t_override = std::nullopt);

struct WrongMassReport {
  std::uint64_t wrong_points = 0;
  bool inequality_holds = true;  // |psi(x) - F(x)|^2 >= w_k ((1-eta)/2)^2 at all wrong x
  Cyclo wrong_mass;              // exact sum of |psi - F|^2 over wrong points
};

WrongMassReport wrong_point_mass_bound_check(const StabilizerDecomposition& d,
                                             const MagicTarget& t);

// Exact W_k = C(n,k) p^k (1-p)^{n-k}.
mpq_class binomial_layer_mass(unsigned long n, const mpq_class& p, unsigned long k);

struct BinomialRatioReport {
  long c = 0;
  unsigned long k_center = 0, k_shifted = 0;
  mpq_class w_center, w_shifted;
  mpq_class ratio;
  mpf_class bound{0, kFloatBits};  // e^{C^2/p + C^2/(1-p)} * 1.1
  bool within_bound = false;
};

// Appendix-B style ratio check: W_{ceil(pn)} / W_{ceil(pn + C sqrt n)} against
// the limit bound, all with exact rational layer masses.
BinomialRatioReport binomial_ratio_check(unsigned long n, const mpq_class& p, long c);

// ceil(p*n + c*sqrt(n)) computed exactly (integer square-root enclosures).
unsigned long shifted_layer_index(unsigned long n, const mpq_class& p, long c);

// Exact expected number of surviving incorrect window inputs over a uniform
// size-m subset: sum over window layers of errors_k * C(m,k)/C(n,k).
mpq_class expected_incorrect_survivors(std::size_t n, std::size_t m,
                                       const LayerReport& report);

// Rational approximation of the target's p accurate to 10^{-digits}.
mpq_class rational_p(const MagicTarget& t, unsigned digits = 30);

}  // namespace stabrank::approx
