#include "stabrank/stabilizer.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace stabrank::stab {

StabilizerFunction::StabilizerFunction(AffineForm ell, QuadraticForm q,
                                       AffineSubspace support)
    : n_(support.ambient()), ell_(std::move(ell)), q_(std::move(q)),
      support_(std::move(support)) {
  if (ell_.arity() != n_ || q_.arity() != n_) {
    throw std::invalid_argument("StabilizerFunction: arity mismatch");
  }
  if (ell_.constant()) {
    throw std::invalid_argument("StabilizerFunction: l must be linear (no constant)");
  }
  if (support_.is_empty()) {
    throw std::invalid_argument("StabilizerFunction: support must be nonempty");
  }
}

std::optional<unsigned> StabilizerFunction::phase_exponent(const BitVector& x) const {
  if (x.size() != n_) {
    throw std::invalid_argument("StabilizerFunction::eval dimension mismatch");
  }
  if (!support_.contains(x)) return std::nullopt;
  unsigned t = (ell_.eval(x) ? 1u : 0u) + (q_.eval(x) ? 2u : 0u);
  return t;
}

Cyclo StabilizerFunction::eval(const BitVector& x) const {
  auto t = phase_exponent(x);
  if (!t) return Cyclo::zero();
  return Cyclo::zeta_pow(4 * static_cast<long>(*t));
}

Cyclo eval_stabilizer(const StabilizerFunction& phi, const BitVector& x) {
  return phi.eval(x);
}

const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::H: return "H";
    case TargetKind::T: return "T";
    case TargetKind::R: return "R";
  }
  return "?";
}

TargetKind target_kind_from_name(const std::string& name) {
  if (name == "H") return TargetKind::H;
  if (name == "T") return TargetKind::T;
  if (name == "R") return TargetKind::R;
  throw std::invalid_argument("unknown target kind: " + name);
}

MagicTarget MagicTarget::make(TargetKind kind, std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("MagicTarget: n must be positive");
  }
  MagicTarget t;
  t.kind_ = kind;
  t.n_ = n;
  switch (kind) {
    case TargetKind::H:
      t.exact_ = true;
      t.alpha_ = Cyclo::cos_pi8();
      t.beta_ = Cyclo::sin_pi8();
      break;
    case TargetKind::T:
      t.exact_ = true;
      t.alpha_ = Cyclo::one();
      t.beta_ = Cyclo::zeta_pow(2);
      break;
    case TargetKind::R: {
      t.exact_ = false;
      // beta_hat = arccos(1/sqrt3)/2; cos^2 = (1 + 1/sqrt3)/2.
      mpf_class three(3, kFloatBits), r3(0, kFloatBits);
      mpf_sqrt(r3.get_mpf_t(), three.get_mpf_t());
      mpf_class inv = 1 / r3;
      mpf_class cb2 = (1 + inv) / 2, sb2 = (1 - inv) / 2;
      mpf_sqrt(t.cos_b_.get_mpf_t(), cb2.get_mpf_t());
      mpf_sqrt(t.sin_b_.get_mpf_t(), sb2.get_mpf_t());
      break;
    }
  }
  return t;
}

Cyclo MagicTarget::amplitude_exact(std::size_t k, bool normalized) const {
  if (!exact_) {
    throw std::domain_error("amplitude_exact: R target is float-mode only");
  }
  if (k > n_) {
    throw std::invalid_argument("amplitude_exact: layer out of range");
  }
  Cyclo a = alpha_.pow(n_ - k) * beta_.pow(k);
  if (normalized && kind_ == TargetKind::T) {
    // (1/sqrt2)^n = (sqrt2/2)^n
    a *= (Cyclo::sqrt2() * mpq_class(1, 2)).pow(n_);
  }
  return a;
}

ComplexMP MagicTarget::amplitude_float(std::size_t k, unsigned prec) const {
  if (k > n_) {
    throw std::invalid_argument("amplitude_float: layer out of range");
  }
  if (exact_) return amplitude_exact(k).to_complex(prec);
  // cos(b)^{n-k} (e^{i pi/4} sin(b))^k
  mpf_class mag(0, prec);
  mpf_pow_ui(mag.get_mpf_t(), cos_b_.get_mpf_t(), static_cast<unsigned long>(n_ - k));
  mpf_class sk(0, prec);
  mpf_pow_ui(sk.get_mpf_t(), sin_b_.get_mpf_t(), static_cast<unsigned long>(k));
  mag *= sk;
  ComplexMP phase = Cyclo::zeta_pow(2 * static_cast<long>(k % 16)).to_complex(prec);
  phase.re *= mag;
  phase.im *= mag;
  return phase;
}

Cyclo MagicTarget::p_exact() const {
  if (!exact_) {
    throw std::domain_error("p_exact: R target is float-mode only");
  }
  Cyclo a2 = alpha_.norm_sq(), b2 = beta_.norm_sq();
  return b2 * (a2 + b2).inverse();
}

mpf_class MagicTarget::p_float(unsigned prec) const {
  if (exact_) {
    ComplexMP z = p_exact().to_complex(prec);
    return z.re;
  }
  return mpf_class(sin_b_ * sin_b_, prec);
}

Cyclo MagicTarget::eta_exact() const {
  switch (kind_) {
    case TargetKind::H:
      return Cyclo::sqrt2() - Cyclo::one();  // tan(pi/8)
    case TargetKind::T:
      return Cyclo::one();
    case TargetKind::R:
      throw std::domain_error("eta_exact: R target is float-mode only");
  }
  throw std::logic_error("unreachable");
}

mpf_class MagicTarget::eta_float(unsigned prec) const {
  if (exact_) return eta_exact().to_complex(prec).re;
  return mpf_class(sin_b_ / cos_b_, prec);
}

Cyclo MagicTarget::layer_weight_exact(std::size_t k) const {
  if (!exact_) {
    throw std::domain_error("layer_weight_exact: R target is float-mode only");
  }
  return alpha_.norm_sq().pow(n_ - k) * beta_.norm_sq().pow(k);
}

mpf_class MagicTarget::layer_magnitude_float(std::size_t k, unsigned prec) const {
  ComplexMP a = amplitude_float(k, prec);
  return a.abs();
}

Cyclo MagicTarget::vector_norm_sq_exact() const {
  if (!exact_) {
    throw std::domain_error("vector_norm_sq_exact: R target is float-mode only");
  }
  return (alpha_.norm_sq() + beta_.norm_sq()).pow(n_);
}

void StabilizerDecomposition::add_term(const Cyclo& c, StabilizerFunction phi) {
  if (!exact_) {
    throw std::invalid_argument("add_term: decomposition is in float mode");
  }
  if (phi.arity() != n_) {
    throw std::invalid_argument("add_term: arity mismatch");
  }
  terms_.push_back(DecompTerm{c, c.to_complex(), std::move(phi)});
}

void StabilizerDecomposition::add_term(const ComplexMP& c, StabilizerFunction phi) {
  if (exact_) {
    throw std::invalid_argument("add_term: decomposition is in exact mode");
  }
  if (phi.arity() != n_) {
    throw std::invalid_argument("add_term: arity mismatch");
  }
  terms_.push_back(DecompTerm{Cyclo::zero(), c, std::move(phi)});
}

Cyclo StabilizerDecomposition::eval_exact(const BitVector& x) const {
  if (!exact_) {
    throw std::domain_error("eval_exact on a float-mode decomposition");
  }
  Cyclo acc;
  for (const auto& term : terms_) {
    auto t = term.phi.phase_exponent(x);
    if (t) acc += term.c * Cyclo::zeta_pow(4 * static_cast<long>(*t));
  }
  return acc;
}

ComplexMP StabilizerDecomposition::eval_float(const BitVector& x, unsigned prec) const {
  ComplexMP acc(mpf_class(0, prec), mpf_class(0, prec));
  for (const auto& term : terms_) {
    auto t = term.phi.phase_exponent(x);
    if (!t) continue;
    ComplexMP v = term.c_float;
    for (unsigned rot = 0; rot < *t; ++rot) {
      mpf_class re = -v.im;
      v.im = v.re;
      v.re = std::move(re);
    }
    acc += v;
  }
  return acc;
}

std::vector<Cyclo> StabilizerDecomposition::eval_full_exact() const {
  if (!exact_) {
    throw std::domain_error("eval_full_exact on a float-mode decomposition");
  }
  if (n_ > kDenseMaxN) {
    throw guard_error("eval_full_exact: n exceeds the dense-evaluation guard");
  }
  std::vector<Cyclo> table(std::size_t{1} << n_);
  for (const auto& term : terms_) {
    term.phi.support().for_each_element([&](const BitVector& x) {
      unsigned t = (term.phi.ell().eval(x) ? 1u : 0u) +
                   (term.phi.quad_form().eval(x) ? 2u : 0u);
      table[x.word(0)] += term.c * Cyclo::zeta_pow(4 * static_cast<long>(t));
    });
  }
  return table;
}

L2Result l2_distance(const StabilizerDecomposition& d, const MagicTarget& t,
                     bool normalized) {
  if (d.n() != t.n()) {
    throw std::invalid_argument("l2_distance: dimension mismatch");
  }
  std::size_t n = d.n();
  if (n > kDenseMaxN) {
    throw guard_error("l2_distance: n exceeds the dense-evaluation guard");
  }
  const std::size_t points = std::size_t{1} << n;
  L2Result out;

  if (d.exact_mode() && t.exact()) {
    std::vector<Cyclo> dv = d.eval_full_exact();
    if (!normalized) {
      Cyclo acc;
      for (std::size_t idx = 0; idx < points; ++idx) {
        std::size_t w = std::popcount(static_cast<std::uint64_t>(idx));
        Cyclo diff = dv[idx] - t.amplitude_exact(w);
        acc += diff.norm_sq();
      }
      out.exact_radicand = true;
      out.radicand = acc;
      ComplexMP r = acc.to_complex();
      mpf_sqrt(out.value.get_mpf_t(), r.re.get_mpf_t());
      return out;
    }
    // Normalized: 2 - 2 Re<d,F> / (||d|| ||F||), with exact inner products.
    Cyclo dd, cross;
    for (std::size_t idx = 0; idx < points; ++idx) {
      std::size_t w = std::popcount(static_cast<std::uint64_t>(idx));
      dd += dv[idx].norm_sq();
      cross += dv[idx].conj() * t.amplitude_exact(w);
    }
    Cyclo ff = t.vector_norm_sq_exact();
    if (dd.is_zero()) {
      out.value = 1;
      return out;
    }
    mpf_class ddf = dd.to_complex().re, fff = ff.to_complex().re;
    mpf_class crossf = cross.to_complex().re;
    mpf_class nd(0, kFloatBits), nf(0, kFloatBits);
    mpf_sqrt(nd.get_mpf_t(), ddf.get_mpf_t());
    mpf_sqrt(nf.get_mpf_t(), fff.get_mpf_t());
    mpf_class dist2 = 2 - 2 * crossf / (nd * nf);
    if (dist2 < 0) dist2 = 0;
    mpf_sqrt(out.value.get_mpf_t(), dist2.get_mpf_t());
    return out;
  }

  // Float path (R target or float-mode decomposition).
  mpf_class acc(0, kFloatBits), dd(0, kFloatBits), ff(0, kFloatBits);
  mpf_class cross_re(0, kFloatBits);
  for (std::size_t idx = 0; idx < points; ++idx) {
    BitVector x = BitVector::from_bits(n, idx);
    ComplexMP dvx = d.exact_mode() ? d.eval_exact(x).to_complex() : d.eval_float(x);
    ComplexMP fx = t.amplitude_float(x.weight());
    ComplexMP diff = dvx - fx;
    acc += diff.norm_sq();
    dd += dvx.norm_sq();
    ff += fx.norm_sq();
    cross_re += dvx.re * fx.re + dvx.im * fx.im;
  }
  if (!normalized) {
    mpf_sqrt(out.value.get_mpf_t(), acc.get_mpf_t());
    return out;
  }
  if (dd == 0) {
    out.value = 1;
    return out;
  }
  mpf_class nd(0, kFloatBits), nf(0, kFloatBits);
  mpf_sqrt(nd.get_mpf_t(), dd.get_mpf_t());
  mpf_sqrt(nf.get_mpf_t(), ff.get_mpf_t());
  mpf_class dist2 = 2 - 2 * cross_re / (nd * nf);
  if (dist2 < 0) dist2 = 0;
  mpf_sqrt(out.value.get_mpf_t(), dist2.get_mpf_t());
  return out;
}

// --- enumeration ---

mpz_class stabilizer_state_count(unsigned n) {
  mpz_class count = 1;
  count <<= n;
  for (unsigned k = 1; k <= n; ++k) {
    count *= (mpz_class(1) << k) + 1;
  }
  return count;
}

namespace {

struct SubspaceEntry {
  std::uint32_t mask;  // characteristic vector over the 2^n points
  AffineSubspace space;
};

std::vector<SubspaceEntry> all_affine_subspaces(std::size_t n) {
  const std::size_t points = std::size_t{1} << n;
  std::map<std::uint32_t, AffineSubspace> seen;
  for (std::size_t k = 0; k <= n; ++k) {
    const std::uint64_t mats = std::uint64_t{1} << (k * n);
    for (std::uint64_t mbits = 0; mbits < mats; ++mbits) {
      BitMatrix m(k, n);
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          if ((mbits >> (r * n + c)) & 1) m.set(r, c, true);
        }
      }
      for (std::uint64_t bbits = 0; bbits < (std::uint64_t{1} << k); ++bbits) {
        BitVector b = BitVector::from_bits(k, bbits);
        std::uint32_t mask = 0;
        for (std::size_t idx = 0; idx < points; ++idx) {
          if (m.multiply(BitVector::from_bits(n, idx)) == b) {
            mask |= std::uint32_t{1} << idx;
          }
        }
        if (mask && !seen.count(mask)) {
          seen.emplace(mask, AffineSubspace::from_constraints(m, b));
        }
      }
    }
  }
  std::vector<SubspaceEntry> out;
  out.reserve(seen.size());
  for (auto& [mask, space] : seen) out.push_back({mask, std::move(space)});
  return out;
}

}  // namespace

std::vector<EnumeratedState> enumerate_stabilizer_states(std::size_t n, bool allow_n4) {
  if (n < 1 || n > (allow_n4 ? kEnumerateMaxNUnlocked : kEnumerateMaxN)) {
    throw guard_error("enumerate_stabilizer_states: n out of range");
  }
  const std::size_t points = std::size_t{1} << n;
  std::vector<SubspaceEntry> spaces = all_affine_subspaces(n);

  const std::size_t pair_count = n * (n - 1) / 2;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }

  std::map<std::vector<std::uint8_t>, std::pair<std::size_t, unsigned>> canon;
  // canonical key -> (index into reps, lead phase)
  std::vector<StabilizerFunction> reps;

  std::vector<std::uint8_t> key(points);
  for (const auto& entry : spaces) {
    for (std::uint32_t lmask = 0; lmask < points; ++lmask) {
      for (std::uint64_t qbits = 0; qbits < (std::uint64_t{1} << pair_count); ++qbits) {
        for (std::uint32_t linmask = 0; linmask < points; ++linmask) {
          unsigned lead = 5;  // sentinel
          for (std::size_t idx = 0; idx < points; ++idx) {
            if (!((entry.mask >> idx) & 1)) {
              key[idx] = 0;
              continue;
            }
            unsigned l = std::popcount(lmask & static_cast<std::uint32_t>(idx)) & 1;
            unsigned q = std::popcount(linmask & static_cast<std::uint32_t>(idx)) & 1;
            for (std::size_t pi = 0; pi < pair_count; ++pi) {
              if ((qbits >> pi) & 1) {
                q ^= ((idx >> pairs[pi].first) & 1) & ((idx >> pairs[pi].second) & 1);
              }
            }
            unsigned t = (l + 2 * q) & 3;
            if (lead == 5) lead = t;
            key[idx] = static_cast<std::uint8_t>(1 + ((t + 4 - lead) & 3));
          }
          if (!canon.count(key)) {
            AffineForm ell(BitVector::from_bits(n, lmask), false);
            QuadraticForm qf(n);
            for (std::size_t pi = 0; pi < pair_count; ++pi) {
              if ((qbits >> pi) & 1) qf.set_quad(pairs[pi].first, pairs[pi].second);
            }
            for (std::size_t i = 0; i < n; ++i) {
              if ((linmask >> i) & 1) qf.set_linear(i);
            }
            canon.emplace(key, std::make_pair(reps.size(), lead));
            reps.emplace_back(ell, qf, entry.space);
          }
        }
      }
    }
  }

  std::vector<EnumeratedState> out;
  out.reserve(canon.size());
  for (const auto& [k, idx_lead] : canon) {
    out.push_back(EnumeratedState{k, reps[idx_lead.first], idx_lead.second});
  }
  return out;  // std::map iteration is already sorted by canonical key
}

Cyclo Mod8Decomposition::eval(const BitVector& x) const {
  return b[x.weight() % 8];
}

Mod8Decomposition mod8_decomposition(std::size_t n) {
  if (n < 1) {
    throw std::invalid_argument("mod8_decomposition: n must be positive");
  }
  Mod8Decomposition m;
  m.n = n;
  for (unsigned j = 0; j < 8; ++j) {
    m.b[j] = Cyclo::zeta_pow(2 * j);
  }
  return m;
}

}  // namespace stabrank::stab
