#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabrank/affine.hpp"
#include "stabrank/cyclo.hpp"

namespace stabrank::stab {

using f2::AffineForm;
using f2::AffineSubspace;
using f2::BitMatrix;
using f2::BitVector;
using f2::QuadraticForm;

// phi(x) = i^{l(x)} (-1)^{q(x)} 1_A(x) with linear l (no constant term),
// quadratic q and a nonempty affine support A.
class StabilizerFunction {
 public:
  StabilizerFunction(AffineForm ell, QuadraticForm q, AffineSubspace support);

  std::size_t arity() const { return n_; }
  const AffineForm& ell() const { return ell_; }
  const QuadraticForm& quad_form() const { return q_; }
  const AffineSubspace& support() const { return support_; }

  // i-exponent t in {0,1,2,3} with value i^t, or nullopt outside the support.
  std::optional<unsigned> phase_exponent(const BitVector& x) const;
  Cyclo eval(const BitVector& x) const;

 private:
  std::size_t n_;
  AffineForm ell_;
  QuadraticForm q_;
  AffineSubspace support_;
};

enum class TargetKind { H, T, R };

const char* target_kind_name(TargetKind k);
TargetKind target_kind_from_name(const std::string& name);

// A tensor-power magic state viewed as the function F_B(x) = alpha^{n-|x|} beta^{|x|}.
// Amplitudes are stored unnormalized: F_T(x) = e^{i pi |x|/4} and
// F_H(x) = cos^{n-|x|} sin^{|x|}; normalization does not affect stabilizer
// rank and these conventions keep H and T inside the cyclotomic field.
// H and T are exact; R falls back to arbitrary-precision floats.
class MagicTarget {
 public:
  // Default state is an unusable placeholder; build real targets with make().
  MagicTarget() = default;

  static MagicTarget make(TargetKind kind, std::size_t n);

  TargetKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  bool exact() const { return exact_; }

  const Cyclo& alpha() const { return alpha_; }
  const Cyclo& beta() const { return beta_; }

  // F_B on the k-th layer. With `normalized`, divides by (|a|^2+|b|^2)^{n/2}
  // (exact for T since 1/sqrt2 lies in the field; identity for H).
  Cyclo amplitude_exact(std::size_t k, bool normalized = false) const;
  ComplexMP amplitude_float(std::size_t k, unsigned prec = kFloatBits) const;
  Cyclo eval_exact(const BitVector& x) const { return amplitude_exact(x.weight()); }
  ComplexMP eval_float(const BitVector& x) const { return amplitude_float(x.weight()); }

  // Normalized p = |beta|^2 / (|alpha|^2 + |beta|^2); real, exact for H/T.
  Cyclo p_exact() const;
  mpf_class p_float(unsigned prec = kFloatBits) const;
  // eta = |beta| / |alpha|; exact for H (= sqrt2 - 1) and T (= 1).
  Cyclo eta_exact() const;
  mpf_class eta_float(unsigned prec = kFloatBits) const;
  // w_k = |alpha|^{2(n-k)} |beta|^{2k} (unnormalized layer weight).
  Cyclo layer_weight_exact(std::size_t k) const;
  mpf_class layer_magnitude_float(std::size_t k, unsigned prec = kFloatBits) const;
  // ||F_B||^2 = (|alpha|^2 + |beta|^2)^n.
  Cyclo vector_norm_sq_exact() const;

 private:
  TargetKind kind_ = TargetKind::H;
  std::size_t n_ = 0;
  bool exact_ = true;
  Cyclo alpha_, beta_;
  mpf_class cos_b_{0, kFloatBits}, sin_b_{0, kFloatBits};  // R only
};

struct DecompTerm {
  Cyclo c;
  ComplexMP c_float;
  StabilizerFunction phi;
};

// F(x) = sum_j c_j phi_j(x). Exact mode keeps cyclotomic coefficients; float
// mode uses arbitrary-precision complex numbers.
class StabilizerDecomposition {
 public:
  explicit StabilizerDecomposition(std::size_t n, bool exact_mode = true)
      : n_(n), exact_(exact_mode) {}

  std::size_t n() const { return n_; }
  bool exact_mode() const { return exact_; }
  std::size_t rank() const { return terms_.size(); }
  const std::vector<DecompTerm>& terms() const { return terms_; }

  void add_term(const Cyclo& c, StabilizerFunction phi);
  void add_term(const ComplexMP& c, StabilizerFunction phi);

  Cyclo eval_exact(const BitVector& x) const;
  ComplexMP eval_float(const BitVector& x, unsigned prec = kFloatBits) const;

  // Dense amplitude vector indexed by the integer value of x; walks each
  // term's support, so the cost is sum_j 2^{dim A_j}. Guarded by kDenseMaxN.
  std::vector<Cyclo> eval_full_exact() const;

 private:
  std::size_t n_;
  bool exact_;
  std::vector<DecompTerm> terms_;
};

Cyclo eval_stabilizer(const StabilizerFunction& phi, const BitVector& x);

struct L2Result {
  bool exact_radicand = false;
  Cyclo radicand;      // sum |d(x) - F(x)|^2 when exact
  mpf_class value{0, kFloatBits};
};

// Euclidean distance between the decomposition and the target over all 2^n
// points. With `normalized`, both sides are first scaled to unit L2 norm
// (computed in floats: the norms are square roots).
L2Result l2_distance(const StabilizerDecomposition& d, const MagicTarget& t,
                     bool normalized = false);

// --- enumeration ---

struct EnumeratedState {
  // Per point (indexed by the integer value of x): 0 for zero amplitude,
  // 1 + t for amplitude i^t. First nonzero entry is always 1.
  std::vector<std::uint8_t> canonical;
  StabilizerFunction representative;
  unsigned lead_phase;  // representative's first nonzero amplitude is i^{lead_phase}
};

// All stabilizer functions on n qubits up to global scalar, sorted by
// canonical amplitude key. n <= 3 (n = 4 behind the flag).
std::vector<EnumeratedState> enumerate_stabilizer_states(std::size_t n,
                                                         bool allow_n4 = false);
// 2^n prod_{k=1..n} (2^k + 1)
mpz_class stabilizer_state_count(unsigned n);

// --- the mod-8 identity for the T target ---

struct Mod8Decomposition {
  std::size_t n;
  std::array<Cyclo, 8> b;  // b_j = e^{i pi j / 4}
  static bool indicator(unsigned j, const BitVector& x) {
    return x.weight() % 8 == j;
  }
  Cyclo eval(const BitVector& x) const;
};

Mod8Decomposition mod8_decomposition(std::size_t n);

// --- decomposition file format ---

std::string decomposition_to_json_string(const StabilizerDecomposition& d,
                                         int indent = -1);
StabilizerDecomposition decomposition_from_json_string(const std::string& text);

}  // namespace stabrank::stab
