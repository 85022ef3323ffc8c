#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "stabrank/config.hpp"

namespace stabrank::stab {

// Arbitrary-precision complex scalar (used for the R target and float-mode
// decompositions). Precision is fixed per value at construction.
struct ComplexMP {
  mpf_class re{0, kFloatBits};
  mpf_class im{0, kFloatBits};

  ComplexMP() = default;
  ComplexMP(mpf_class r, mpf_class i) : re(std::move(r)), im(std::move(i)) {}
  static ComplexMP from_double(double r, double i);

  ComplexMP& operator+=(const ComplexMP& o);
  ComplexMP& operator-=(const ComplexMP& o);
  ComplexMP& operator*=(const ComplexMP& o);
  friend ComplexMP operator+(ComplexMP a, const ComplexMP& b) { return a += b; }
  friend ComplexMP operator-(ComplexMP a, const ComplexMP& b) { return a -= b; }
  friend ComplexMP operator*(ComplexMP a, const ComplexMP& b) { return a *= b; }

  mpf_class norm_sq() const { return re * re + im * im; }
  mpf_class abs() const;
  std::complex<double> to_double() const { return {re.get_d(), im.get_d()}; }
};

// An element of the 16th cyclotomic field Q(zeta), zeta = e^{i pi/8}, written
// as sum_{j=0}^{7} a_j zeta^j with exact rational a_j (zeta^8 = -1). This
// basis is a Q-basis, so representations are unique and the zero test is
// coefficient-wise. The field houses i = zeta^4, e^{i pi/4} = zeta^2,
// sqrt(2) = zeta^2 - zeta^6, cos(pi/8) and sin(pi/8).
class Cyclo {
 public:
  Cyclo() = default;

  static Cyclo zero() { return Cyclo(); }
  static Cyclo one() { return from_rational(1); }
  static Cyclo from_rational(const mpq_class& q);
  // zeta^k for any integer k (reduced mod 16 with sign).
  static Cyclo zeta_pow(long k);
  static Cyclo i() { return zeta_pow(4); }
  static Cyclo sqrt2();
  static Cyclo cos_pi8();   // (zeta - zeta^7)/2
  static Cyclo sin_pi8();   // (zeta^3 - zeta^5)/2

  const mpq_class& coeff(std::size_t j) const { return c_[j]; }
  mpq_class& coeff(std::size_t j) { return c_[j]; }

  bool is_zero() const;
  bool is_rational() const;
  bool is_real() const { return *this == conj(); }

  Cyclo operator-() const;
  Cyclo& operator+=(const Cyclo& o);
  Cyclo& operator-=(const Cyclo& o);
  Cyclo& operator*=(const Cyclo& o);
  friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
  friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }
  friend Cyclo operator*(Cyclo a, const Cyclo& b) { return a *= b; }
  Cyclo& operator*=(const mpq_class& q);
  friend Cyclo operator*(Cyclo a, const mpq_class& q) { return a *= q; }
  bool operator==(const Cyclo& o) const { return c_ == o.c_; }
  bool operator!=(const Cyclo& o) const { return !(*this == o); }

  Cyclo conj() const;
  // |z|^2 = z * conj(z); always real.
  Cyclo norm_sq() const { return *this * conj(); }
  // Galois conjugate sigma_t for odd t (sigma_t(zeta) = zeta^t).
  Cyclo galois(unsigned t) const;
  // Multiplicative inverse via the product of Galois conjugates over the
  // rational field norm. Throws on zero.
  Cyclo inverse() const;
  Cyclo pow(unsigned long e) const;

  // Exact sign of a real element: -1, 0, +1. Evaluates at escalating
  // precision until the enclosure excludes zero; termination is backed by a
  // field-norm lower bound on nonzero elements.
  int sign_real() const;

  ComplexMP to_complex(unsigned prec = kFloatBits) const;
  std::complex<double> to_double() const;

  std::string to_string() const;

 private:
  std::array<mpq_class, 8> c_{};
};

// sign_real(a - b) for real elements.
int cmp_real(const Cyclo& a, const Cyclo& b);

}  // namespace stabrank::stab
