#include "stabrank/cyclo.hpp"

#include <sstream>
#include <stdexcept>

namespace stabrank::stab {

ComplexMP ComplexMP::from_double(double r, double i) {
  ComplexMP z;
  z.re = r;
  z.im = i;
  return z;
}

ComplexMP& ComplexMP::operator+=(const ComplexMP& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ComplexMP& ComplexMP::operator-=(const ComplexMP& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ComplexMP& ComplexMP::operator*=(const ComplexMP& o) {
  mpf_class r = re * o.re - im * o.im;
  mpf_class i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

mpf_class ComplexMP::abs() const {
  mpf_class s = norm_sq();
  mpf_class out(0, s.get_prec());
  mpf_sqrt(out.get_mpf_t(), s.get_mpf_t());
  return out;
}

Cyclo Cyclo::from_rational(const mpq_class& q) {
  Cyclo z;
  z.c_[0] = q;
  return z;
}

Cyclo Cyclo::zeta_pow(long k) {
  Cyclo z;
  long r = k % 16;
  if (r < 0) r += 16;
  if (r < 8) {
    z.c_[r] = 1;
  } else {
    z.c_[r - 8] = -1;
  }
  return z;
}

Cyclo Cyclo::sqrt2() { return zeta_pow(2) - zeta_pow(6); }

Cyclo Cyclo::cos_pi8() {
  Cyclo z = zeta_pow(1) - zeta_pow(7);
  z *= mpq_class(1, 2);
  return z;
}

Cyclo Cyclo::sin_pi8() {
  Cyclo z = zeta_pow(3) - zeta_pow(5);
  z *= mpq_class(1, 2);
  return z;
}

bool Cyclo::is_zero() const {
  for (const auto& q : c_) {
    if (q != 0) return false;
  }
  return true;
}

bool Cyclo::is_rational() const {
  for (std::size_t j = 1; j < 8; ++j) {
    if (c_[j] != 0) return false;
  }
  return true;
}

Cyclo Cyclo::operator-() const {
  Cyclo z;
  for (std::size_t j = 0; j < 8; ++j) z.c_[j] = -c_[j];
  return z;
}

Cyclo& Cyclo::operator+=(const Cyclo& o) {
  for (std::size_t j = 0; j < 8; ++j) c_[j] += o.c_[j];
  return *this;
}

Cyclo& Cyclo::operator-=(const Cyclo& o) {
  for (std::size_t j = 0; j < 8; ++j) c_[j] -= o.c_[j];
  return *this;
}

Cyclo& Cyclo::operator*=(const Cyclo& o) {
  std::array<mpq_class, 8> out{};
  for (std::size_t a = 0; a < 8; ++a) {
    if (c_[a] == 0) continue;
    for (std::size_t b = 0; b < 8; ++b) {
      if (o.c_[b] == 0) continue;
      std::size_t k = a + b;
      mpq_class prod = c_[a] * o.c_[b];
      if (k < 8) {
        out[k] += prod;
      } else {
        out[k - 8] -= prod;  // zeta^8 = -1
      }
    }
  }
  c_ = std::move(out);
  return *this;
}

Cyclo& Cyclo::operator*=(const mpq_class& q) {
  for (auto& a : c_) a *= q;
  return *this;
}

Cyclo Cyclo::conj() const {
  // conj(zeta^j) = zeta^{16-j} = -zeta^{8-j} for 1 <= j <= 7.
  Cyclo z;
  z.c_[0] = c_[0];
  for (std::size_t j = 1; j < 8; ++j) {
    z.c_[8 - j] = -c_[j];
  }
  return z;
}

Cyclo Cyclo::galois(unsigned t) const {
  if (t % 2 == 0) {
    throw std::invalid_argument("galois: t must be odd (a unit mod 16)");
  }
  Cyclo z;
  for (std::size_t j = 0; j < 8; ++j) {
    if (c_[j] == 0) continue;
    unsigned k = (static_cast<unsigned>(j) * t) % 16;
    if (k < 8) {
      z.c_[k] += c_[j];
    } else {
      z.c_[k - 8] -= c_[j];
    }
  }
  return z;
}

Cyclo Cyclo::inverse() const {
  if (is_zero()) {
    throw std::domain_error("Cyclo::inverse of zero");
  }
  // N(z) = prod_t sigma_t(z) over t in (Z/16)^*; z^{-1} = (prod_{t != 1}) / N.
  Cyclo cof = one();
  for (unsigned t : {3u, 5u, 7u, 9u, 11u, 13u, 15u}) {
    cof *= galois(t);
  }
  Cyclo norm = cof * (*this);
  if (!norm.is_rational() || norm.coeff(0) == 0) {
    throw std::logic_error("Cyclo::inverse: field norm must be a nonzero rational");
  }
  mpq_class inv = 1 / norm.coeff(0);
  cof *= inv;
  return cof;
}

Cyclo Cyclo::pow(unsigned long e) const {
  Cyclo acc = one();
  Cyclo base = *this;
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

namespace {

// cos(j pi / 8) for j = 0..7 at the given precision.
std::array<mpf_class, 8> cos_table(unsigned prec) {
  mpf_class two(2, prec);
  mpf_class r2(0, prec);
  mpf_sqrt(r2.get_mpf_t(), two.get_mpf_t());
  mpf_class c1(0, prec), c3(0, prec);
  mpf_class tmp(2 + r2, prec);
  mpf_sqrt(c1.get_mpf_t(), tmp.get_mpf_t());
  c1 /= 2;
  tmp = 2 - r2;
  mpf_sqrt(c3.get_mpf_t(), tmp.get_mpf_t());
  c3 /= 2;
  mpf_class half_r2(r2 / 2, prec);
  return {mpf_class(1, prec), c1, half_r2, c3,
          mpf_class(0, prec), -c3, -half_r2, -c1};
}

mpf_class eval_real_part(const std::array<mpq_class, 8>& c, unsigned prec) {
  auto cs = cos_table(prec);
  mpf_class acc(0, prec);
  for (std::size_t j = 0; j < 8; ++j) {
    if (c[j] == 0) continue;
    mpf_class a(0, prec);
    a = c[j];
    acc += a * cs[j];
  }
  return acc;
}

}  // namespace

int Cyclo::sign_real() const {
  if (!is_real()) {
    throw std::invalid_argument("sign_real on a non-real element");
  }
  if (is_zero()) return 0;

  // Nonzero z obeys |z| >= 1/(d^8 S^7): d^8 N(z) is a nonzero integer and
  // every Galois conjugate is bounded by S = sum |a_j|.
  mpz_class d = 1;
  mpq_class s = 0;
  for (const auto& q : c_) {
    mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den().get_mpz_t());
    s += abs(q);
  }
  std::size_t bits_needed = 8 * mpz_sizeinbase(d.get_mpz_t(), 2) + 64;
  if (s > 1) {
    bits_needed += 7 * mpz_sizeinbase(mpz_class(s.get_num() / s.get_den() + 1).get_mpz_t(), 2);
  }

  for (unsigned prec = 192; ; prec *= 2) {
    mpf_class approx = eval_real_part(c_, prec);
    mpf_class err(0, prec);
    err = s;
    mpf_class scale(0, prec);
    mpf_set_ui(scale.get_mpf_t(), 1);
    mpf_div_2exp(scale.get_mpf_t(), scale.get_mpf_t(), prec - 8);
    err *= scale;
    if (approx > err) return 1;
    if (approx < -err) return -1;
    if (prec > bits_needed) {
      // The enclosure still straddles zero below the norm bound; only an
      // exact zero could do that, and that case was handled above.
      return 0;
    }
  }
}

int cmp_real(const Cyclo& a, const Cyclo& b) { return (a - b).sign_real(); }

ComplexMP Cyclo::to_complex(unsigned prec) const {
  auto cs = cos_table(prec);
  // sin(j pi/8) = cos((4-j) pi/8)
  ComplexMP z(mpf_class(0, prec), mpf_class(0, prec));
  for (std::size_t j = 0; j < 8; ++j) {
    if (c_[j] == 0) continue;
    mpf_class a(0, prec);
    a = c_[j];
    z.re += a * cs[j];
    z.im += a * cs[(4 + 8 - j) % 8] * ((j > 4) ? -1 : 1);
  }
  return z;
}

std::complex<double> Cyclo::to_double() const {
  ComplexMP z = to_complex(192);
  return z.to_double();
}

std::string Cyclo::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t j = 0; j < 8; ++j) {
    if (j) os << ", ";
    os << c_[j].get_str();
  }
  os << "]";
  return os.str();
}

}  // namespace stabrank::stab
