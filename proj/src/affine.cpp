#include "stabrank/affine.hpp"

#include <mpfr.h>

#include <bit>
#include <stdexcept>
#include <tuple>

namespace stabrank::f2 {

QuadraticForm::QuadraticForm(BitMatrix quad, BitVector linear, bool constant)
    : n_(linear.size()), quad_(std::move(quad)), linear_(std::move(linear)),
      constant_(constant) {
  if (quad_.rows() != n_ || quad_.cols() != n_) {
    throw std::invalid_argument("QuadraticForm: coefficient matrix must be n x n");
  }
  // Fold the lower triangle and the diagonal so the invariant holds for any input.
  for (std::size_t i = 0; i < n_; ++i) {
    if (quad_.get(i, i)) {
      quad_.set(i, i, false);
      linear_.flip(i);
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (quad_.get(i, j)) {
        quad_.set(i, j, false);
        if (quad_.get(j, i)) {
          quad_.set(j, i, false);  // x_i x_j + x_j x_i = 0
        } else {
          quad_.set(j, i, true);
        }
      }
    }
  }
}

void QuadraticForm::set_quad(std::size_t i, std::size_t j) {
  if (i == j) {
    linear_.flip(i);
    return;
  }
  if (i > j) std::swap(i, j);
  quad_.set(i, j, !quad_.get(i, j));
}

bool QuadraticForm::eval(const BitVector& x) const {
  if (x.size() != n_) {
    throw std::invalid_argument("QuadraticForm::eval dimension mismatch");
  }
  bool acc = linear_.dot(x) ^ constant_;
  for (std::size_t i : x.set_bits()) {
    acc ^= quad_.row(i).dot(x);
  }
  return acc;
}

AffineForm QuadraticForm::directional_derivative(const BitVector& y) const {
  if (y.size() != n_) {
    throw std::invalid_argument("directional_derivative dimension mismatch");
  }
  // q(x) + q(x+y) = <(Q + Q^T) y, x> + q(y) + q(0).
  BitVector coeffs(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    bool bit = quad_.row(i).dot(y);
    for (std::size_t j : y.set_bits()) {
      bit ^= quad_.get(j, i);
    }
    if (bit) coeffs.set(i, true);
  }
  bool constant = eval(y) ^ constant_;
  return AffineForm(std::move(coeffs), constant);
}

AffineForm directional_derivative(const QuadraticForm& q, const BitVector& y) {
  return q.directional_derivative(y);
}

// --- AffineSubspace ---

AffineSubspace AffineSubspace::whole(std::size_t n) {
  return from_constraints(BitMatrix(0, n), BitVector(0));
}

AffineSubspace AffineSubspace::empty(std::size_t n) {
  AffineSubspace s;
  s.n_ = n;
  s.empty_ = true;
  return s;
}

AffineSubspace AffineSubspace::point(const BitVector& v) {
  BitMatrix m(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m.set(i, i, true);
  return from_constraints(m, v);
}

AffineSubspace AffineSubspace::from_constraints(const BitMatrix& m, const BitVector& b) {
  if (b.size() != m.rows()) {
    throw std::invalid_argument("solve_affine: rhs length must equal row count");
  }
  std::size_t n = m.cols();

  // Reduce the augmented system [M | b].
  BitMatrix aug(m.rows(), n + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    BitVector r(n + 1);
    for (std::size_t j : m.row(i).set_bits()) r.set(j, true);
    if (b.get(i)) r.set(n, true);
    aug.row(i) = r;
  }
  RrefResult rr = aug.rref();
  // A pivot in the rhs column means 0 = 1.
  if (!rr.pivots.empty() && rr.pivots.back() == n) {
    return AffineSubspace::empty(n);
  }

  AffineSubspace s;
  s.n_ = n;
  s.empty_ = false;
  s.pivots_ = rr.pivots;
  s.m_ = BitMatrix(rr.rank, n);
  s.b_ = BitVector(rr.rank);
  for (std::size_t i = 0; i < rr.rank; ++i) {
    s.m_.row(i) = aug.row(i).truncated(n);
    if (aug.get(i, n)) s.b_.set(i, true);
  }

  // Particular solution with zeros on the free coordinates.
  s.offset_ = BitVector(n);
  for (std::size_t i = 0; i < rr.rank; ++i) {
    if (s.b_.get(i)) s.offset_.set(rr.pivots[i], true);
  }
  s.basis_ = s.m_.nullspace();
  return s;
}

AffineSubspace AffineSubspace::from_parametric(const BitVector& offset,
                                               const std::vector<BitVector>& basis) {
  std::size_t n = offset.size();
  BitMatrix span((std::vector<BitVector>(basis)));
  if (span.rows() == 0) span = BitMatrix(0, n);
  if (span.cols() != n) {
    throw std::invalid_argument("from_parametric: basis length mismatch");
  }
  // Constraint rows are the functionals vanishing on the span.
  std::vector<BitVector> funcs = span.nullspace();
  BitMatrix m(std::move(funcs));
  if (m.rows() == 0) m = BitMatrix(0, n);
  BitVector b = m.multiply(offset);
  return from_constraints(m, b);
}

std::size_t AffineSubspace::dim() const {
  require();
  return n_ - m_.rows();
}

std::size_t AffineSubspace::codim() const {
  require();
  return m_.rows();
}

bool AffineSubspace::contains(const BitVector& x) const {
  if (x.size() != n_) {
    throw std::invalid_argument("contains: dimension mismatch");
  }
  if (empty_) return false;
  return m_.multiply(x) == b_;
}

bool AffineSubspace::contains_parametric(const BitVector& x) const {
  if (empty_) return false;
  // Reduce x - offset against the basis. Basis vector i is the canonical
  // nullspace vector for the i-th free column: it is the only basis vector
  // with that coordinate set, so one pass over the free columns reduces
  // completely.
  BitVector v = x ^ offset_;
  std::size_t p = 0, i = 0;
  for (std::size_t c = 0; c < n_; ++c) {
    if (p < pivots_.size() && pivots_[p] == c) {
      ++p;
      continue;
    }
    if (v.get(c)) v ^= basis_[i];
    ++i;
  }
  return v.is_zero();
}

BitVector AffineSubspace::element_from_combination(std::uint64_t combo) const {
  require();
  BitVector x = offset_;
  for (std::size_t i = 0; i < basis_.size() && i < 64; ++i) {
    if ((combo >> i) & 1) x ^= basis_[i];
  }
  return x;
}

void AffineSubspace::for_each_element(
    const std::function<void(const BitVector&)>& fn) const {
  require();
  if (basis_.size() >= 63) {
    throw guard_error("for_each_element: dimension too large to enumerate");
  }
  // Gray-code walk: one basis XOR per step.
  BitVector x = offset_;
  fn(x);
  std::uint64_t count = std::uint64_t{1} << basis_.size();
  for (std::uint64_t i = 1; i < count; ++i) {
    std::uint64_t gray_flip = std::countr_zero(i);
    x ^= basis_[gray_flip];
    fn(x);
  }
}

bool AffineSubspace::same_set(const AffineSubspace& o) const {
  if (n_ != o.n_) return false;
  if (empty_ || o.empty_) return empty_ == o.empty_;
  return m_ == o.m_ && b_ == o.b_;
}

// --- operations ---

std::tuple<std::size_t, BitMatrix, std::vector<std::size_t>> rref(const BitMatrix& m) {
  BitMatrix reduced = m;
  RrefResult rr = reduced.rref();
  return {rr.rank, reduced, rr.pivots};
}

AffineSubspace solve_affine(const BitMatrix& m, const BitVector& b) {
  return AffineSubspace::from_constraints(m, b);
}

AffineSubspace intersect(const AffineSubspace& u1, const AffineSubspace& u2) {
  if (u1.ambient() != u2.ambient()) {
    throw std::invalid_argument("intersect: ambient dimension mismatch");
  }
  std::size_t n = u1.ambient();
  if (u1.is_empty() || u2.is_empty()) return AffineSubspace::empty(n);
  BitMatrix m(0, n);
  BitVector b(u1.codim() + u2.codim());
  std::size_t k = 0;
  for (std::size_t i = 0; i < u1.codim(); ++i, ++k) {
    m.append_row(u1.constraints().row(i));
    if (u1.rhs().get(i)) b.set(k, true);
  }
  for (std::size_t i = 0; i < u2.codim(); ++i, ++k) {
    m.append_row(u2.constraints().row(i));
    if (u2.rhs().get(i)) b.set(k, true);
  }
  return AffineSubspace::from_constraints(m, b);
}

AffineSubspace affine_span(const AffineSubspace& u1, const AffineSubspace& u2) {
  if (u1.ambient() != u2.ambient()) {
    throw std::invalid_argument("affine_span: ambient dimension mismatch");
  }
  if (u1.is_empty()) return u2;
  if (u2.is_empty()) return u1;
  std::vector<BitVector> basis = u1.basis();
  for (const auto& v : u2.basis()) basis.push_back(v);
  basis.push_back(u1.offset() ^ u2.offset());
  return AffineSubspace::from_parametric(u1.offset(), basis);
}

AffineForm separating_functional(const AffineSubspace& u, const BitVector& v) {
  if (u.is_empty()) {
    throw std::domain_error("separating_functional: subspace is empty");
  }
  if (v.size() != u.ambient()) {
    throw std::invalid_argument("separating_functional: dimension mismatch");
  }
  // Each constraint row (m_i, b_i) is an affine functional vanishing on u.
  // v lies outside u iff one of them evaluates to 1 at v.
  for (std::size_t i = 0; i < u.codim(); ++i) {
    AffineForm a(u.constraints().row(i), u.rhs().get(i));
    if (a.eval(v)) return a;
  }
  throw std::domain_error("separating_functional: v lies in the subspace");
}

std::vector<std::size_t> coordinate_section(const AffineSubspace& u) {
  if (u.is_empty()) {
    throw std::domain_error("coordinate_section: subspace is empty");
  }
  // Free columns of the canonical RREF. Pivot columns are the
  // lexicographically first independent set, so this complement is the
  // lexicographically first valid choice.
  std::vector<std::size_t> section;
  std::size_t p = 0;
  for (std::size_t c = 0; c < u.ambient(); ++c) {
    if (p < u.pivots().size() && u.pivots()[p] == c) {
      ++p;
    } else {
      section.push_back(c);
    }
  }
  return section;
}

BitVector low_weight_element(const AffineSubspace& u) {
  if (u.is_empty()) {
    throw std::domain_error("low_weight_element: subspace is empty");
  }
  // The canonical offset is exactly the zero assignment on the section:
  // it is supported on the <= codim pivot coordinates.
  return u.offset();
}

std::uint64_t Rng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

BitVector Rng::vector(std::size_t n) {
  BitVector v(n);
  for (std::size_t i = 0; i < n; i += 64) {
    std::uint64_t w = next();
    for (std::size_t b = 0; b < 64 && i + b < n; ++b) {
      if ((w >> b) & 1) v.set(i + b, true);
    }
  }
  return v;
}

std::vector<std::size_t> Rng::subset(std::size_t n, std::size_t m) {
  if (m > n) throw std::invalid_argument("Rng::subset: m > n");
  // Floyd's algorithm.
  std::set<std::size_t> chosen;
  for (std::size_t j = n - m; j < n; ++j) {
    std::size_t t = static_cast<std::size_t>(below(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return std::vector<std::size_t>(chosen.begin(), chosen.end());
}

BitVector sample_uniform(const AffineSubspace& u, Rng& rng) {
  if (u.is_empty()) {
    throw std::domain_error("sample_uniform: subspace is empty");
  }
  BitVector x = u.offset();
  for (const BitVector& bv : u.basis()) {
    if (rng.bit()) x ^= bv;
  }
  return x;
}

BitVector sample_uniform(const AffineSubspace& u, std::uint64_t seed) {
  Rng rng(seed);
  return sample_uniform(u, rng);
}

mpz_class kleitman_bound(unsigned n, unsigned k) {
  if (2 * k >= n) {
    throw std::domain_error("kleitman_bound requires k < n/2");
  }
  mpz_class sum = 0;
  mpz_class term;
  for (unsigned j = 0; j <= k; ++j) {
    mpz_bin_uiui(term.get_mpz_t(), n, j);
    sum += term;
  }
  return sum;
}

mpf_class kleitman_entropy_bound(unsigned n, unsigned k) {
  if (2 * k >= n) {
    throw std::domain_error("kleitman_entropy_bound requires k < n/2");
  }
  if (k == 0) return mpf_class(1, kFloatBits);
  mpfr_t p, q, lp, lq, h;
  mpfr_inits2(kFloatBits, p, q, lp, lq, h, nullptr);
  mpfr_set_ui(p, k, MPFR_RNDN);
  mpfr_div_ui(p, p, n, MPFR_RNDN);
  mpfr_ui_sub(q, 1, p, MPFR_RNDN);
  mpfr_log2(lp, p, MPFR_RNDN);
  mpfr_log2(lq, q, MPFR_RNDN);
  // h = -(p log2 p + q log2 q)
  mpfr_mul(lp, lp, p, MPFR_RNDN);
  mpfr_mul(lq, lq, q, MPFR_RNDN);
  mpfr_add(h, lp, lq, MPFR_RNDN);
  mpfr_neg(h, h, MPFR_RNDN);
  mpfr_mul_ui(h, h, n, MPFR_RNDN);
  mpfr_exp2(h, h, MPFR_RNDN);
  mpf_class out(0, kFloatBits);
  mpfr_get_f(out.get_mpf_t(), h, MPFR_RNDN);
  mpfr_clears(p, q, lp, lq, h, nullptr);
  return out;
}

}  // namespace stabrank::f2
