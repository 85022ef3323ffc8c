#include "stabrank/rank_search.hpp"

#include <bit>
#include <stdexcept>

namespace stabrank::rankops {

using f2::BitVector;
using stab::EnumeratedState;

namespace {

struct CycloField {
  using Scalar = Cyclo;
  static bool is_zero(const Cyclo& z) { return z.is_zero(); }
  static Cyclo inv(const Cyclo& z) { return z.inverse(); }
};

struct ComplexField {
  using Scalar = ComplexMP;
  mpf_class eps;
  bool is_zero(const ComplexMP& z) const { return z.norm_sq() <= eps * eps; }
  static ComplexMP inv(const ComplexMP& z) {
    mpf_class n = z.norm_sq();
    return ComplexMP(z.re / n, -z.im / n);
  }
};

// Solve sum_j c_j col_j = target by Gaussian elimination on the augmented
// (rows x r+1) matrix. Returns coefficients, or nullopt when inconsistent.
template <class Field>
std::optional<std::vector<typename Field::Scalar>> solve_span(
    const Field& field, std::vector<std::vector<typename Field::Scalar>> cols,
    std::vector<typename Field::Scalar> rhs) {
  using S = typename Field::Scalar;
  const std::size_t rows = rhs.size();
  const std::size_t r = cols.size();

  std::vector<std::size_t> pivot_row_of_col(r, rows);
  std::size_t next_row = 0;
  std::vector<std::size_t> row_order(rows);
  for (std::size_t i = 0; i < rows; ++i) row_order[i] = i;

  for (std::size_t j = 0; j < r && next_row < rows; ++j) {
    std::size_t p = next_row;
    while (p < rows && field.is_zero(cols[j][row_order[p]])) ++p;
    if (p == rows) continue;
    std::swap(row_order[next_row], row_order[p]);
    std::size_t pr = row_order[next_row];
    S scale = Field::inv(cols[j][pr]);
    for (std::size_t jj = j; jj < r; ++jj) {
      cols[jj][pr] = cols[jj][pr] * scale;
    }
    rhs[pr] = rhs[pr] * scale;
    for (std::size_t i = 0; i < rows; ++i) {
      std::size_t ri = row_order[i];
      if (ri == pr || field.is_zero(cols[j][ri])) continue;
      S f = cols[j][ri];
      for (std::size_t jj = j; jj < r; ++jj) {
        cols[jj][ri] = cols[jj][ri] - f * cols[jj][pr];
      }
      rhs[ri] = rhs[ri] - f * rhs[pr];
    }
    pivot_row_of_col[j] = pr;
    ++next_row;
  }

  // Rows below the pivots must have zero right-hand side.
  for (std::size_t i = next_row; i < rows; ++i) {
    if (!field.is_zero(rhs[row_order[i]])) return std::nullopt;
  }

  std::vector<S> c(r, S{});
  for (std::size_t j = 0; j < r; ++j) {
    if (pivot_row_of_col[j] < rows) c[j] = rhs[pivot_row_of_col[j]];
  }
  return c;
}

Cyclo code_value(std::uint8_t code) {
  return code ? Cyclo::zeta_pow(4 * static_cast<long>(code - 1)) : Cyclo::zero();
}

template <class TrySubset>
bool for_each_combination(std::size_t count, std::size_t r, TrySubset&& fn) {
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  if (r > count) return false;
  while (true) {
    if (fn(idx)) return true;
    // next combination in lexicographic order
    std::size_t i = r;
    while (i-- > 0) {
      if (idx[i] != i + count - r) {
        ++idx[i];
        for (std::size_t j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return false;
    }
  }
}

}  // namespace

RankSearchResult exact_rank_search_vector(const std::vector<Cyclo>& target,
                                          std::size_t n, std::size_t r_max,
                                          bool allow_n4) {
  const std::size_t points = std::size_t{1} << n;
  if (target.size() != points) {
    throw std::invalid_argument("exact_rank_search: target length must be 2^n");
  }
  std::vector<EnumeratedState> states = stab::enumerate_stabilizer_states(n, allow_n4);

  RankSearchResult res;
  res.states_available = states.size();

  CycloField field;
  for (std::size_t r = 1; r <= r_max; ++r) {
    bool found = for_each_combination(states.size(), r, [&](const std::vector<std::size_t>& idx) {
      ++res.subsets_tested;
      std::vector<std::vector<Cyclo>> cols(r, std::vector<Cyclo>(points));
      for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t p = 0; p < points; ++p) {
          cols[j][p] = code_value(states[idx[j]].canonical[p]);
        }
      }
      auto coeffs = solve_span(field, cols, target);
      if (!coeffs) return false;

      StabilizerDecomposition cert(n, true);
      for (std::size_t j = 0; j < r; ++j) {
        const EnumeratedState& st = states[idx[j]];
        // canonical = representative / i^{lead}; fold the phase into c.
        Cyclo c = (*coeffs)[j] * Cyclo::zeta_pow(-4 * static_cast<long>(st.lead_phase));
        if (c.is_zero()) continue;
        cert.add_term(c, st.representative);
      }
      // Exact residual re-verification, independent of the solver path.
      for (std::size_t p = 0; p < points; ++p) {
        BitVector x = BitVector::from_bits(n, p);
        if (cert.eval_exact(x) != target[p]) {
          throw std::logic_error("rank search: certificate residual is nonzero");
        }
      }
      res.found = true;
      res.r = r;
      res.certificate = std::move(cert);
      return true;
    });
    if (found) return res;
  }
  return res;
}

RankSearchResult exact_rank_search(const MagicTarget& t, std::size_t r_max,
                                   bool allow_n4) {
  if (!t.exact()) {
    throw std::invalid_argument(
        "exact_rank_search: float-mode target; use float_rank_search for an "
        "'at most r within tolerance' claim");
  }
  const std::size_t points = std::size_t{1} << t.n();
  std::vector<Cyclo> target(points);
  for (std::size_t p = 0; p < points; ++p) {
    target[p] = t.amplitude_exact(std::popcount(static_cast<std::uint64_t>(p)));
  }
  return exact_rank_search_vector(target, t.n(), r_max, allow_n4);
}

RankSearchResult float_rank_search(const MagicTarget& t, std::size_t r_max,
                                   double tolerance, bool allow_n4) {
  if (tolerance <= 0) {
    throw std::invalid_argument("float_rank_search: tolerance must be positive");
  }
  const std::size_t points = std::size_t{1} << t.n();
  std::vector<ComplexMP> target(points);
  for (std::size_t p = 0; p < points; ++p) {
    target[p] = t.amplitude_float(std::popcount(static_cast<std::uint64_t>(p)));
  }
  std::vector<EnumeratedState> states =
      stab::enumerate_stabilizer_states(t.n(), allow_n4);

  RankSearchResult res;
  res.states_available = states.size();
  res.exact_claim = false;
  res.tolerance = tolerance;

  ComplexField field;
  field.eps = mpf_class(tolerance, kFloatBits) / 1024;

  for (std::size_t r = 1; r <= r_max; ++r) {
    bool found = for_each_combination(states.size(), r, [&](const std::vector<std::size_t>& idx) {
      ++res.subsets_tested;
      std::vector<std::vector<ComplexMP>> cols(r, std::vector<ComplexMP>(points));
      for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t p = 0; p < points; ++p) {
          cols[j][p] = code_value(states[idx[j]].canonical[p]).to_complex();
        }
      }
      auto coeffs = solve_span(field, cols, target);
      if (!coeffs) return false;

      StabilizerDecomposition cert(t.n(), false);
      for (std::size_t j = 0; j < r; ++j) {
        const EnumeratedState& st = states[idx[j]];
        ComplexMP c = (*coeffs)[j] *
                      Cyclo::zeta_pow(-4 * static_cast<long>(st.lead_phase)).to_complex();
        cert.add_term(c, st.representative);
      }
      mpf_class tol(tolerance, kFloatBits);
      for (std::size_t p = 0; p < points; ++p) {
        BitVector x = BitVector::from_bits(t.n(), p);
        ComplexMP diff = cert.eval_float(x) - target[p];
        if (diff.norm_sq() > tol * tol) return false;
      }
      res.found = true;
      res.r = r;
      res.certificate = std::move(cert);
      return true;
    });
    if (found) return res;
  }
  return res;
}

}  // namespace stabrank::rankops
