#include "stabrank/witness.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace stabrank::rankops {

using f2::AffineForm;
using f2::BitMatrix;
using f2::Rng;

const char* search_mode_name(SearchMode m) {
  return m == SearchMode::Exhaustive ? "exhaustive" : "sampled";
}

SearchMode search_mode_from_name(const std::string& name) {
  if (name == "exhaustive") return SearchMode::Exhaustive;
  if (name == "sampled") return SearchMode::Sampled;
  throw std::invalid_argument("unknown search mode: " + name);
}

namespace {

using PatternKey = std::vector<std::uint64_t>;

PatternKey make_key(std::size_t r) { return PatternKey((r + 63) / 64, 0); }

void key_set(PatternKey& k, std::size_t j, bool v) {
  if (v) k[j >> 6] |= std::uint64_t{1} << (j & 63);
}

// Stack the constraints of `base` with rows "<coeffs, x> = rhs".
AffineSubspace with_affine_constraints(const AffineSubspace& base,
                                       const std::vector<AffineForm>& forms,
                                       const std::vector<bool>& rhs) {
  std::size_t n = base.ambient();
  BitMatrix m(0, n);
  BitVector b(base.codim() + forms.size());
  std::size_t row = 0;
  for (std::size_t i = 0; i < base.codim(); ++i, ++row) {
    m.append_row(base.constraints().row(i));
    if (base.rhs().get(i)) b.set(row, true);
  }
  for (std::size_t i = 0; i < forms.size(); ++i, ++row) {
    m.append_row(forms[i].coeffs());
    // <c, x> + const = rhs  <=>  <c, x> = rhs + const
    if (rhs[i] ^ forms[i].constant()) b.set(row, true);
  }
  return AffineSubspace::from_constraints(m, b);
}

}  // namespace

ConstantSubspaceResult find_constant_subspace(const StabilizerDecomposition& d,
                                              SearchMode mode, std::uint64_t seed,
                                              std::size_t sample_count) {
  const std::size_t n = d.n();
  const std::size_t r = d.rank();
  if (r == 0) {
    throw std::invalid_argument("find_constant_subspace: decomposition is empty");
  }

  // V1 = kernel of the l_j's.
  BitMatrix lmat(0, n);
  for (const auto& term : d.terms()) {
    lmat.append_row(term.phi.ell().coeffs());
  }
  AffineSubspace v1 = AffineSubspace::from_constraints(lmat, BitVector(r));

  // Most-populated indicator pattern alpha on V1 and a base point realizing it.
  std::map<PatternKey, std::pair<std::uint64_t, BitVector>> buckets;
  auto account = [&](const BitVector& x) {
    PatternKey key = make_key(r);
    for (std::size_t j = 0; j < r; ++j) {
      key_set(key, j, d.terms()[j].phi.support().contains(x));
    }
    auto it = buckets.find(key);
    if (it == buckets.end()) {
      buckets.emplace(key, std::make_pair(std::uint64_t{1}, x));
    } else {
      ++it->second.first;
    }
  };

  SearchMode used = mode;
  if (mode == SearchMode::Exhaustive) {
    if (v1.dim() > kExhaustiveKernelMaxDim) {
      throw guard_error("find_constant_subspace: dim(V1) exceeds the exhaustive guard");
    }
    v1.for_each_element(account);
  } else {
    Rng rng(seed);
    for (std::size_t s = 0; s < sample_count; ++s) {
      account(f2::sample_uniform(v1, rng));
    }
  }

  // Largest bucket; ties prefer the larger pattern key, i.e. membership over
  // exclusion, which also keeps U inside the supports when both halves tie.
  const PatternKey* best_key = nullptr;
  std::uint64_t best_count = 0;
  for (const auto& [key, entry] : buckets) {
    if (entry.first >= best_count) {
      best_count = entry.first;
      best_key = &key;
    }
  }
  const BitVector& x0 = buckets.at(*best_key).second;

  std::vector<bool> alpha(r);
  for (std::size_t j = 0; j < r; ++j) {
    alpha[j] = ((*best_key)[j >> 6] >> (j & 63)) & 1;
  }

  // V2 = V1 intersected with the supports in the pattern.
  AffineSubspace v2 = v1;
  for (std::size_t j = 0; j < r; ++j) {
    if (alpha[j]) v2 = f2::intersect(v2, d.terms()[j].phi.support());
  }

  // Cut down by separating functionals for the off-pattern supports.
  std::vector<AffineForm> seps;
  for (std::size_t j = 0; j < r; ++j) {
    if (!alpha[j]) {
      seps.push_back(f2::separating_functional(d.terms()[j].phi.support(), x0));
    }
  }
  AffineSubspace u = with_affine_constraints(v2, seps, std::vector<bool>(seps.size(), true));

  if (u.is_empty() || !u.contains(x0)) {
    throw std::logic_error("find_constant_subspace: base point fell out of U");
  }

  ConstantSubspaceResult res;
  res.base_point = x0;
  res.alpha = std::move(alpha);
  res.ell_zero.assign(r, true);
  res.kernel_dim = v1.dim();
  res.mode_used = used;

  if (mode == SearchMode::Exhaustive) {
    // dim(U) >= n - 3r is unconditional for the largest pattern.
    if (static_cast<long>(u.dim()) < static_cast<long>(n) - 3 * static_cast<long>(r)) {
      throw std::logic_error("find_constant_subspace: dimension bound violated");
    }
    res.dim_bound_asserted = true;
  }

  // Constancy check: exhaustive when U is small, sampled otherwise.
  auto check_point = [&](const BitVector& x) {
    for (std::size_t j = 0; j < r; ++j) {
      if (d.terms()[j].phi.ell().eval(x)) {
        throw std::logic_error("find_constant_subspace: l_j not zero on U");
      }
      if (d.terms()[j].phi.support().contains(x) != res.alpha[j]) {
        throw std::logic_error("find_constant_subspace: 1_{A_j} not constant on U");
      }
    }
  };
  if (u.dim() <= 16) {
    u.for_each_element(check_point);
  } else {
    Rng rng(seed ^ 0x5eedul);
    for (int s = 0; s < 256; ++s) check_point(f2::sample_uniform(u, rng));
  }

  res.u = std::move(u);
  return res;
}

namespace {

// Candidate acceptance: given (v, x0) with v in U_0 heavy and x0 in U solving
// the derivative system, decide whether to finish. Returns true to stop.
using CandidateSink = std::function<bool(const BitVector& v, const BitVector& x0)>;

struct HeavySearchStats {
  std::uint64_t candidates = 0;
  bool pair_scan_exhausted = false;
  SearchMode mode_used = SearchMode::Exhaustive;
};

// Verifies q_j(x0) = q_j(x0 + v) for all j by direct evaluation.
bool derivative_system_holds(const StabilizerDecomposition& d, const BitVector& v,
                             const BitVector& x0) {
  for (const auto& term : d.terms()) {
    if (term.phi.quad_form().eval(x0) != term.phi.quad_form().eval(x0 ^ v)) {
      return false;
    }
  }
  return true;
}

HeavySearchStats heavy_direction_search(const StabilizerDecomposition& d,
                                        const ConstantSubspaceResult& ur,
                                        SearchMode mode, std::uint64_t seed,
                                        std::uint64_t budget,
                                        const CandidateSink& sink) {
  HeavySearchStats stats;
  const std::size_t n = d.n();
  const std::size_t r = d.rank();
  const AffineSubspace& u = ur.u;
  const std::size_t target = (2 * n + 2) / 3;  // ceil(2n/3)

  bool exhausted_budget = false;

  if (mode == SearchMode::Exhaustive && u.dim() <= kExhaustiveBucketMaxDim) {
    stats.mode_used = SearchMode::Exhaustive;
    // Bucket U by the pattern (q_1(x), ..., q_r(x)).
    std::map<PatternKey, std::uint64_t> counts;
    u.for_each_element([&](const BitVector& x) {
      PatternKey key = make_key(r);
      for (std::size_t j = 0; j < r; ++j) {
        key_set(key, j, d.terms()[j].phi.quad_form().eval(x));
      }
      ++counts[key];
    });
    const PatternKey* best_key = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [key, cnt] : counts) {
      if (cnt > best_count) {
        best_count = cnt;
        best_key = &key;
      }
    }
    // Collect the winning bucket, stride-sampled beyond the cap.
    const std::uint64_t cap = std::uint64_t{1} << 14;
    std::uint64_t stride = (best_count + cap - 1) / cap;
    std::vector<BitVector> bucket;
    bucket.reserve(std::min<std::uint64_t>(best_count, cap));
    std::uint64_t seen = 0;
    u.for_each_element([&](const BitVector& x) {
      PatternKey key = make_key(r);
      for (std::size_t j = 0; j < r; ++j) {
        key_set(key, j, d.terms()[j].phi.quad_form().eval(x));
      }
      if (key == *best_key) {
        if (seen % stride == 0) bucket.push_back(x);
        ++seen;
      }
    });
    // Scan for a far pair; any pair in the bucket already solves the system.
    std::uint64_t scan_ops = 0;
    const std::uint64_t scan_cap = std::max<std::uint64_t>(budget * 4096, 1u << 24);
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      for (std::size_t j = i + 1; j < bucket.size(); ++j) {
        if (++scan_ops > scan_cap) {
          stats.pair_scan_exhausted = true;
          break;
        }
        BitVector v = bucket[i] ^ bucket[j];
        if (v.weight() < target) continue;
        ++stats.candidates;
        if (!derivative_system_holds(d, v, bucket[i])) {
          throw std::logic_error("heavy direction: bucket pair failed the system");
        }
        if (sink(v, bucket[i])) return stats;
        if (stats.candidates >= budget) {
          exhausted_budget = true;
          break;
        }
      }
      if (stats.pair_scan_exhausted || exhausted_budget) break;
    }
    if (exhausted_budget) return stats;
    // Fall through to sampling with whatever budget remains.
  }

  stats.mode_used = SearchMode::Sampled;
  Rng rng(seed ^ 0x6a09e667f3bcc909ull);
  const std::vector<BitVector>& basis = u.basis();
  if (basis.empty()) return stats;

  while (stats.candidates < budget) {
    // Uniform element of U_0, then a greedy weight climb over the basis.
    BitVector v(n);
    for (const auto& bv : basis) {
      if (rng.bit()) v ^= bv;
    }
    std::size_t improved = 1;
    while (v.weight() < target && improved) {
      improved = 0;
      std::size_t w = v.weight();
      for (const auto& bv : basis) {
        if ((v ^ bv).weight() > w) {
          v ^= bv;
          w = v.weight();
          improved = 1;
        }
      }
    }
    ++stats.candidates;
    if (v.is_zero() || v.weight() < target) continue;

    // Solvability of {Delta_v(q_j) = 0} over U by linear algebra.
    std::vector<AffineForm> rows;
    rows.reserve(r);
    for (const auto& term : d.terms()) {
      rows.push_back(term.phi.quad_form().directional_derivative(v));
    }
    AffineSubspace sol = with_affine_constraints(u, rows, std::vector<bool>(r, false));
    if (sol.is_empty()) continue;
    BitVector x0 = sol.offset();
    if (!derivative_system_holds(d, v, x0)) {
      throw std::logic_error("heavy direction: solved system failed re-evaluation");
    }
    if (sink(v, x0)) return stats;
  }
  return stats;
}

}  // namespace

HeavyDirectionResult find_heavy_direction(const StabilizerDecomposition& d,
                                          const ConstantSubspaceResult& u,
                                          SearchMode mode, std::uint64_t seed,
                                          std::uint64_t budget) {
  HeavyDirectionResult res;
  auto stats = heavy_direction_search(
      d, u, mode, seed, budget, [&](const BitVector& v, const BitVector& x0) {
        res.found = true;
        res.direction = v;
        res.solution = x0;
        return true;
      });
  res.candidates_tried = stats.candidates;
  res.pair_scan_exhausted = stats.pair_scan_exhausted;
  res.mode_used = stats.mode_used;
  return res;
}

CollisionWitness find_collision_witness(const StabilizerDecomposition& d,
                                        SearchMode mode, std::uint64_t seed,
                                        std::uint64_t budget) {
  const std::size_t n = d.n();
  const std::size_t r = d.rank();
  ConstantSubspaceResult ur = find_constant_subspace(d, mode, seed);

  CollisionWitness w;
  w.dim_u = ur.u.dim();
  w.kernel_dim = ur.kernel_dim;
  w.dim_bound_asserted = ur.dim_bound_asserted;

  auto stats = heavy_direction_search(
      d, ur, mode, seed, budget, [&](const BitVector& v, const BitVector& x0) {
        // V = solutions of the derivative system inside U.
        std::vector<AffineForm> rows;
        for (const auto& term : d.terms()) {
          rows.push_back(term.phi.quad_form().directional_derivative(v));
        }
        AffineSubspace vsp =
            with_affine_constraints(ur.u, rows, std::vector<bool>(r, false));
        if (vsp.is_empty() || !vsp.contains(x0)) {
          throw std::logic_error("collision witness: V lost its solution");
        }
        if (vsp.dim() + r < ur.u.dim()) {
          throw std::logic_error("collision witness: dim(V) < dim(U) - r");
        }
        BitVector y = f2::low_weight_element(vsp);
        BitVector z = y ^ v;
        if (y.weight() >= z.weight()) return false;  // keep searching

        WitnessCheck check = verify_witness(d, y, z);
        if (!check.all_pass) {
          throw std::logic_error("collision witness: verification failed");
        }
        w.found = true;
        w.y = y;
        w.z = z;
        w.direction = v;
        w.weight_y = y.weight();
        w.weight_z = z.weight();
        w.dim_v = vsp.dim();
        return true;
      });
  w.candidates_tried = stats.candidates;
  w.mode_used = stats.mode_used;
  return w;
}

WitnessCheck verify_witness(const StabilizerDecomposition& d, const BitVector& y,
                            const BitVector& z) {
  WitnessCheck res;
  res.weight_y = y.weight();
  res.weight_z = z.weight();
  res.weights_distinct = res.weight_y != res.weight_z;

  res.per_term_pass = true;
  for (const auto& term : d.terms()) {
    bool le = term.phi.ell().eval(y) == term.phi.ell().eval(z);
    bool se = term.phi.support().contains(y) == term.phi.support().contains(z);
    bool qe = term.phi.quad_form().eval(y) == term.phi.quad_form().eval(z);
    res.ell_equal.push_back(le);
    res.support_equal.push_back(se);
    res.quad_equal.push_back(qe);
    res.per_term_pass = res.per_term_pass && le && se && qe;
  }

  if (d.exact_mode()) {
    stab::Cyclo fy = d.eval_exact(y), fz = d.eval_exact(z);
    res.value_equal = (fy == fz);
    res.value_y = fy.to_string();
    res.value_z = fz.to_string();
  } else {
    // Per-term equality implies the sums are identical term by term, so the
    // comparison is still exact; report high-precision embeddings.
    stab::ComplexMP fy = d.eval_float(y), fz = d.eval_float(z);
    res.value_equal = (fy.re == fz.re && fy.im == fz.im);
    res.value_y = "(" + std::to_string(fy.re.get_d()) + ", " + std::to_string(fy.im.get_d()) + ")";
    res.value_z = "(" + std::to_string(fz.re.get_d()) + ", " + std::to_string(fz.im.get_d()) + ")";
  }

  res.all_pass = res.weights_distinct && res.per_term_pass && res.value_equal;
  return res;
}

}  // namespace stabrank::rankops
