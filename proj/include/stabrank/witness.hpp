#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabrank/stabilizer.hpp"

namespace stabrank::rankops {

using f2::AffineSubspace;
using f2::BitVector;
using stab::StabilizerDecomposition;

enum class SearchMode { Exhaustive, Sampled };

const char* search_mode_name(SearchMode m);
SearchMode search_mode_from_name(const std::string& name);

// An affine subspace on which every l_j and every 1_{A_j} of the
// decomposition is constant. Built from the kernel V1 of the l_j's, the
// most-populated indicator pattern alpha on V1, and separating functionals
// for the off-pattern supports. Always nonempty: it contains base_point.
struct ConstantSubspaceResult {
  AffineSubspace u;
  BitVector base_point;        // x0, realizes the pattern
  std::vector<bool> alpha;     // 1_{A_j} value on u, per term
  std::vector<bool> ell_zero;  // l_j == 0 on u (always true by construction)
  std::size_t kernel_dim = 0;  // dim V1
  SearchMode mode_used = SearchMode::Exhaustive;
  // Exhaustive mode guarantees dim(u) >= n - 3r and asserts it.
  bool dim_bound_asserted = false;
};

ConstantSubspaceResult find_constant_subspace(const StabilizerDecomposition& d,
                                              SearchMode mode, std::uint64_t seed,
                                              std::size_t sample_count = 512);

struct HeavyDirectionResult {
  bool found = false;
  BitVector direction;  // v in U_0 with |v| >= ceil(2n/3)
  BitVector solution;   // x0 in U solving {Delta_v(q_j) = 0}
  std::uint64_t candidates_tried = 0;
  bool pair_scan_exhausted = false;
  SearchMode mode_used = SearchMode::Exhaustive;
};

HeavyDirectionResult find_heavy_direction(const StabilizerDecomposition& d,
                                          const ConstantSubspaceResult& u,
                                          SearchMode mode, std::uint64_t seed,
                                          std::uint64_t budget = 10000);

struct CollisionWitness {
  bool found = false;
  BitVector y, z, direction;
  std::size_t weight_y = 0, weight_z = 0;
  std::size_t dim_u = 0, dim_v = 0;
  std::size_t kernel_dim = 0;
  std::uint64_t candidates_tried = 0;
  SearchMode mode_used = SearchMode::Exhaustive;
  bool dim_bound_asserted = false;
};

// The full constructive argument: constant subspace U, heavy direction v,
// solution space V of the derivative system inside U, y the low-weight
// element of V and z = y + v. Every returned witness is re-verified by
// direct evaluation before being handed out; a verification failure is an
// internal error, never a result.
CollisionWitness find_collision_witness(const StabilizerDecomposition& d,
                                        SearchMode mode, std::uint64_t seed,
                                        std::uint64_t budget = 10000);

struct WitnessCheck {
  std::size_t weight_y = 0, weight_z = 0;
  bool weights_distinct = false;
  std::vector<bool> ell_equal, support_equal, quad_equal;
  bool per_term_pass = false;
  bool value_equal = false;  // F(y) == F(z); exact in exact mode
  bool all_pass = false;
  std::string value_y, value_z;
};

// Pure re-evaluation of the witness conditions; trusts nothing upstream.
WitnessCheck verify_witness(const StabilizerDecomposition& d, const BitVector& y,
                            const BitVector& z);

}  // namespace stabrank::rankops
