#pragma once

#include <optional>
#include <vector>

#include "stabrank/stabilizer.hpp"

namespace stabrank::rankops {

using stab::ComplexMP;
using stab::Cyclo;
using stab::MagicTarget;
using stab::StabilizerDecomposition;

struct RankSearchResult {
  bool found = false;
  std::size_t r = 0;
  std::optional<StabilizerDecomposition> certificate;
  // True when the claim is an exact minimal rank backed by a zero residual;
  // float-mode targets only ever get an "at most r within tolerance" claim.
  bool exact_claim = true;
  double tolerance = 0.0;
  std::uint64_t subsets_tested = 0;
  std::size_t states_available = 0;
};

// Ascending-r search over all r-subsets of the enumerated stabilizer states,
// with span membership decided by exact Gaussian elimination over the
// cyclotomic field. The returned certificate has an exactly-zero residual.
RankSearchResult exact_rank_search(const MagicTarget& t, std::size_t r_max,
                                   bool allow_n4 = false);

// Same search for an explicit exact amplitude vector (length 2^n).
RankSearchResult exact_rank_search_vector(const std::vector<Cyclo>& target,
                                          std::size_t n, std::size_t r_max,
                                          bool allow_n4 = false);

// Float-target variant (R): reports the least r whose span reproduces the
// target within `tolerance` in every amplitude. Never an exact-rank claim.
RankSearchResult float_rank_search(const MagicTarget& t, std::size_t r_max,
                                   double tolerance, bool allow_n4 = false);

}  // namespace stabrank::rankops
