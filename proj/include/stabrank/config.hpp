#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#ifndef STABRANK_MAX_BITS
#define STABRANK_MAX_BITS 256
#endif

namespace stabrank {

// Compile-time cap on the ambient dimension of F2 vectors.
inline constexpr std::size_t kMaxBits = STABRANK_MAX_BITS;
static_assert(kMaxBits % 64 == 0, "STABRANK_MAX_BITS must be a multiple of 64");

// Full-cube scans (dense evaluation, L2 distances, truth tables).
inline constexpr std::size_t kDenseMaxN = 24;
// Dense boolean-function tables.
inline constexpr std::size_t kBooleanMaxM = 24;
// Stabilizer-state enumeration; n = 4 is allowed behind an explicit flag.
inline constexpr std::size_t kEnumerateMaxN = 3;
inline constexpr std::size_t kEnumerateMaxNUnlocked = 4;
// Exhaustive witness engine: enumeration of the linear kernel V1 and of U.
inline constexpr std::size_t kExhaustiveKernelMaxDim = 24;
inline constexpr std::size_t kExhaustiveBucketMaxDim = 22;
// Default working precision for arbitrary-precision floats (R target etc.).
inline constexpr unsigned kFloatBits = 256;
inline constexpr int kRsDefaultRetries = 64;

// Raised when an operation would exceed a feasibility guard. The C API maps
// this to its own status code, so it must stay distinguishable from plain
// invalid-argument errors.
struct guard_error : std::runtime_error {
  explicit guard_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a best-effort search exhausts its budget without a result.
struct not_found_error : std::runtime_error {
  explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stabrank
