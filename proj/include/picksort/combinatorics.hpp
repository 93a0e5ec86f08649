#pragma once

// Exact password-space counting for grid configurations with per-set
// coverage: labelings by inclusion-exclusion, arrangements, and the total
// space summed over the permitted k-range.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace picksort {

using BigInt = boost::multiprecision::cpp_int;

class SpaceConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest number of sets the inclusion-exclusion sum will iterate over.
inline constexpr std::size_t kMaxSets = 20;

struct SpaceConfig {
  std::size_t n = 0;
  std::vector<std::size_t> set_sizes;
  std::size_t k_min = 0;
  std::size_t k_max = 0;

  std::size_t total_elements() const noexcept;
  /// Throws SpaceConfigError if any invariant fails.
  void validate() const;
};

struct SpaceResult {
  std::map<std::size_t, BigInt> per_k;
  BigInt total;
  double entropy_bits = 0.0;
};

BigInt binomial(std::size_t n, std::size_t k);

/// log2 of a positive integer from its bit length and leading 64 bits.
double log2_big(const BigInt& value);

/// Labelings of k cells, with repetition, from the union of the sets such
/// that every set is used at least once. Zero when k < number of sets.
BigInt valid_labelings(std::size_t k, std::span<const std::size_t> set_sizes);

/// C(n, k) * valid_labelings(k). Throws SpaceConfigError when k > n.
BigInt arrangements(std::size_t n, std::size_t k, std::span<const std::size_t> set_sizes);

SpaceResult total_space(const SpaceConfig& config);

/// Exhaustive count over every (cell subset, labeling) pair. Only for tiny
/// configurations: n <= 8 and (S + 1)^n <= 6^8, the enumeration size of the
/// n = 8, S = 5 corner. Larger inputs throw SpaceConfigError.
BigInt brute_force_space(const SpaceConfig& config);

inline constexpr std::size_t kBruteForceMaxCells = 8;
inline constexpr std::uint64_t kBruteForceMaxWork = 1'679'616;  // 6^8

}  // namespace picksort
