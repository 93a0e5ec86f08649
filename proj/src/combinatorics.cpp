#include "picksort/combinatorics.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace picksort {

std::size_t SpaceConfig::total_elements() const noexcept {
  return std::accumulate(set_sizes.begin(), set_sizes.end(), std::size_t{0});
}

void SpaceConfig::validate() const {
  if (n == 0) throw SpaceConfigError("n must be positive");
  if (set_sizes.empty()) throw SpaceConfigError("at least one set is required");
  if (set_sizes.size() > kMaxSets) {
    throw SpaceConfigError("at most " + std::to_string(kMaxSets) + " sets are supported");
  }
  for (auto s : set_sizes) {
    if (s == 0) throw SpaceConfigError("set sizes must be positive");
  }
  if (k_min < set_sizes.size()) throw SpaceConfigError("k_min must be at least the number of sets");
  if (k_min > k_max) throw SpaceConfigError("k_min must not exceed k_max");
  if (k_max > n) throw SpaceConfigError("k_max must not exceed n");
}

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;  // exact: result is C(n-k+i, i) here
  }
  return result;
}

double log2_big(const BigInt& value) {
  if (value <= 0) throw std::domain_error("log2 of a non-positive integer");
  const std::size_t bits = boost::multiprecision::msb(value) + 1;
  if (bits <= 64) return std::log2(static_cast<long double>(value.convert_to<std::uint64_t>()));
  const std::size_t shift = bits - 64;
  const auto top = static_cast<std::uint64_t>(value >> shift);
  return static_cast<double>(std::log2(static_cast<long double>(top)) + static_cast<long double>(shift));
}

BigInt valid_labelings(std::size_t k, std::span<const std::size_t> set_sizes) {
  if (set_sizes.empty()) throw SpaceConfigError("valid_labelings needs at least one set");
  if (set_sizes.size() > kMaxSets) {
    throw SpaceConfigError("at most " + std::to_string(kMaxSets) + " sets are supported");
  }
  const std::size_t m = set_sizes.size();
  if (k < m) return 0;

  const std::size_t pool = std::accumulate(set_sizes.begin(), set_sizes.end(), std::size_t{0});
  BigInt sum = 0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::size_t excluded = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) excluded += set_sizes[i];
    }
    BigInt term = boost::multiprecision::pow(BigInt(pool - excluded), static_cast<unsigned>(k));
    if (std::popcount(mask) % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum;
}

BigInt arrangements(std::size_t n, std::size_t k, std::span<const std::size_t> set_sizes) {
  if (k > n) throw SpaceConfigError("k (" + std::to_string(k) + ") exceeds grid size n (" + std::to_string(n) + ")");
  return binomial(n, k) * valid_labelings(k, set_sizes);
}

SpaceResult total_space(const SpaceConfig& config) {
  config.validate();
  SpaceResult result;
  for (std::size_t k = config.k_min; k <= config.k_max; ++k) {
    auto n_k = arrangements(config.n, k, config.set_sizes);
    result.total += n_k;
    result.per_k.emplace(k, std::move(n_k));
  }
  result.entropy_bits = log2_big(result.total);
  return result;
}

BigInt brute_force_space(const SpaceConfig& config) {
  if (config.set_sizes.empty()) throw SpaceConfigError("at least one set is required");
  std::uint64_t work = 1;
  for (std::size_t i = 0; i < config.n && work <= kBruteForceMaxWork; ++i) work *= config.total_elements() + 1;
  if (config.n > kBruteForceMaxCells || work > kBruteForceMaxWork) {
    throw SpaceConfigError("brute force is limited to n <= 8 and (S + 1)^n <= 6^8");
  }
  for (auto s : config.set_sizes) {
    if (s == 0) throw SpaceConfigError("set sizes must be positive");
  }
  if (config.k_min > config.k_max || config.k_max > config.n) {
    throw SpaceConfigError("k-range must satisfy k_min <= k_max <= n");
  }

  // Element e belongs to the set owner[e].
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < config.set_sizes.size(); ++i) owner.insert(owner.end(), config.set_sizes[i], i);
  const std::size_t pool = owner.size();
  const std::uint32_t all_sets = (1u << config.set_sizes.size()) - 1;

  std::uint64_t count = 0;
  for (std::uint32_t cells = 0; cells < (1u << config.n); ++cells) {
    const auto k = static_cast<std::size_t>(std::popcount(cells));
    if (k < config.k_min || k > config.k_max) continue;

    // Odometer over pool^k labelings of the chosen cells.
    std::vector<std::size_t> label(k, 0);
    while (true) {
      std::uint32_t seen = 0;
      for (auto e : label) seen |= 1u << owner[e];
      if (seen == all_sets) ++count;

      std::size_t pos = 0;
      while (pos < k && ++label[pos] == pool) label[pos++] = 0;
      if (pos == k) break;
    }
  }
  return BigInt(count);
}

}  // namespace picksort
