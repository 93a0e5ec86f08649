#pragma once

// Per-attempt palette layouts. Each set's display order is shuffled
// independently; elements never leave their set and grid cells never move.

#include <chrono>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "picksort/model.hpp"

namespace picksort {

using Clock = std::chrono::system_clock;

inline constexpr std::chrono::seconds kDefaultChallengeTtl{300};

/// Generators that yield full-width 64-bit words, e.g. std::mt19937_64 in
/// tests and SecureRandom in production.
template <typename G>
concept Random64 = std::uniform_random_bit_generator<G> && (G::min() == 0) &&
                   (G::max() == std::numeric_limits<std::uint64_t>::max());

/// Uniform integer in [0, bound) by rejection, free of modulo bias.
template <Random64 Rng>
std::uint64_t uniform_below(std::uint64_t bound, Rng& rng) {
  // Largest multiple of bound that fits; draws at or above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = 0;
  do {
    draw = static_cast<std::uint64_t>(rng());
  } while (draw >= limit);
  return draw % bound;
}

/// Fisher-Yates.
template <typename T, Random64 Rng>
void shuffle_in_place(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(i, rng));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

/// Fresh 128-bit URL-safe token.
std::string new_challenge_token();

struct Challenge {
  std::string token;
  std::string username;
  /// Keyed by set_id; each value is a permutation of that set's element_ids.
  std::map<std::string, std::vector<std::string>> per_set_order;
  Clock::time_point issued_at;
  Clock::time_point expires_at;
};

/// Palette order for every set, shuffled within each set.
template <Random64 Rng>
std::map<std::string, std::vector<std::string>> shuffled_palettes(const PolicyConfig& policy, Rng& rng) {
  std::map<std::string, std::vector<std::string>> orders;
  for (const auto& set : policy.sets()) {
    std::vector<std::string> ids;
    ids.reserve(set.size());
    for (const auto& e : set.elements()) ids.push_back(e.element_id);
    shuffle_in_place(std::span<std::string>(ids), rng);
    orders.emplace(set.set_id(), std::move(ids));
  }
  return orders;
}

/// The shuffle draws only from rng; the token always comes from the CSPRNG.
template <Random64 Rng>
Challenge generate_challenge(const std::string& username, const PolicyConfig& policy, Rng& rng,
                             std::chrono::seconds ttl = kDefaultChallengeTtl, Clock::time_point now = Clock::now()) {
  Challenge challenge;
  challenge.token = new_challenge_token();
  challenge.username = username;
  challenge.per_set_order = shuffled_palettes(policy, rng);
  challenge.issued_at = now;
  challenge.expires_at = now + ttl;
  return challenge;
}

/// True when every set's order is a permutation of exactly that set's ids.
bool is_valid_layout(const Challenge& challenge, const PolicyConfig& policy);

enum class ConsumeError { unknown_token, expired, already_used, wrong_user };

std::string_view consume_error_name(ConsumeError error) noexcept;

/// Outstanding challenges. Issue and consume are atomic with respect to each
/// other; a token is consumed at most once.
class ChallengeBook {
 public:
  void issue(Challenge challenge);

  /// On success returns the challenge and marks its token used.
  std::pair<std::optional<Challenge>, std::optional<ConsumeError>> consume(const std::string& token,
                                                                           std::string_view username,
                                                                           Clock::time_point now = Clock::now());

  std::size_t outstanding() const;

  /// Forgets expired tokens, issued or used.
  void prune(Clock::time_point now);

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Challenge> live_;
  std::unordered_map<std::string, Clock::time_point> used_;  // token -> original expiry
};

}  // namespace picksort
