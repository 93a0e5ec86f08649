#pragma once

// Metrics over observed secrets and login attempts: success rates, element
// and co-occurrence counts, arrangement patterns, empirical entropy,
// expected guesswork and the alpha-work factor.

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "picksort/model.hpp"

namespace picksort {

using Clock = std::chrono::system_clock;
using Rational = boost::multiprecision::cpp_rational;

class EmptyDistribution : public std::invalid_argument {
 public:
  EmptyDistribution() : std::invalid_argument("secret distribution is empty") {}
};

/// Multiset of canonical secrets.
class SecretDistribution {
 public:
  SecretDistribution() = default;
  explicit SecretDistribution(std::span<const std::string> canonical_secrets);

  void add(const std::string& canonical, std::uint64_t count = 1);

  const std::map<std::string, std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }
  std::size_t distinct() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return total_ == 0; }

  /// Distinct secrets by descending count; ties by ascending canonical bytes.
  std::vector<std::pair<std::string, std::uint64_t>> ranked() const;

 private:
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// -sum p_i log2 p_i. Throws EmptyDistribution.
double empirical_entropy(const SecretDistribution& dist);

/// log2 of the sample size. Throws EmptyDistribution.
double entropy_upper_bound(const SecretDistribution& dist);

struct Guesswork {
  Rational exact;
  double value = 0.0;
};

/// sum of rank * p over the descending-count ranking. Throws EmptyDistribution.
Guesswork expected_guesswork(const SecretDistribution& dist);

/// Fewest top-ranked guesses whose cumulative probability reaches alpha.
/// Throws std::invalid_argument for alpha outside (0, 1] and EmptyDistribution.
std::size_t work_factor(const SecretDistribution& dist, double alpha);

enum class Stage { login1, login10, login28, other };

std::string_view stage_name(Stage stage) noexcept;
/// Unrecognized names map to Stage::other.
Stage stage_from_name(std::string_view name) noexcept;
/// Whole days since registration: 1, 10 and 28 are the study stages.
Stage stage_for_elapsed(std::chrono::seconds since_registration) noexcept;

struct AttemptRecord {
  std::string username;
  Clock::time_point timestamp;
  Stage stage = Stage::other;
  bool success = false;
  double duration_seconds = 0.0;
};

enum class Grouping { per_user, per_stage };

/// successes / attempts per group; groups without attempts are absent.
std::map<std::string, double> success_rate(std::span<const AttemptRecord> attempts, Grouping grouping);

/// Mean over users of each user's own success rate.
double mean_user_success_rate(std::span<const AttemptRecord> attempts);

struct ElementKey {
  std::string set_id;
  std::string element_id;

  friend auto operator<=>(const ElementKey&, const ElementKey&) = default;
};

/// Unordered pair stored with first < second.
using ElementPair = std::pair<ElementKey, ElementKey>;

/// Every placement counts, so an element in two cells counts twice.
std::map<ElementKey, std::uint64_t> element_frequencies(std::span<const SecretConfiguration> secrets);

/// Pairs of distinct elements from the same set appearing in one secret.
/// per_user: a secret adds at most 1 per pair; otherwise it adds the
/// product of the two elements' placement counts.
std::map<ElementPair, std::uint64_t> co_occurrences(std::span<const SecretConfiguration> secrets, bool per_user);

enum class PatternKind { horizontal_line, l_shape, diagonal, square_2x2, square_3x3, undefined };

std::string_view pattern_name(PatternKind kind) noexcept;

struct PatternClass {
  PatternKind kind = PatternKind::undefined;
  std::size_t matched_size = 0;

  friend bool operator==(const PatternClass&, const PatternClass&) = default;
};

inline constexpr std::size_t kMinPatternSize = 3;

/// Largest arrangement template contained in the occupied cells (row-major
/// indices). Templates are horizontal runs, L-shapes (a horizontal and a
/// vertical arm of length >= 2 sharing their end cell), diagonal runs, and
/// filled 2x2 and 3x3 blocks; equal sizes prefer them in that order.
/// Throws std::out_of_range for cells outside the grid.
PatternClass classify_pattern(std::span<const std::size_t> cells, std::size_t rows, std::size_t cols);

}  // namespace picksort
