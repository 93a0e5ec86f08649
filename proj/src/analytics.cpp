#include "picksort/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace picksort {

SecretDistribution::SecretDistribution(std::span<const std::string> canonical_secrets) {
  for (const auto& s : canonical_secrets) add(s);
}

void SecretDistribution::add(const std::string& canonical, std::uint64_t count) {
  if (count == 0) return;
  counts_[canonical] += count;
  total_ += count;
}

std::vector<std::pair<std::string, std::uint64_t>> SecretDistribution::ranked() const {
  // counts_ is already ordered by canonical bytes, so a stable sort on count
  // keeps the byte order among ties.
  std::vector<std::pair<std::string, std::uint64_t>> ranking(counts_.begin(), counts_.end());
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranking;
}

double empirical_entropy(const SecretDistribution& dist) {
  if (dist.empty()) throw EmptyDistribution();
  // H = log2 N - (1/N) sum c log2 c
  const auto n = static_cast<double>(dist.total());
  double weighted = 0.0;
  for (const auto& [secret, count] : dist.counts()) {
    const auto c = static_cast<double>(count);
    weighted += c * std::log2(c);
  }
  return std::max(0.0, std::log2(n) - weighted / n);
}

double entropy_upper_bound(const SecretDistribution& dist) {
  if (dist.empty()) throw EmptyDistribution();
  return std::log2(static_cast<double>(dist.total()));
}

Guesswork expected_guesswork(const SecretDistribution& dist) {
  if (dist.empty()) throw EmptyDistribution();
  boost::multiprecision::cpp_int weighted = 0;
  std::uint64_t rank = 0;
  for (const auto& [secret, count] : dist.ranked()) {
    ++rank;
    weighted += boost::multiprecision::cpp_int(rank) * count;
  }
  Guesswork g;
  g.exact = Rational(weighted, dist.total());
  g.value = g.exact.convert_to<double>();
  return g;
}

std::size_t work_factor(const SecretDistribution& dist, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
  if (dist.empty()) throw EmptyDistribution();
  // Slack so that decimal alphas such as 0.1 are not nudged past an exact
  // boundary by their binary representation.
  constexpr double kSlack = 1e-12;
  const auto n = static_cast<double>(dist.total());
  std::uint64_t covered = 0;
  std::size_t guesses = 0;
  for (const auto& [secret, count] : dist.ranked()) {
    ++guesses;
    covered += count;
    if (static_cast<double>(covered) / n >= alpha - kSlack) return guesses;
  }
  return guesses;
}

std::string_view stage_name(Stage stage) noexcept {
  switch (stage) {
    case Stage::login1: return "login1";
    case Stage::login10: return "login10";
    case Stage::login28: return "login28";
    case Stage::other: return "other";
  }
  return "other";
}

Stage stage_from_name(std::string_view name) noexcept {
  if (name == "login1") return Stage::login1;
  if (name == "login10") return Stage::login10;
  if (name == "login28") return Stage::login28;
  return Stage::other;
}

Stage stage_for_elapsed(std::chrono::seconds since_registration) noexcept {
  if (since_registration.count() < 0) return Stage::other;
  switch (std::chrono::duration_cast<std::chrono::days>(since_registration).count()) {
    case 1: return Stage::login1;
    case 10: return Stage::login10;
    case 28: return Stage::login28;
    default: return Stage::other;
  }
}

std::map<std::string, double> success_rate(std::span<const AttemptRecord> attempts, Grouping grouping) {
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> tally;  // group -> (successes, total)
  for (const auto& a : attempts) {
    const std::string group = grouping == Grouping::per_user ? a.username : std::string(stage_name(a.stage));
    auto& [ok, total] = tally[group];
    ok += a.success ? 1 : 0;
    ++total;
  }
  std::map<std::string, double> rates;
  for (const auto& [group, counts] : tally) {
    rates.emplace(group, static_cast<double>(counts.first) / static_cast<double>(counts.second));
  }
  return rates;
}

double mean_user_success_rate(std::span<const AttemptRecord> attempts) {
  const auto per_user = success_rate(attempts, Grouping::per_user);
  if (per_user.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [user, rate] : per_user) sum += rate;
  return sum / static_cast<double>(per_user.size());
}

std::map<ElementKey, std::uint64_t> element_frequencies(std::span<const SecretConfiguration> secrets) {
  std::map<ElementKey, std::uint64_t> counts;
  for (const auto& secret : secrets) {
    for (const auto& p : secret.placements) ++counts[{p.set_id, p.element_id}];
  }
  return counts;
}

std::map<ElementPair, std::uint64_t> co_occurrences(std::span<const SecretConfiguration> secrets, bool per_user) {
  std::map<ElementPair, std::uint64_t> pairs;
  for (const auto& secret : secrets) {
    std::map<ElementKey, std::uint64_t> present;
    for (const auto& p : secret.placements) ++present[{p.set_id, p.element_id}];
    for (auto a = present.begin(); a != present.end(); ++a) {
      for (auto b = std::next(a); b != present.end(); ++b) {
        if (a->first.set_id != b->first.set_id) continue;
        pairs[{a->first, b->first}] += per_user ? 1 : a->second * b->second;
      }
    }
  }
  return pairs;
}

std::string_view pattern_name(PatternKind kind) noexcept {
  switch (kind) {
    case PatternKind::horizontal_line: return "horizontal_line";
    case PatternKind::l_shape: return "l_shape";
    case PatternKind::diagonal: return "diagonal";
    case PatternKind::square_2x2: return "square_2x2";
    case PatternKind::square_3x3: return "square_3x3";
    case PatternKind::undefined: return "undefined";
  }
  return "undefined";
}

PatternClass classify_pattern(std::span<const std::size_t> cells, std::size_t rows, std::size_t cols) {
  std::vector<std::vector<bool>> occupied(rows, std::vector<bool>(cols, false));
  for (auto cell : cells) {
    if (cell >= rows * cols) {
      throw std::out_of_range("cell " + std::to_string(cell) + " outside " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " grid");
    }
    occupied[cell / cols][cell % cols] = true;
  }
  auto at = [&](std::ptrdiff_t r, std::ptrdiff_t c) {
    return r >= 0 && c >= 0 && r < static_cast<std::ptrdiff_t>(rows) && c < static_cast<std::ptrdiff_t>(cols) &&
           occupied[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  };
  // Occupied cells continuing from (r, c) in direction (dr, dc), excluding (r, c).
  auto arm = [&](std::ptrdiff_t r, std::ptrdiff_t c, std::ptrdiff_t dr, std::ptrdiff_t dc) {
    std::size_t n = 0;
    while (at(r + dr * static_cast<std::ptrdiff_t>(n + 1), c + dc * static_cast<std::ptrdiff_t>(n + 1))) ++n;
    return n;
  };
  auto block = [&](std::ptrdiff_t r, std::ptrdiff_t c, std::ptrdiff_t side) {
    for (std::ptrdiff_t i = 0; i < side; ++i) {
      for (std::ptrdiff_t j = 0; j < side; ++j) {
        if (!at(r + i, c + j)) return false;
      }
    }
    return true;
  };

  PatternClass best;
  auto consider = [&](PatternKind kind, std::size_t size) {
    if (size < kMinPatternSize) return;
    // Enum order is the tie-break precedence.
    if (size > best.matched_size || (size == best.matched_size && kind < best.kind)) best = {kind, size};
  };

  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r) {
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(cols); ++c) {
      if (!at(r, c)) continue;
      if (!at(r, c - 1)) consider(PatternKind::horizontal_line, 1 + arm(r, c, 0, 1));
      if (!at(r - 1, c - 1)) consider(PatternKind::diagonal, 1 + arm(r, c, 1, 1));
      if (!at(r - 1, c + 1)) consider(PatternKind::diagonal, 1 + arm(r, c, 1, -1));

      const std::size_t horizontal = std::max(arm(r, c, 0, -1), arm(r, c, 0, 1));
      const std::size_t vertical = std::max(arm(r, c, -1, 0), arm(r, c, 1, 0));
      if (horizontal > 0 && vertical > 0) consider(PatternKind::l_shape, 1 + horizontal + vertical);

      if (block(r, c, 2)) consider(PatternKind::square_2x2, 4);
      if (block(r, c, 3)) consider(PatternKind::square_3x3, 9);
    }
  }
  return best;
}

}  // namespace picksort
