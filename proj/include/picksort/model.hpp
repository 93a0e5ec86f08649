#pragma once

// Domain types shared by every module: element sets, the policy, placements
// and secrets, plus secret validation and the canonical byte encoding.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace picksort {

/// Thrown when a policy or element set violates its construction invariants.
class PolicyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Identifiers are restricted to [a-z0-9_-] and must be non-empty.
bool is_valid_identifier(std::string_view id) noexcept;

struct Element {
  std::string element_id;
  std::string set_id;
  std::string label;
  std::string render_hint;
};

class ElementSet {
 public:
  /// Elements with an empty set_id are adopted; a mismatching set_id,
  /// a bad identifier or a duplicate element_id throws PolicyError.
  ElementSet(std::string set_id, std::string name, std::vector<Element> elements);

  const std::string& set_id() const noexcept { return set_id_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }

  const Element* find(std::string_view element_id) const noexcept;
  bool contains(std::string_view element_id) const noexcept { return find(element_id) != nullptr; }

 private:
  std::string set_id_;
  std::string name_;
  std::vector<Element> elements_;
};

/// Argon2id cost parameters. memory_kib is in KiB.
struct HashParams {
  std::uint64_t memory_kib = 65536;
  std::uint32_t time_cost = 3;
  std::uint32_t parallelism = 1;

  friend bool operator==(const HashParams&, const HashParams&) = default;
};

struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t cells() const noexcept { return rows * cols; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

class PolicyConfig {
 public:
  PolicyConfig(GridShape grid, std::vector<ElementSet> sets, std::size_t k_min, std::size_t k_max,
               HashParams hash_params = {}, bool study_mode = false);

  std::size_t grid_cells() const noexcept { return grid_.cells(); }
  const GridShape& grid() const noexcept { return grid_; }
  const std::vector<ElementSet>& sets() const noexcept { return sets_; }
  std::size_t k_min() const noexcept { return k_min_; }
  std::size_t k_max() const noexcept { return k_max_; }
  const HashParams& hash_params() const noexcept { return hash_params_; }
  bool study_mode() const noexcept { return study_mode_; }

  /// S, the size of the whole element pool.
  std::size_t total_elements() const noexcept;
  std::vector<std::size_t> set_sizes() const;

  const ElementSet* find_set(std::string_view set_id) const noexcept;
  bool has_element(std::string_view set_id, std::string_view element_id) const noexcept;

  PolicyConfig with_study_mode(bool study_mode) const;
  PolicyConfig with_hash_params(HashParams params) const;

 private:
  GridShape grid_;
  std::vector<ElementSet> sets_;
  std::size_t k_min_;
  std::size_t k_max_;
  HashParams hash_params_;
  bool study_mode_;
};

struct Placement {
  std::size_t cell = 0;
  std::string set_id;
  std::string element_id;

  friend auto operator<=>(const Placement&, const Placement&) = default;
};

/// A user's secret. Entry order of placements carries no meaning.
struct SecretConfiguration {
  std::vector<Placement> placements;

  std::size_t size() const noexcept { return placements.size(); }
};

enum class Rule {
  duplicate_cell,
  cell_out_of_range,
  unknown_element,
  k_below_min,
  k_above_max,
  missing_set_coverage,
};

/// Stable machine-readable code, e.g. "k_above_k_max".
std::string_view rule_code(Rule rule) noexcept;
/// Human-readable form, e.g. "k above k_max".
std::string_view rule_message(Rule rule) noexcept;

struct Violation {
  Rule rule;
  std::string detail;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  explicit operator bool() const noexcept { return ok(); }
  bool has(Rule rule) const noexcept;
  std::size_t count(Rule rule) const noexcept;
};

/// Checks every secret rule against the policy and reports all violations.
ValidationResult validate_secret(const SecretConfiguration& secret, const PolicyConfig& policy);

class InvalidSecret : public std::invalid_argument {
 public:
  explicit InvalidSecret(std::vector<Violation> violations);
  InvalidSecret(const std::string& what) : std::invalid_argument(what) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Canonical encoding: placements sorted by cell, each `<cell>:<set_id>:<element_id>`,
/// joined by `;`. Throws InvalidSecret on an empty secret, duplicate cells or
/// identifiers outside the canonical alphabet.
std::string canonicalize(const SecretConfiguration& secret);

/// Validates against the policy first; throws InvalidSecret carrying every violation.
std::string canonicalize(const SecretConfiguration& secret, const PolicyConfig& policy);

/// Inverse of canonicalize. Throws InvalidSecret on malformed input.
SecretConfiguration parse_canonical(std::string_view canonical);

}  // namespace picksort
