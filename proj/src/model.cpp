#include "picksort/model.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <unordered_set>

namespace picksort {

bool is_valid_identifier(std::string_view id) noexcept {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

ElementSet::ElementSet(std::string set_id, std::string name, std::vector<Element> elements)
    : set_id_(std::move(set_id)), name_(std::move(name)), elements_(std::move(elements)) {
  if (!is_valid_identifier(set_id_)) {
    throw PolicyError("invalid set_id '" + set_id_ + "': identifiers must match [a-z0-9_-]+");
  }
  if (elements_.empty()) {
    throw PolicyError("element set '" + set_id_ + "' is empty");
  }
  std::unordered_set<std::string> seen;
  for (auto& e : elements_) {
    if (e.set_id.empty()) e.set_id = set_id_;
    if (e.set_id != set_id_) {
      throw PolicyError("element '" + e.element_id + "' claims set '" + e.set_id +
                        "' but belongs to '" + set_id_ + "'");
    }
    if (!is_valid_identifier(e.element_id)) {
      throw PolicyError("invalid element_id '" + e.element_id + "' in set '" + set_id_ + "'");
    }
    if (!seen.insert(e.element_id).second) {
      throw PolicyError("duplicate element_id '" + e.element_id + "' in set '" + set_id_ + "'");
    }
  }
}

const Element* ElementSet::find(std::string_view element_id) const noexcept {
  auto it = std::find_if(elements_.begin(), elements_.end(),
                         [&](const Element& e) { return e.element_id == element_id; });
  return it == elements_.end() ? nullptr : &*it;
}

PolicyConfig::PolicyConfig(GridShape grid, std::vector<ElementSet> sets, std::size_t k_min,
                           std::size_t k_max, HashParams hash_params, bool study_mode)
    : grid_(grid),
      sets_(std::move(sets)),
      k_min_(k_min),
      k_max_(k_max),
      hash_params_(hash_params),
      study_mode_(study_mode) {
  if (grid_.rows == 0 || grid_.cols == 0) throw PolicyError("grid must have at least one cell");
  if (sets_.empty()) throw PolicyError("policy needs at least one element set");
  std::unordered_set<std::string> ids;
  for (const auto& s : sets_) {
    if (!ids.insert(s.set_id()).second) throw PolicyError("duplicate set_id '" + s.set_id() + "'");
  }
  const std::size_t m = sets_.size();
  if (k_min_ < m) {
    throw PolicyError("k_min (" + std::to_string(k_min_) + ") must be at least the number of sets (" +
                      std::to_string(m) + ")");
  }
  if (k_min_ > k_max_) throw PolicyError("k_min must not exceed k_max");
  if (k_max_ > grid_cells()) throw PolicyError("k_max must not exceed grid_cells");
}

std::size_t PolicyConfig::total_elements() const noexcept {
  std::size_t total = 0;
  for (const auto& s : sets_) total += s.size();
  return total;
}

std::vector<std::size_t> PolicyConfig::set_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(sets_.size());
  for (const auto& s : sets_) sizes.push_back(s.size());
  return sizes;
}

const ElementSet* PolicyConfig::find_set(std::string_view set_id) const noexcept {
  auto it = std::find_if(sets_.begin(), sets_.end(),
                         [&](const ElementSet& s) { return s.set_id() == set_id; });
  return it == sets_.end() ? nullptr : &*it;
}

bool PolicyConfig::has_element(std::string_view set_id, std::string_view element_id) const noexcept {
  const auto* set = find_set(set_id);
  return set != nullptr && set->contains(element_id);
}

PolicyConfig PolicyConfig::with_study_mode(bool study_mode) const {
  PolicyConfig copy = *this;
  copy.study_mode_ = study_mode;
  return copy;
}

PolicyConfig PolicyConfig::with_hash_params(HashParams params) const {
  PolicyConfig copy = *this;
  copy.hash_params_ = params;
  return copy;
}

std::string_view rule_code(Rule rule) noexcept {
  switch (rule) {
    case Rule::duplicate_cell: return "duplicate_cell";
    case Rule::cell_out_of_range: return "cell_out_of_range";
    case Rule::unknown_element: return "unknown_element";
    case Rule::k_below_min: return "k_below_k_min";
    case Rule::k_above_max: return "k_above_k_max";
    case Rule::missing_set_coverage: return "missing_set_coverage";
  }
  return "unknown";
}

std::string_view rule_message(Rule rule) noexcept {
  switch (rule) {
    case Rule::duplicate_cell: return "duplicate cell";
    case Rule::cell_out_of_range: return "cell out of range";
    case Rule::unknown_element: return "unknown element";
    case Rule::k_below_min: return "k below k_min";
    case Rule::k_above_max: return "k above k_max";
    case Rule::missing_set_coverage: return "missing set coverage";
  }
  return "unknown";
}

bool ValidationResult::has(Rule rule) const noexcept { return count(rule) > 0; }

std::size_t ValidationResult::count(Rule rule) const noexcept {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [rule](const Violation& v) { return v.rule == rule; }));
}

ValidationResult validate_secret(const SecretConfiguration& secret, const PolicyConfig& policy) {
  ValidationResult result;
  auto add = [&](Rule rule, std::string detail) { result.violations.push_back({rule, std::move(detail)}); };

  std::map<std::size_t, std::size_t> cell_uses;
  for (const auto& p : secret.placements) ++cell_uses[p.cell];
  for (const auto& [cell, uses] : cell_uses) {
    if (uses > 1) add(Rule::duplicate_cell, "cell " + std::to_string(cell) + " used " + std::to_string(uses) + " times");
  }

  std::set<std::string_view> covered;
  for (const auto& p : secret.placements) {
    if (p.cell >= policy.grid_cells()) {
      add(Rule::cell_out_of_range,
          "cell " + std::to_string(p.cell) + " outside [0, " + std::to_string(policy.grid_cells()) + ")");
    }
    if (policy.has_element(p.set_id, p.element_id)) {
      covered.insert(p.set_id);
    } else {
      add(Rule::unknown_element, p.set_id + ":" + p.element_id);
    }
  }

  const std::size_t k = secret.size();
  if (k < policy.k_min()) {
    add(Rule::k_below_min, std::to_string(k) + " < " + std::to_string(policy.k_min()));
  }
  if (k > policy.k_max()) {
    add(Rule::k_above_max, std::to_string(k) + " > " + std::to_string(policy.k_max()));
  }
  for (const auto& set : policy.sets()) {
    if (!covered.contains(set.set_id())) add(Rule::missing_set_coverage, set.set_id());
  }
  return result;
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::string out = "invalid secret:";
  for (const auto& v : violations) {
    out += ' ';
    out += rule_message(v.rule);
    if (!v.detail.empty()) out += " (" + v.detail + ")";
    out += ';';
  }
  return out;
}

}  // namespace

InvalidSecret::InvalidSecret(std::vector<Violation> violations)
    : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

std::string canonicalize(const SecretConfiguration& secret) {
  if (secret.placements.empty()) throw InvalidSecret("cannot canonicalize an empty secret");

  std::vector<const Placement*> sorted;
  sorted.reserve(secret.size());
  for (const auto& p : secret.placements) {
    if (!is_valid_identifier(p.set_id) || !is_valid_identifier(p.element_id)) {
      throw InvalidSecret("identifier outside [a-z0-9_-]: '" + p.set_id + "', '" + p.element_id + "'");
    }
    sorted.push_back(&p);
  }
  std::sort(sorted.begin(), sorted.end(), [](const Placement* a, const Placement* b) { return a->cell < b->cell; });

  std::string out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0) {
      if (sorted[i]->cell == sorted[i - 1]->cell) {
        throw InvalidSecret("duplicate cell " + std::to_string(sorted[i]->cell));
      }
      out += ';';
    }
    out += std::to_string(sorted[i]->cell);
    out += ':';
    out += sorted[i]->set_id;
    out += ':';
    out += sorted[i]->element_id;
  }
  return out;
}

std::string canonicalize(const SecretConfiguration& secret, const PolicyConfig& policy) {
  auto result = validate_secret(secret, policy);
  if (!result) throw InvalidSecret(std::move(result.violations));
  return canonicalize(secret);
}

SecretConfiguration parse_canonical(std::string_view canonical) {
  SecretConfiguration secret;
  if (canonical.empty()) throw InvalidSecret("empty canonical secret");

  std::size_t pos = 0;
  while (pos <= canonical.size()) {
    std::size_t end = canonical.find(';', pos);
    if (end == std::string_view::npos) end = canonical.size();
    std::string_view record = canonical.substr(pos, end - pos);

    const auto c1 = record.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : record.find(':', c1 + 1);
    if (c2 == std::string_view::npos || record.find(':', c2 + 1) != std::string_view::npos) {
      throw InvalidSecret("malformed canonical record '" + std::string(record) + "'");
    }
    std::string_view cell_text = record.substr(0, c1);
    Placement p;
    auto [ptr, ec] = std::from_chars(cell_text.data(), cell_text.data() + cell_text.size(), p.cell);
    if (ec != std::errc{} || ptr != cell_text.data() + cell_text.size() || cell_text.empty() ||
        (cell_text.size() > 1 && cell_text.front() == '0')) {
      throw InvalidSecret("malformed cell index '" + std::string(cell_text) + "'");
    }
    p.set_id = std::string(record.substr(c1 + 1, c2 - c1 - 1));
    p.element_id = std::string(record.substr(c2 + 1));
    if (!is_valid_identifier(p.set_id) || !is_valid_identifier(p.element_id)) {
      throw InvalidSecret("malformed identifiers in '" + std::string(record) + "'");
    }
    if (!secret.placements.empty() && secret.placements.back().cell >= p.cell) {
      throw InvalidSecret("canonical cells must be strictly ascending");
    }
    secret.placements.push_back(std::move(p));
    pos = end + 1;
  }
  return secret;
}

}  // namespace picksort
