#include "picksort/policy_io.hpp"

#include <cmath>
#include <fstream>

namespace picksort {

using nlohmann::json;

namespace {

template <typename T>
T require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw PolicyError(std::string("policy: missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw PolicyError(std::string("policy: bad field '") + key + "': " + e.what());
  }
}

std::size_t integer_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

HashParams hash_params_from_json(const json& doc) {
  HashParams params;
  if (doc.is_null()) return params;
  if (!doc.is_object()) throw PolicyError("hash_params must be an object");
  params.memory_kib = doc.value("memory_kib", params.memory_kib);
  params.time_cost = doc.value("time_cost", params.time_cost);
  params.parallelism = doc.value("parallelism", params.parallelism);
  return params;
}

json hash_params_to_json(const HashParams& params) {
  return {{"memory_kib", params.memory_kib}, {"time_cost", params.time_cost}, {"parallelism", params.parallelism}};
}

PolicyConfig policy_from_json(const json& doc) {
  if (!doc.is_object()) throw PolicyError("policy document must be a JSON object");

  const auto cells = require<std::size_t>(doc, "grid_cells");
  GridShape grid;
  if (doc.contains("rows") || doc.contains("cols")) {
    grid.rows = require<std::size_t>(doc, "rows");
    grid.cols = require<std::size_t>(doc, "cols");
  } else {
    const auto side = integer_sqrt(cells);
    if (side * side != cells) {
      throw PolicyError("grid_cells " + std::to_string(cells) + " is not a square; give rows and cols");
    }
    grid = {side, side};
  }
  if (grid.cells() != cells) {
    throw PolicyError("rows * cols (" + std::to_string(grid.cells()) + ") != grid_cells (" +
                      std::to_string(cells) + ")");
  }

  std::vector<ElementSet> sets;
  const auto& sets_doc = doc.contains("sets") ? doc.at("sets") : json();
  if (!sets_doc.is_array()) throw PolicyError("policy: 'sets' must be an array");
  for (const auto& s : sets_doc) {
    auto set_id = require<std::string>(s, "set_id");
    std::vector<Element> elements;
    if (!s.contains("elements") || !s.at("elements").is_array()) {
      throw PolicyError("set '" + set_id + "': 'elements' must be an array");
    }
    for (const auto& e : s.at("elements")) {
      elements.push_back({require<std::string>(e, "element_id"), set_id, e.value("label", std::string{}),
                          e.value("render_hint", std::string{})});
    }
    sets.emplace_back(set_id, s.value("name", set_id), std::move(elements));
  }

  return PolicyConfig(grid, std::move(sets), require<std::size_t>(doc, "k_min"), require<std::size_t>(doc, "k_max"),
                      hash_params_from_json(doc.value("hash_params", json())), doc.value("study_mode", false));
}

json policy_to_json(const PolicyConfig& policy) {
  json sets = json::array();
  for (const auto& s : policy.sets()) {
    json elements = json::array();
    for (const auto& e : s.elements()) {
      elements.push_back({{"element_id", e.element_id}, {"label", e.label}, {"render_hint", e.render_hint}});
    }
    sets.push_back({{"set_id", s.set_id()}, {"name", s.name()}, {"elements", std::move(elements)}});
  }
  return {{"grid_cells", policy.grid_cells()},
          {"rows", policy.grid().rows},
          {"cols", policy.grid().cols},
          {"k_min", policy.k_min()},
          {"k_max", policy.k_max()},
          {"study_mode", policy.study_mode()},
          {"hash_params", hash_params_to_json(policy.hash_params())},
          {"sets", std::move(sets)}};
}

PolicyConfig load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PolicyError("cannot open policy file '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw PolicyError("policy file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return policy_from_json(doc);
}

SecretConfiguration placements_from_json(const json& doc) {
  if (!doc.is_array()) throw std::invalid_argument("placements must be an array");
  SecretConfiguration secret;
  secret.placements.reserve(doc.size());
  for (const auto& p : doc) {
    if (!p.is_object() || !p.contains("cell") || !p.contains("set_id") || !p.contains("element_id")) {
      throw std::invalid_argument("placement must be {cell, set_id, element_id}");
    }
    const auto& cell = p.at("cell");
    if (!cell.is_number_integer() || cell.get<std::int64_t>() < 0) {
      throw std::invalid_argument("placement cell must be a non-negative integer");
    }
    if (!p.at("set_id").is_string() || !p.at("element_id").is_string()) {
      throw std::invalid_argument("placement set_id and element_id must be strings");
    }
    secret.placements.push_back(
        {cell.get<std::size_t>(), p.at("set_id").get<std::string>(), p.at("element_id").get<std::string>()});
  }
  return secret;
}

json placements_to_json(const SecretConfiguration& secret) {
  json out = json::array();
  for (const auto& p : secret.placements) {
    out.push_back({{"cell", p.cell}, {"set_id", p.set_id}, {"element_id", p.element_id}});
  }
  return out;
}

}  // namespace picksort
