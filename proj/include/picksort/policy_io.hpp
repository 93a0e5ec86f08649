#pragma once

// JSON forms of the policy file and the placements wire format.

#include <filesystem>

#include <json.hpp>

#include "picksort/model.hpp"

namespace picksort {

/// Parses the policy document. Missing `rows`/`cols` fall back to a square
/// grid when grid_cells is a perfect square. Throws PolicyError.
PolicyConfig policy_from_json(const nlohmann::json& doc);
nlohmann::json policy_to_json(const PolicyConfig& policy);

/// Throws PolicyError naming the path when the file is missing or unreadable.
PolicyConfig load_policy(const std::filesystem::path& path);

HashParams hash_params_from_json(const nlohmann::json& doc);
nlohmann::json hash_params_to_json(const HashParams& params);

/// `[{cell, set_id, element_id}, ...]`. Throws std::invalid_argument on shape errors.
SecretConfiguration placements_from_json(const nlohmann::json& doc);
nlohmann::json placements_to_json(const SecretConfiguration& secret);

}  // namespace picksort
