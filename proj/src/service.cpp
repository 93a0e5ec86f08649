#include "picksort/service.hpp"

#include <cstdlib>
#include <fstream>

#include <sodium.h>

#include "picksort/combinatorics.hpp"
#include "picksort/policy_io.hpp"

namespace picksort {

using nlohmann::json;

namespace {

ApiResponse error(int status, std::string code, std::string message = {}) {
  json body = {{"error", std::move(code)}};
  if (!message.empty()) body["message"] = std::move(message);
  return {status, std::move(body)};
}

std::optional<std::string> string_field(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body.at(key).is_string()) return std::nullopt;
  return body.at(key).get<std::string>();
}

json violations_json(const std::vector<Violation>& violations) {
  json out = json::array();
  for (const auto& v : violations) {
    out.push_back({{"rule", rule_code(v.rule)}, {"message", rule_message(v.rule)}, {"detail", v.detail}});
  }
  return out;
}

bool constant_time_equal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

json build_config_body(const ServiceConfig& config, const PolicyConfig& policy) {
  SpaceConfig space{policy.grid_cells(), policy.set_sizes(), policy.k_min(), policy.k_max()};
  const auto result = total_space(space);

  json sets = json::array();
  for (const auto& s : policy.sets()) {
    json elements = json::array();
    for (const auto& e : s.elements()) {
      elements.push_back({{"element_id", e.element_id}, {"label", e.label}, {"render_hint", e.render_hint}});
    }
    sets.push_back({{"set_id", s.set_id()}, {"name", s.name()}, {"size", s.size()}, {"elements", std::move(elements)}});
  }
  return {{"grid", {{"rows", policy.grid().rows}, {"cols", policy.grid().cols}}},
          {"grid_cells", policy.grid_cells()},
          {"k_min", policy.k_min()},
          {"k_max", policy.k_max()},
          {"sets", std::move(sets)},
          {"password_space", result.total.str()},
          {"entropy_bits", result.entropy_bits},
          {"shuffle_registration", config.shuffle_registration},
          {"challenge_ttl_seconds", config.challenge_ttl.count()}};
}

}  // namespace

void ServiceConfig::validate() const {
  if (challenge_ttl.count() <= 0) throw ConfigError("challenge_ttl_seconds must be positive");
  if (rate_limit_per_minute < 1) throw ConfigError("rate_limit_per_minute must be at least 1");
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
}

ServiceConfig service_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("service config must be a JSON object");
  ServiceConfig config;
  try {
    config.bind_address = doc.value("bind_address", config.bind_address);
    config.port = doc.value("port", config.port);
    if (doc.contains("policy")) config.policy_path = resolve(base_dir, doc.at("policy").get<std::string>());
    if (doc.contains("data_dir")) config.data_dir = resolve(base_dir, doc.at("data_dir").get<std::string>());
    config.challenge_ttl = std::chrono::seconds(doc.value("challenge_ttl_seconds", config.challenge_ttl.count()));
    config.rate_limit_per_minute = doc.value("rate_limit_per_minute", config.rate_limit_per_minute);
    if (doc.contains("study_mode") && !doc.at("study_mode").is_null()) {
      config.study_mode = doc.at("study_mode").get<bool>();
    }
    config.admin_token = doc.value("admin_token", config.admin_token);
    config.cors_origin = doc.value("cors_origin", config.cors_origin);
    config.shuffle_registration = doc.value("shuffle_registration", config.shuffle_registration);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("service config: ") + e.what());
  }
  config.validate();
  return config;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  auto config = service_config_from_json(doc, path.parent_path());

  if (const char* v = std::getenv("PICKSORT_ADMIN_TOKEN")) config.admin_token = v;
  if (const char* v = std::getenv("PICKSORT_BIND")) config.bind_address = v;
  if (const char* v = std::getenv("PICKSORT_POLICY")) config.policy_path = v;
  if (const char* v = std::getenv("PICKSORT_DATA_DIR")) config.data_dir = v;
  if (const char* v = std::getenv("PICKSORT_STUDY_MODE")) {
    const std::string flag = v;
    config.study_mode = flag == "1" || flag == "true";
  }
  if (config.policy_path.empty()) throw ConfigError("config names no policy file");
  return config;
}

bool RateLimiter::allow(const std::string& key, Clock::time_point now) {
  const auto minute = std::chrono::duration_cast<std::chrono::minutes>(now.time_since_epoch()).count();
  std::lock_guard lock(mutex_);
  auto& [window, count] = windows_[key];
  if (window != minute) {
    window = minute;
    count = 0;
  }
  if (count >= per_minute_) return false;
  ++count;
  return true;
}

AuthService::AuthService(ServiceConfig config, PolicyConfig policy, ClockFn clock)
    : config_(std::move(config)),
      policy_(config_.study_mode ? policy.with_study_mode(*config_.study_mode) : std::move(policy)),
      clock_(std::move(clock)),
      limiter_(config_.rate_limit_per_minute) {
  config_.validate();
  check_hash_params(policy_.hash_params());
  if (config_.data_dir.empty()) {
    credentials_ = std::make_unique<CredentialStore>();
    events_ = std::make_unique<EventLog>();
  } else {
    std::filesystem::create_directories(config_.data_dir);
    credentials_ = std::make_unique<CredentialStore>(config_.data_dir / "credentials.jsonl");
    events_ = std::make_unique<EventLog>(config_.data_dir / "events.jsonl");
  }
  config_body_ = build_config_body(config_, policy_);
}

ApiResponse AuthService::register_user(const json& body) {
  const auto username = string_field(body, "username");
  if (!username || !is_valid_username(*username)) return error(400, "malformed_request", "username required");
  if (!body.contains("placements")) return error(400, "malformed_request", "placements required");

  SecretConfiguration secret;
  try {
    secret = placements_from_json(body.at("placements"));
  } catch (const std::exception& e) {
    return error(400, "malformed_request", e.what());
  }

  const auto now = clock_();
  StoredCredential credential;
  try {
    credential = credentials_->register_user(*username, secret, policy_, now);
  } catch (const InvalidSecret& e) {
    auto response = error(400, "invalid_secret");
    response.body["violations"] = violations_json(e.violations());
    return response;
  } catch (const DuplicateUser&) {
    return error(409, "duplicate_username");
  }

  json payload = {{"username", *username},
                  {"k", secret.size()},
                  {"rows", policy_.grid().rows},
                  {"cols", policy_.grid().cols}};
  if (credential.plaintext_canonical) payload["canonical"] = *credential.plaintext_canonical;
  events_->append(EventKind::registered, std::move(payload), now);
  return {201, nullptr};
}

ApiResponse AuthService::challenge(const json& body) {
  const auto username = string_field(body, "username");
  if (!username || !is_valid_username(*username)) return error(400, "malformed_request", "username required");

  const auto now = clock_();
  if (!limiter_.allow("challenge:" + *username, now)) return error(429, "rate_limited");
  challenges_.prune(now);

  auto issued = generate_challenge(*username, policy_, rng_, config_.challenge_ttl, now);
  json order = json::object();
  for (const auto& [set_id, ids] : issued.per_set_order) order[set_id] = ids;
  json response = {{"token", issued.token},
                   {"per_set_order", std::move(order)},
                   {"grid", {{"rows", policy_.grid().rows}, {"cols", policy_.grid().cols}}},
                   {"k_min", policy_.k_min()},
                   {"k_max", policy_.k_max()},
                   {"expires_in_seconds", config_.challenge_ttl.count()}};

  events_->append(EventKind::challenge_issued,
                  {{"username", *username}, {"token", issued.token}, {"expires_ms", to_millis(issued.expires_at)}},
                  now);
  challenges_.issue(std::move(issued));
  return {200, std::move(response)};
}

ApiResponse AuthService::login(const json& body) {
  const auto username = string_field(body, "username");
  const auto token = string_field(body, "token");
  if (!username || !token || !body.contains("placements")) {
    return error(400, "malformed_request", "username, token and placements required");
  }
  std::optional<double> client_duration;
  if (body.contains("client_duration_seconds") && !body.at("client_duration_seconds").is_null()) {
    const auto& d = body.at("client_duration_seconds");
    if (!d.is_number() || d.get<double>() < 0.0) {
      return error(400, "malformed_request", "client_duration_seconds must be a non-negative number");
    }
    client_duration = d.get<double>();
  }
  SecretConfiguration submitted;
  try {
    submitted = placements_from_json(body.at("placements"));
  } catch (const std::exception& e) {
    return error(400, "malformed_request", e.what());
  }

  const auto now = clock_();
  if (!limiter_.allow("login:" + *username, now)) return error(429, "rate_limited");

  auto [issued, failure] = challenges_.consume(*token, *username, now);
  if (!issued) return error(400, "invalid_token", std::string(consume_error_name(*failure)));

  const auto outcome = credentials_->verify(*username, submitted, policy_);

  Stage stage = Stage::other;
  if (auto stored = credentials_->find(*username)) {
    stage = stage_for_elapsed(std::chrono::duration_cast<std::chrono::seconds>(now - stored->created_at));
  }
  const auto elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - issued->issued_at).count();
  json payload = {{"username", *username},
                  {"token", *token},
                  {"success", outcome.accepted},
                  {"stage", stage_name(stage)},
                  {"server_duration_seconds", static_cast<double>(elapsed_ms) / 1000.0}};
  if (client_duration) payload["client_duration_seconds"] = *client_duration;
  if (outcome.failure_reason) payload["reason"] = failure_reason_name(*outcome.failure_reason);
  events_->append(EventKind::login_attempt, std::move(payload), now);

  return {200, {{"success", outcome.accepted}}};
}

ApiResponse AuthService::config() const { return {200, config_body_}; }

json AuthService::analytics_report() const {
  const auto events = events_->snapshot();
  return build_report(events);
}

ApiResponse AuthService::analytics(std::string_view authorization, bool secrets_requested) const {
  constexpr std::string_view kBearer = "Bearer ";
  if (config_.admin_token.empty() || !authorization.starts_with(kBearer) ||
      !constant_time_equal(authorization.substr(kBearer.size()), config_.admin_token)) {
    return error(401, "unauthorized");
  }
  if (secrets_requested && !policy_.study_mode()) {
    return error(409, "study_mode_disabled", "secret-derived metrics require study mode");
  }
  return {200, analytics_report()};
}

void AuthService::flush() { events_->flush(); }

}  // namespace picksort
