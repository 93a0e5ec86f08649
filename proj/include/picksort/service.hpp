#pragma once

// Authentication service logic behind the JSON API. Transport-independent:
// each endpoint takes the parsed request and returns a status and body, so
// the HTTP binding in http_server.hpp stays a thin adapter.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "picksort/event_log.hpp"
#include "picksort/layout.hpp"
#include "picksort/model.hpp"
#include "picksort/random.hpp"
#include "picksort/report.hpp"
#include "picksort/secretstore.hpp"

namespace picksort {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServiceConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  std::filesystem::path policy_path;
  /// Empty means purely in-memory (nothing persisted).
  std::filesystem::path data_dir;
  std::chrono::seconds challenge_ttl = kDefaultChallengeTtl;
  /// Requests per username per minute, counted separately for challenge and login.
  std::uint32_t rate_limit_per_minute = 10;
  std::optional<bool> study_mode;
  /// Bearer token for /api/analytics; empty disables the endpoint.
  std::string admin_token;
  std::string cors_origin = "*";
  /// Lets clients shuffle palettes on the registration screen as well.
  bool shuffle_registration = true;

  /// Throws ConfigError.
  void validate() const;
};

/// Reads the service config JSON. Relative paths resolve against the config
/// file's directory. PICKSORT_ADMIN_TOKEN, PICKSORT_BIND, PICKSORT_POLICY,
/// PICKSORT_DATA_DIR and PICKSORT_STUDY_MODE override the file.
ServiceConfig load_service_config(const std::filesystem::path& path);
ServiceConfig service_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

struct ApiResponse {
  int status = 200;
  /// Null means an empty body.
  nlohmann::json body;
};

/// Fixed one-minute windows per key.
class RateLimiter {
 public:
  explicit RateLimiter(std::uint32_t per_minute) : per_minute_(per_minute) {}
  bool allow(const std::string& key, Clock::time_point now);

 private:
  std::uint32_t per_minute_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::pair<std::int64_t, std::uint32_t>> windows_;  // key -> (minute, count)
};

class AuthService {
 public:
  using ClockFn = std::function<Clock::time_point()>;

  AuthService(ServiceConfig config, PolicyConfig policy, ClockFn clock = [] { return Clock::now(); });

  AuthService(const AuthService&) = delete;
  AuthService& operator=(const AuthService&) = delete;

  ApiResponse register_user(const nlohmann::json& body);
  ApiResponse challenge(const nlohmann::json& body);
  ApiResponse login(const nlohmann::json& body);
  ApiResponse config() const;
  /// authorization is the raw Authorization header value.
  ApiResponse analytics(std::string_view authorization, bool secrets_requested = false) const;

  /// Current report from the in-memory event log.
  nlohmann::json analytics_report() const;

  const ServiceConfig& service_config() const noexcept { return config_; }
  const PolicyConfig& policy() const noexcept { return policy_; }
  const CredentialStore& credentials() const noexcept { return *credentials_; }
  const EventLog& events() const noexcept { return *events_; }
  void flush();

 private:
  ServiceConfig config_;
  PolicyConfig policy_;
  ClockFn clock_;
  std::unique_ptr<CredentialStore> credentials_;
  std::unique_ptr<EventLog> events_;
  ChallengeBook challenges_;
  RateLimiter limiter_;
  nlohmann::json config_body_;
  SecureRandom rng_;
};

}  // namespace picksort
