#pragma once

// Append-only JSON-lines event log. One object per line:
//   {"v":1,"kind":"registered|challenge_issued|login_attempt","ts_ms":<int>,"payload":{...}}

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace picksort {

using Clock = std::chrono::system_clock;

inline constexpr int kEventLogVersion = 1;

enum class EventKind { registered, challenge_issued, login_attempt };

std::string_view event_kind_name(EventKind kind) noexcept;
std::optional<EventKind> event_kind_from_name(std::string_view name) noexcept;

struct EventRecord {
  EventKind kind = EventKind::registered;
  /// Millisecond precision, so replayed and live records compare equal.
  Clock::time_point timestamp;
  nlohmann::json payload = nlohmann::json::object();
};

std::int64_t to_millis(Clock::time_point t) noexcept;
Clock::time_point from_millis(std::int64_t ms) noexcept;

nlohmann::json event_to_json(const EventRecord& event);
/// Throws std::invalid_argument for unknown versions or kinds and
/// nlohmann::json::exception for structural problems.
EventRecord event_from_json(const nlohmann::json& doc);

struct LogReadResult {
  std::vector<EventRecord> events;
  std::size_t lines = 0;  // non-empty lines seen
  std::vector<std::string> warnings;

  std::size_t corrupt() const noexcept { return warnings.size(); }
};

/// Reads every parseable record; corrupt lines become warnings.
/// Throws std::runtime_error when the file cannot be opened.
LogReadResult read_event_log(const std::filesystem::path& path);

/// Single-writer appender with an in-memory copy of every record. An existing
/// file is replayed on open. Timestamps are clamped to be non-decreasing.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::filesystem::path file);

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  EventRecord append(EventKind kind, nlohmann::json payload, Clock::time_point now = Clock::now());

  std::vector<EventRecord> snapshot() const;
  std::size_t size() const;
  std::size_t replay_warnings() const noexcept { return replay_warnings_; }
  void flush();

 private:
  mutable std::mutex mutex_;
  std::vector<EventRecord> events_;
  std::optional<std::filesystem::path> file_;
  std::ofstream out_;
  std::size_t replay_warnings_ = 0;
};

}  // namespace picksort
