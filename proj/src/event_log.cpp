#include "picksort/event_log.hpp"

#include <iostream>
#include <stdexcept>

namespace picksort {

using nlohmann::json;

std::string_view event_kind_name(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::registered: return "registered";
    case EventKind::challenge_issued: return "challenge_issued";
    case EventKind::login_attempt: return "login_attempt";
  }
  return "unknown";
}

std::optional<EventKind> event_kind_from_name(std::string_view name) noexcept {
  if (name == "registered") return EventKind::registered;
  if (name == "challenge_issued") return EventKind::challenge_issued;
  if (name == "login_attempt") return EventKind::login_attempt;
  return std::nullopt;
}

std::int64_t to_millis(Clock::time_point t) noexcept {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

Clock::time_point from_millis(std::int64_t ms) noexcept {
  return Clock::time_point(std::chrono::duration_cast<Clock::duration>(std::chrono::milliseconds(ms)));
}

json event_to_json(const EventRecord& event) {
  return {{"v", kEventLogVersion},
          {"kind", event_kind_name(event.kind)},
          {"ts_ms", to_millis(event.timestamp)},
          {"payload", event.payload}};
}

EventRecord event_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("event is not an object");
  const int version = doc.at("v").get<int>();
  if (version != kEventLogVersion) throw std::invalid_argument("unsupported event version " + std::to_string(version));
  auto kind = event_kind_from_name(doc.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown event kind '" + doc.at("kind").get<std::string>() + "'");
  const auto& payload = doc.at("payload");
  if (!payload.is_object()) throw std::invalid_argument("event payload is not an object");
  return {*kind, from_millis(doc.at("ts_ms").get<std::int64_t>()), payload};
}

LogReadResult read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open event log '" + path.string() + "'");
  LogReadResult result;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.lines;
    try {
      result.events.push_back(event_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      result.warnings.push_back(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return result;
}

EventLog::EventLog(std::filesystem::path file) : file_(std::move(file)) {
  if (std::filesystem::exists(*file_)) {
    auto existing = read_event_log(*file_);
    for (const auto& w : existing.warnings) std::cerr << "picksort: skipping corrupt event: " << w << '\n';
    replay_warnings_ = existing.corrupt();
    events_ = std::move(existing.events);
  } else if (file_->has_parent_path()) {
    std::filesystem::create_directories(file_->parent_path());
  }
  out_.open(*file_, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open event log '" + file_->string() + "' for append");
}

EventRecord EventLog::append(EventKind kind, json payload, Clock::time_point now) {
  std::lock_guard lock(mutex_);
  auto ts = from_millis(to_millis(now));
  if (!events_.empty() && ts < events_.back().timestamp) ts = events_.back().timestamp;
  EventRecord record{kind, ts, std::move(payload)};
  if (file_) {
    out_ << event_to_json(record).dump() << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("failed writing event log '" + file_->string() + "'");
  }
  events_.push_back(record);
  return record;
}

std::vector<EventRecord> EventLog::snapshot() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::size_t EventLog::size() const {
  std::lock_guard lock(mutex_);
  return events_.size();
}

void EventLog::flush() {
  std::lock_guard lock(mutex_);
  if (out_.is_open()) out_.flush();
}

}  // namespace picksort
