#pragma once

// The analytics report built from an event log, shared by the live
// /api/analytics endpoint and the offline `analyze` command so both produce
// the same bytes for the same log.

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "picksort/analytics.hpp"
#include "picksort/event_log.hpp"

namespace picksort {

inline constexpr int kReportVersion = 1;

struct ReportOptions {
  std::vector<double> alphas = {0.1, 0.2, 0.5};
  /// Co-occurrence pairs reported per set.
  std::size_t top_pairs = 5;
};

/// Secrets observed at registration, with the grid they were placed on.
struct ObservedSecret {
  std::string username;
  std::string canonical;
  SecretConfiguration secret;
  GridShape grid;
};

struct ReportInputs {
  std::vector<AttemptRecord> attempts;
  std::vector<ObservedSecret> secrets;
  std::size_t registrations = 0;
  /// Registrations that carried no canonical secret (study mode off).
  std::size_t registrations_without_secret = 0;
  std::vector<std::string> warnings;
};

ReportInputs collect_report_inputs(std::span<const EventRecord> events);

nlohmann::json build_report(const ReportInputs& inputs, const ReportOptions& options = {});
nlohmann::json build_report(std::span<const EventRecord> events, const ReportOptions& options = {});

/// The report serialization used on the wire and by `analyze --json`.
std::string report_to_string(const nlohmann::json& report);

/// Human-readable rendering for the terminal.
std::string report_to_text(const nlohmann::json& report);

/// CSV tables: element frequencies, top co-occurrences, pattern histogram.
std::string element_frequency_csv(const nlohmann::json& report);
std::string co_occurrence_csv(const nlohmann::json& report);
std::string pattern_csv(const nlohmann::json& report);

}  // namespace picksort
