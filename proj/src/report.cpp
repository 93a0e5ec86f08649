#include "picksort/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

namespace picksort {

using nlohmann::json;

namespace {

constexpr std::array kAllPatterns = {PatternKind::horizontal_line, PatternKind::l_shape, PatternKind::diagonal,
                                     PatternKind::square_2x2, PatternKind::square_3x3, PatternKind::undefined};

json attempts_section(const std::vector<AttemptRecord>& attempts) {
  json section = {{"status", attempts.empty() ? "no_data" : "ok"},
                  {"total", attempts.size()},
                  {"successes", 0},
                  {"overall_rate", 0.0},
                  {"mean_user_rate", 0.0},
                  {"per_stage", json::object()}};
  if (attempts.empty()) return section;

  const auto successes = std::count_if(attempts.begin(), attempts.end(), [](const auto& a) { return a.success; });
  section["successes"] = successes;
  section["overall_rate"] = static_cast<double>(successes) / static_cast<double>(attempts.size());
  section["mean_user_rate"] = mean_user_success_rate(attempts);

  std::map<std::string, std::vector<AttemptRecord>> by_stage;
  for (const auto& a : attempts) by_stage[std::string(stage_name(a.stage))].push_back(a);
  const auto rates = success_rate(attempts, Grouping::per_stage);
  for (const auto& [stage, group] : by_stage) {
    double duration = 0.0;
    std::size_t ok = 0;
    for (const auto& a : group) {
      duration += a.duration_seconds;
      ok += a.success ? 1 : 0;
    }
    section["per_stage"][stage] = {{"attempts", group.size()},
                                   {"successes", ok},
                                   {"rate", rates.at(stage)},
                                   {"mean_user_rate", mean_user_success_rate(group)},
                                   {"mean_duration_seconds", duration / static_cast<double>(group.size())}};
  }
  return section;
}

json empty_secrets_section(const char* status) {
  json patterns = json::object();
  for (auto kind : kAllPatterns) patterns[std::string(pattern_name(kind))] = 0;
  return {{"status", status},
          {"count", 0},
          {"distinct", 0},
          {"empirical_entropy_bits", 0.0},
          {"entropy_upper_bound_bits", 0.0},
          {"expected_guesswork", {{"numerator", "0"}, {"denominator", "1"}, {"value", 0.0}}},
          {"work_factor", json::array()},
          {"element_frequencies", json::array()},
          {"co_occurrences", json::object()},
          {"patterns", std::move(patterns)}};
}

json secrets_section(const ReportInputs& inputs, const ReportOptions& options) {
  if (inputs.registrations_without_secret > 0) {
    return {{"status", "study_mode_disabled"},
            {"code", 409},
            {"message", "secret-derived metrics require study mode"}};
  }
  if (inputs.secrets.empty()) return empty_secrets_section("no_data");

  json section = empty_secrets_section("ok");
  std::vector<std::string> canonicals;
  std::vector<SecretConfiguration> secrets;
  for (const auto& s : inputs.secrets) {
    canonicals.push_back(s.canonical);
    secrets.push_back(s.secret);
  }
  const SecretDistribution dist(canonicals);
  const double entropy = empirical_entropy(dist);
  const double bound = entropy_upper_bound(dist);
  const auto guesswork = expected_guesswork(dist);

  section["count"] = dist.total();
  section["distinct"] = dist.distinct();
  section["empirical_entropy_bits"] = entropy;
  section["entropy_upper_bound_bits"] = bound;
  section["entropy_ratio"] = bound > 0.0 ? entropy / bound : 1.0;
  section["expected_guesswork"] = {{"numerator", numerator(guesswork.exact).str()},
                                   {"denominator", denominator(guesswork.exact).str()},
                                   {"value", guesswork.value}};
  for (double alpha : options.alphas) {
    section["work_factor"].push_back({{"alpha", alpha}, {"guesses", work_factor(dist, alpha)}});
  }

  std::vector<std::pair<ElementKey, std::uint64_t>> freq;
  for (const auto& entry : element_frequencies(secrets)) freq.push_back(entry);
  std::stable_sort(freq.begin(), freq.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [key, count] : freq) {
    section["element_frequencies"].push_back(
        {{"set_id", key.set_id}, {"element_id", key.element_id}, {"count", count}});
  }

  std::map<std::string, std::vector<std::pair<ElementPair, std::uint64_t>>> pairs_by_set;
  for (const auto& entry : co_occurrences(secrets, true)) pairs_by_set[entry.first.first.set_id].push_back(entry);
  for (auto& [set_id, pairs] : pairs_by_set) {
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    json top = json::array();
    for (std::size_t i = 0; i < pairs.size() && i < options.top_pairs; ++i) {
      top.push_back({{"a", pairs[i].first.first.element_id},
                     {"b", pairs[i].first.second.element_id},
                     {"users", pairs[i].second}});
    }
    section["co_occurrences"][set_id] = std::move(top);
  }

  for (const auto& s : inputs.secrets) {
    std::vector<std::size_t> cells;
    for (const auto& p : s.secret.placements) cells.push_back(p.cell);
    const auto pattern = classify_pattern(cells, s.grid.rows, s.grid.cols);
    auto& slot = section["patterns"][std::string(pattern_name(pattern.kind))];
    slot = slot.get<std::uint64_t>() + 1;
  }
  return section;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

ReportInputs collect_report_inputs(std::span<const EventRecord> events) {
  ReportInputs inputs;
  for (const auto& event : events) {
    const auto& p = event.payload;
    try {
      if (event.kind == EventKind::registered) {
        ++inputs.registrations;
        if (!p.contains("canonical")) {
          ++inputs.registrations_without_secret;
          continue;
        }
        ObservedSecret observed;
        observed.username = p.at("username").get<std::string>();
        observed.canonical = p.at("canonical").get<std::string>();
        observed.secret = parse_canonical(observed.canonical);
        observed.grid = {p.at("rows").get<std::size_t>(), p.at("cols").get<std::size_t>()};
        inputs.secrets.push_back(std::move(observed));
      } else if (event.kind == EventKind::login_attempt) {
        AttemptRecord a;
        a.username = p.at("username").get<std::string>();
        a.timestamp = event.timestamp;
        a.stage = stage_from_name(p.value("stage", std::string("other")));
        a.success = p.at("success").get<bool>();
        a.duration_seconds = p.value("server_duration_seconds", 0.0);
        inputs.attempts.push_back(std::move(a));
      }
    } catch (const std::exception& e) {
      inputs.warnings.push_back(std::string(event_kind_name(event.kind)) + " event skipped: " + e.what());
    }
  }
  return inputs;
}

json build_report(const ReportInputs& inputs, const ReportOptions& options) {
  return {{"v", kReportVersion},
          {"attempts", attempts_section(inputs.attempts)},
          {"secrets", secrets_section(inputs, options)}};
}

json build_report(std::span<const EventRecord> events, const ReportOptions& options) {
  return build_report(collect_report_inputs(events), options);
}

std::string report_to_string(const json& report) { return report.dump(2) + "\n"; }

std::string report_to_text(const json& report) {
  std::ostringstream out;
  const auto& attempts = report.at("attempts");
  out << "Login attempts\n";
  if (attempts.at("status") == "no_data") {
    out << "  no data\n";
  } else {
    out << "  total " << attempts.at("total").get<std::size_t>() << ", successes "
        << attempts.at("successes").get<std::size_t>() << ", rate "
        << fixed(attempts.at("overall_rate").get<double>(), 4) << ", mean per-user rate "
        << fixed(attempts.at("mean_user_rate").get<double>(), 4) << "\n";
    for (const auto& [stage, s] : attempts.at("per_stage").items()) {
      out << "  " << stage << ": " << s.at("successes").get<std::size_t>() << "/"
          << s.at("attempts").get<std::size_t>() << " rate " << fixed(s.at("rate").get<double>(), 4)
          << ", mean per-user rate " << fixed(s.at("mean_user_rate").get<double>(), 4) << "\n";
    }
  }

  const auto& secrets = report.at("secrets");
  out << "Secrets\n";
  const auto status = secrets.at("status").get<std::string>();
  if (status == "study_mode_disabled") {
    out << "  unavailable: " << secrets.at("message").get<std::string>() << "\n";
    return out.str();
  }
  if (status == "no_data") {
    out << "  no data\n";
    return out.str();
  }
  const auto& eg = secrets.at("expected_guesswork");
  out << "  count " << secrets.at("count").get<std::size_t>() << ", distinct "
      << secrets.at("distinct").get<std::size_t>() << "\n"
      << "  empirical entropy " << fixed(secrets.at("empirical_entropy_bits").get<double>(), 4) << " bits (bound "
      << fixed(secrets.at("entropy_upper_bound_bits").get<double>(), 4) << ")\n"
      << "  expected guesswork " << eg.at("numerator").get<std::string>() << "/"
      << eg.at("denominator").get<std::string>() << " = " << fixed(eg.at("value").get<double>(), 2) << "\n";
  for (const auto& w : secrets.at("work_factor")) {
    out << "  W(" << w.at("alpha").get<double>() << ") = " << w.at("guesses").get<std::size_t>() << "\n";
  }
  out << "  top elements:";
  std::size_t shown = 0;
  for (const auto& f : secrets.at("element_frequencies")) {
    if (shown++ == 10) break;
    out << " " << f.at("element_id").get<std::string>() << "=" << f.at("count").get<std::uint64_t>();
  }
  out << "\n  patterns:";
  for (const auto& [name, count] : secrets.at("patterns").items()) out << " " << name << "=" << count.get<std::uint64_t>();
  out << "\n";
  return out.str();
}

std::string element_frequency_csv(const json& report) {
  std::string csv = "element_type,element,frequency\n";
  const auto& secrets = report.at("secrets");
  if (!secrets.contains("element_frequencies")) return csv;
  for (const auto& f : secrets.at("element_frequencies")) {
    csv += csv_field(f.at("set_id").get<std::string>()) + "," + csv_field(f.at("element_id").get<std::string>()) +
           "," + std::to_string(f.at("count").get<std::uint64_t>()) + "\n";
  }
  return csv;
}

std::string co_occurrence_csv(const json& report) {
  std::string csv = "type,co_occurring_elements,frequency_users\n";
  const auto& secrets = report.at("secrets");
  if (!secrets.contains("co_occurrences")) return csv;
  for (const auto& [set_id, pairs] : secrets.at("co_occurrences").items()) {
    for (const auto& pair : pairs) {
      csv += csv_field(set_id) + "," +
             csv_field(pair.at("a").get<std::string>() + " -- " + pair.at("b").get<std::string>()) + "," +
             std::to_string(pair.at("users").get<std::uint64_t>()) + "\n";
    }
  }
  return csv;
}

std::string pattern_csv(const json& report) {
  std::string csv = "pattern_type,frequency\n";
  const auto& secrets = report.at("secrets");
  if (!secrets.contains("patterns")) return csv;
  std::uint64_t total = 0;
  for (auto kind : kAllPatterns) {
    const auto count = secrets.at("patterns").at(std::string(pattern_name(kind))).get<std::uint64_t>();
    total += count;
    csv += std::string(pattern_name(kind)) + "," + std::to_string(count) + "\n";
  }
  csv += "total," + std::to_string(total) + "\n";
  return csv;
}

}  // namespace picksort
