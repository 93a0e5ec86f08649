// picksort: run the authentication service, compute password spaces, and
// analyze event logs offline.
//
// Exit codes: 0 success, 1 generic failure, 2 configuration or usage error,
// 3 bind error.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>

#include "picksort/combinatorics.hpp"
#include "picksort/http_server.hpp"
#include "picksort/policy_io.hpp"
#include "picksort/report.hpp"
#include "picksort/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGeneric = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBind = 3;

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw picksort::SpaceConfigError("bad set size '" + item + "'");
    }
    if (used != item.size() || value <= 0) throw picksort::SpaceConfigError("bad set size '" + item + "'");
    sizes.push_back(static_cast<std::size_t>(value));
  }
  if (sizes.empty()) throw picksort::SpaceConfigError("--sets needs at least one size");
  return sizes;
}

std::string four_decimals(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

int run_entropy(std::size_t cells, const std::string& sets, std::size_t kmin, std::size_t kmax, bool as_json) {
  picksort::SpaceConfig config;
  try {
    config = {cells, parse_sizes(sets), kmin, kmax};
    config.validate();
  } catch (const picksort::SpaceConfigError& e) {
    std::cerr << "picksort entropy: " << e.what() << "\n";
    return kExitConfig;
  }
  const auto result = picksort::total_space(config);

  if (as_json) {
    nlohmann::json per_k = nlohmann::json::object();
    for (const auto& [k, n_k] : result.per_k) per_k[std::to_string(k)] = n_k.str();
    std::cout << nlohmann::json{{"total", result.total.str()},
                                {"entropy_bits", result.entropy_bits},
                                {"per_k", std::move(per_k)}}
                     .dump(2)
              << "\n";
    return kExitOk;
  }
  std::cout << "k\tN_k\n";
  for (const auto& [k, n_k] : result.per_k) std::cout << k << "\t" << n_k << "\n";
  std::cout << "N=" << result.total << "\n";
  std::cout << "entropy_bits=" << four_decimals(result.entropy_bits) << "\n";
  return kExitOk;
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return static_cast<bool>(out);
}

int run_analyze(const std::filesystem::path& log, const std::vector<double>& alphas, bool as_json,
                const std::string& csv_dir) {
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      std::cerr << "picksort analyze: alpha " << alpha << " outside (0, 1]\n";
      return kExitConfig;
    }
  }
  picksort::LogReadResult read;
  try {
    read = picksort::read_event_log(log);
  } catch (const std::exception& e) {
    std::cerr << "picksort analyze: " << e.what() << "\n";
    return kExitConfig;
  }
  for (const auto& w : read.warnings) std::cerr << "warning: skipping corrupt line " << w << "\n";

  picksort::ReportOptions options;
  if (!alphas.empty()) options.alphas = alphas;
  const auto inputs = picksort::collect_report_inputs(read.events);
  for (const auto& w : inputs.warnings) std::cerr << "warning: " << w << "\n";
  const auto report = picksort::build_report(inputs, options);

  if (as_json) {
    std::cout << picksort::report_to_string(report);
  } else {
    std::cout << picksort::report_to_text(report);
  }
  if (!csv_dir.empty()) {
    std::filesystem::create_directories(csv_dir);
    const std::filesystem::path dir(csv_dir);
    if (!write_file(dir / "element_frequencies.csv", picksort::element_frequency_csv(report)) ||
        !write_file(dir / "co_occurrences.csv", picksort::co_occurrence_csv(report)) ||
        !write_file(dir / "patterns.csv", picksort::pattern_csv(report))) {
      std::cerr << "picksort analyze: cannot write CSV files to " << csv_dir << "\n";
      return kExitGeneric;
    }
  }
  if (read.lines > 0 && read.corrupt() == read.lines) {
    std::cerr << "picksort analyze: every line of " << log << " is corrupt\n";
    return kExitGeneric;
  }
  return kExitOk;
}

int run_serve(const std::filesystem::path& config_path) {
  picksort::ServiceConfig config;
  std::optional<picksort::PolicyConfig> policy;
  try {
    config = picksort::load_service_config(config_path);
    if (!std::filesystem::exists(config.policy_path)) {
      std::cerr << "picksort serve: policy file not found: " << config.policy_path.string() << "\n";
      return kExitConfig;
    }
    policy = picksort::load_policy(config.policy_path);
  } catch (const std::exception& e) {
    std::cerr << "picksort serve: " << e.what() << "\n";
    return kExitConfig;
  }

  // Handle SIGINT/SIGTERM on a dedicated thread; block them everywhere else.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<picksort::AuthService> service;
  try {
    service = std::make_unique<picksort::AuthService>(config, *policy);
  } catch (const std::exception& e) {
    std::cerr << "picksort serve: " << e.what() << "\n";
    return kExitConfig;
  }
  picksort::HttpServer server(*service);
  if (!server.bind(config.bind_address, config.port)) {
    std::cerr << "picksort serve: cannot bind " << config.bind_address << ":" << config.port << "\n";
    return kExitBind;
  }

  std::atomic<bool> signaled{false};
  std::thread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    signaled = true;
    server.stop();
  });
  std::cerr << "picksort: listening on " << config.bind_address << ":" << config.port << "\n";
  server.listen();
  service->flush();
  // If listen() ended for a reason other than a signal, release the waiter.
  if (!signaled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cerr << "picksort: stopped\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pick-and-sort graphical authentication service and tools"};
  app.require_subcommand(1);

  std::string config_path;
  auto* serve = app.add_subcommand("serve", "Run the HTTP authentication service");
  serve->add_option("--config", config_path, "Service config JSON")->required();

  std::size_t cells = 0, kmin = 0, kmax = 0;
  std::string sets;
  bool entropy_json = false;
  auto* entropy = app.add_subcommand("entropy", "Exact password space and theoretical entropy");
  entropy->add_option("--cells", cells, "Number of grid cells")->required();
  entropy->add_option("--sets", sets, "Comma-separated set sizes")->required();
  entropy->add_option("--kmin", kmin, "Minimum placements")->required();
  entropy->add_option("--kmax", kmax, "Maximum placements")->required();
  entropy->add_flag("--json", entropy_json, "JSON output");

  std::string log_path, csv_dir;
  std::vector<double> alphas;
  bool analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "Analytics report from an event log");
  analyze->add_option("--log", log_path, "Event log (JSON lines)")->required();
  analyze->add_option("--alpha", alphas, "Work-factor alphas, comma-separated")->delimiter(',');
  analyze->add_flag("--json", analyze_json, "JSON output (same bytes as GET /api/analytics)");
  analyze->add_option("--csv", csv_dir, "Also write CSV tables to this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*serve) return run_serve(config_path);
    if (*entropy) return run_entropy(cells, sets, kmin, kmax, entropy_json);
    if (*analyze) return run_analyze(log_path, alphas, analyze_json, csv_dir);
  } catch (const std::exception& e) {
    std::cerr << "picksort: " << e.what() << "\n";
    return kExitGeneric;
  }
  return kExitGeneric;
}
