// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include <httplib.h>

#include "picksort/analytics.hpp"
#include "picksort/combinatorics.hpp"
#include "picksort/http_server.hpp"
#include "picksort/layout.hpp"
#include "picksort/policy_io.hpp"
#include "picksort/secretstore.hpp"
#include "picksort/service.hpp"
#include "test_support.hpp"

using namespace picksort;
using namespace picksort::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome theoretical_entropy() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = total_space({16, {40, 90, 50}, 3, 16});
  const double elapsed = seconds_since(start);
  const bool pass = r.entropy_bits >= 119.5 && r.entropy_bits <= 120.5 && elapsed < 1.0;
  return {pass, fmt("entropy_bits=%.6f in [119.5, 120.5], %.4f s < 1 s", r.entropy_bits, elapsed)};
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t configs = 0, mismatches = 0;
  for (std::size_t n : {2u, 3u, 4u, 6u}) {
    for (std::size_t m = 1; m <= 3; ++m) {
      std::vector<std::size_t> sizes(m, 1);
      while (true) {
        for (std::size_t k_min = m; k_min <= n; ++k_min) {
          for (std::size_t k_max = k_min; k_max <= n; ++k_max) {
            const SpaceConfig config{n, sizes, k_min, k_max};
            ++configs;
            if (total_space(config).total != brute_force_space(config)) ++mismatches;
          }
        }
        std::size_t pos = 0;
        while (pos < m && ++sizes[pos] == 4) sizes[pos++] = 1;
        if (pos == m) break;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && configs > 0 && elapsed < 60.0,
          fmt("%zu configs, %zu mismatches, %.2f s < 60 s", configs, mismatches, elapsed)};
}

Outcome empirical_entropy_values() {
  const auto d = study_distribution();
  const double h = empirical_entropy(d);
  const double bound = entropy_upper_bound(d);
  const bool pass = std::abs(h - 5.85) <= 0.005 && std::abs(bound - 5.88) <= 0.005;
  return {pass, fmt("H=%.6f (5.85 +/- 0.005), bound=%.6f (5.88 +/- 0.005)", h, bound)};
}

Outcome guesswork_values() {
  const auto d = study_distribution();
  const auto g = expected_guesswork(d);
  const auto w10 = work_factor(d, 0.10), w20 = work_factor(d, 0.20), w50 = work_factor(d, 0.50);
  const bool pass = g.exact == Rational(1712, 59) && w10 == 5 && w20 == 11 && w50 == 29;
  return {pass, "E[G]=" + g.exact.str() + fmt(" (%.4f), W(0.10)=%zu W(0.20)=%zu W(0.50)=%zu", g.value, w10, w20, w50)};
}

Outcome mutation_suite() {
  const auto policy = prototype_policy();
  CredentialStore store;
  std::mt19937_64 rng(1000);
  std::size_t false_rejects = 0, false_accepts = 0, mutants = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto secret = random_valid_secret(policy, rng);
    const std::string user = "user" + std::to_string(i);
    store.register_user(user, secret, policy);
    auto reordered = secret;
    std::shuffle(reordered.placements.begin(), reordered.placements.end(), rng);
    if (!store.verify(user, secret, policy).accepted) ++false_rejects;
    if (!store.verify(user, reordered, policy).accepted) ++false_rejects;
    for (auto m : kAllMutations) {
      ++mutants;
      if (store.verify(user, mutate(secret, m, policy, rng), policy).accepted) ++false_accepts;
    }
  }
  return {false_rejects == 0 && false_accepts == 0,
          fmt("1000 secrets, %zu mutants; false accepts=%zu, false rejects=%zu", mutants, false_accepts,
              false_rejects)};
}

Outcome layout_properties() {
  auto base = prototype_policy();
  auto sets = base.sets();
  sets.emplace_back("five", "Five",
                    std::vector<Element>{{"a", "", "A", ""}, {"b", "", "B", ""}, {"c", "", "C", ""},
                                         {"d", "", "D", ""}, {"e", "", "E", ""}});
  const PolicyConfig policy(base.grid(), sets, 4, 16, kFastHash);

  constexpr int kChallenges = 10000;
  std::mt19937_64 rng(424242), replay(424242);
  std::map<std::string, std::array<int, 5>> positions;
  std::size_t broken = 0, nondeterministic = 0;
  for (int i = 0; i < kChallenges; ++i) {
    const auto c = generate_challenge("u", policy, rng);
    const auto again = generate_challenge("u", policy, replay);
    if (!is_valid_layout(c, policy)) ++broken;
    if (c.per_set_order != again.per_set_order) ++nondeterministic;
    const auto& five = c.per_set_order.at("five");
    for (std::size_t pos = 0; pos < five.size(); ++pos) ++positions[five[pos]][pos];
  }
  double worst = 0.0;
  for (const auto& [id, counts] : positions) {
    for (int n : counts) worst = std::max(worst, std::abs(static_cast<double>(n) / kChallenges - 0.2));
  }
  return {broken == 0 && nondeterministic == 0 && worst <= 0.02,
          fmt("%d challenges: multiset violations=%zu, replay differences=%zu, max |freq-0.2|=%.4f <= 0.02",
              kChallenges, broken, nondeterministic, worst)};
}

Outcome service_end_to_end() {
  const auto dir = temp_dir("acceptance");
  ServiceConfig config;
  config.data_dir = dir;
  config.study_mode = true;
  config.admin_token = "acceptance";
  const auto policy = prototype_policy();
  const httplib::Headers auth{{"Authorization", "Bearer acceptance"}};
  const json secret = placements_to_json(SecretConfiguration{
      {{0, "colors", "black"}, {1, "icons", "fire"}, {2, "shapes", "square"}, {6, "colors", "blue"}}});

  bool round_trip = false, replay_rejected = false;
  std::string before;
  {
    AuthService service(config, policy);
    HttpServer server(service);
    const int port = server.bind_any_port("127.0.0.1");
    if (port <= 0) return {false, "could not bind a local port"};
    server.start();
    httplib::Client client("127.0.0.1", port);
    auto reg = client.Post("/api/register", json{{"username", "alice"}, {"placements", secret}}.dump(),
                           "application/json");
    auto ch = client.Post("/api/challenge", json{{"username", "alice"}}.dump(), "application/json");
    if (reg && reg->status == 201 && ch && ch->status == 200) {
      const json login = {{"username", "alice"}, {"token", json::parse(ch->body)["token"]}, {"placements", secret}};
      auto first = client.Post("/api/login", login.dump(), "application/json");
      auto second = client.Post("/api/login", login.dump(), "application/json");
      round_trip = first && first->status == 200 && json::parse(first->body)["success"] == true;
      replay_rejected = second && second->status == 400;
    }
    auto report = client.Get("/api/analytics", auth);
    if (report && report->status == 200) before = report->body;
    server.stop();
  }

  std::string after;
  {
    AuthService service(config, policy);
    HttpServer server(service);
    const int port = server.bind_any_port("127.0.0.1");
    server.start();
    httplib::Client client("127.0.0.1", port);
    auto report = client.Get("/api/analytics", auth);
    if (report && report->status == 200) after = report->body;
    server.stop();
  }
  std::filesystem::remove_all(dir);
  const bool identical = !before.empty() && before == after;
  return {round_trip && replay_rejected && identical,
          fmt("round trip=%s, token replay rejected=%s, replayed analytics identical=%s (%zu bytes)",
              round_trip ? "yes" : "no", replay_rejected ? "yes" : "no", identical ? "yes" : "no", after.size())};
}

Outcome pattern_classifier() {
  const std::vector<std::size_t> diagonal{0, 4, 8};
  const std::vector<std::size_t> top_row{0, 1, 2, 3};
  const bool fig = classify_pattern(diagonal, 3, 3).kind == PatternKind::diagonal;
  const bool row = classify_pattern(top_row, 4, 4).kind == PatternKind::horizontal_line;
  std::size_t subsets = 0, disagreements = 0;
  for (std::uint32_t mask = 0; mask < (1u << 16); ++mask) {
    if (std::popcount(mask) > 6) continue;
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < 16; ++c) {
      if (mask & (1u << c)) cells.push_back(c);
    }
    ++subsets;
    if (classify_pattern(cells, 4, 4) != enumerate_templates({cells.begin(), cells.end()}, 4, 4)) ++disagreements;
  }
  return {fig && row && disagreements == 0,
          fmt("diagonal example=%s, top row=%s, %zu subsets, %zu disagreements", fig ? "diagonal" : "WRONG",
              row ? "horizontal_line" : "WRONG", subsets, disagreements)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"theoretical entropy", theoretical_entropy},
      {"combinatorics oracle equivalence", oracle_equivalence},
      {"empirical entropy", empirical_entropy_values},
      {"guesswork", guesswork_values},
      {"verification mutation suite", mutation_suite},
      {"layout properties", layout_properties},
      {"service end-to-end", service_end_to_end},
      {"pattern classifier", pattern_classifier},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
