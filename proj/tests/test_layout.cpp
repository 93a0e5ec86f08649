#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <random>
#include <set>
#include <thread>

#include "picksort/layout.hpp"
#include "picksort/random.hpp"
#include "test_support.hpp"

using namespace picksort;
using namespace picksort::testing;

static_assert(Random64<std::mt19937_64>);
static_assert(Random64<SecureRandom>);
static_assert(!Random64<std::mt19937>);

TEST_CASE("prototype challenge shape") {
  const auto policy = prototype_policy();
  std::mt19937_64 rng(1);
  const auto c = generate_challenge("alice", policy, rng);
  REQUIRE(c.per_set_order.size() == 3);
  CHECK(c.per_set_order.at("colors").size() == 40);
  CHECK(c.per_set_order.at("icons").size() == 90);
  CHECK(c.per_set_order.at("shapes").size() == 50);
  CHECK(c.username == "alice");
  CHECK(c.expires_at - c.issued_at == kDefaultChallengeTtl);
  CHECK(c.token.size() == 22);
  CHECK(is_valid_layout(c, policy));
}

TEST_CASE("a one-element set is never reordered") {
  const auto policy = small_policy(2, 2, {1, 5}, 2, 4);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto c = generate_challenge("u", policy, rng);
    CHECK(c.per_set_order.at("s0") == std::vector<std::string>{"e0"});
  }
}

TEST_CASE("same seed, same permutations; tokens stay fresh") {
  const auto policy = prototype_policy();
  std::mt19937_64 a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const auto ca = generate_challenge("u", policy, a);
    const auto cb = generate_challenge("u", policy, b);
    REQUIRE(ca.per_set_order == cb.per_set_order);
    REQUIRE(ca.token != cb.token);
  }
  std::mt19937_64 c(43);
  std::mt19937_64 d(42);
  CHECK(generate_challenge("u", policy, c).per_set_order != generate_challenge("u", policy, d).per_set_order);
}

TEST_CASE("every challenge preserves each set's multiset and ownership") {
  const auto policy = prototype_policy();
  std::mt19937_64 rng(7);
  std::map<std::string, std::string> owner;
  for (const auto& s : policy.sets()) {
    for (const auto& e : s.elements()) owner[e.element_id] = s.set_id();
  }
  for (int i = 0; i < 2000; ++i) {
    const auto c = generate_challenge("u", policy, rng);
    REQUIRE(is_valid_layout(c, policy));
    for (const auto& [set_id, ids] : c.per_set_order) {
      for (const auto& id : ids) REQUIRE(owner.at(id) == set_id);
    }
  }
}

TEST_CASE("is_valid_layout detects tampering") {
  const auto policy = prototype_policy();
  std::mt19937_64 rng(3);
  auto c = generate_challenge("u", policy, rng);
  auto moved = c;
  moved.per_set_order["colors"].push_back(moved.per_set_order["icons"].back());
  moved.per_set_order["icons"].pop_back();
  CHECK_FALSE(is_valid_layout(moved, policy));
  auto dropped = c;
  dropped.per_set_order.erase("shapes");
  CHECK_FALSE(is_valid_layout(dropped, policy));
  auto repeated = c;
  repeated.per_set_order["colors"][0] = repeated.per_set_order["colors"][1];
  CHECK_FALSE(is_valid_layout(repeated, policy));
}

TEST_CASE("positions in a 5-element set are uniform") {
  const auto policy = small_policy(2, 2, {5}, 1, 4);
  std::mt19937_64 rng(20240601);
  std::array<std::array<int, 5>, 5> hits{};
  constexpr int kTrials = 10000;
  for (int t = 0; t < kTrials; ++t) {
    const auto order = generate_challenge("u", policy, rng).per_set_order.at("s0");
    for (std::size_t pos = 0; pos < order.size(); ++pos) ++hits[order[pos][1] - '0'][pos];
  }
  for (const auto& row : hits) {
    for (int h : row) CHECK(std::abs(static_cast<double>(h) / kTrials - 0.2) <= 0.02);
  }
}

TEST_CASE("production generator shuffles uniformly too") {
  SecureRandom rng;
  std::array<std::array<int, 5>, 5> hits{};
  constexpr int kTrials = 10000;
  for (int t = 0; t < kTrials; ++t) {
    std::array<int, 5> items{0, 1, 2, 3, 4};
    shuffle_in_place(std::span<int>(items), rng);
    for (std::size_t pos = 0; pos < 5; ++pos) ++hits[items[pos]][pos];
  }
  for (const auto& row : hits) {
    for (int h : row) CHECK(std::abs(static_cast<double>(h) / kTrials - 0.2) <= 0.02);
  }
}

TEST_CASE("uniform_below stays in range and covers it") {
  std::mt19937_64 rng(9);
  for (std::uint64_t bound : {1ull, 2ull, 3ull, 7ull, 1000ull, (1ull << 63) + 1}) {
    for (int i = 0; i < 1000; ++i) REQUIRE(uniform_below(bound, rng) < bound);
  }
  std::array<int, 3> counts{};
  for (int i = 0; i < 30000; ++i) ++counts[uniform_below(3, rng)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("challenge tokens are single-use") {
  const auto policy = prototype_policy();
  std::mt19937_64 rng(5);
  ChallengeBook book;
  const auto now = from_millis(1'000'000);
  auto c = generate_challenge("alice", policy, rng, std::chrono::seconds(60), now);
  const auto token = c.token;
  book.issue(c);
  CHECK(book.outstanding() == 1);

  auto [wrong, wrong_err] = book.consume(token, "bob", now);
  CHECK_FALSE(wrong);
  CHECK(wrong_err == ConsumeError::wrong_user);

  auto [first, first_err] = book.consume(token, "alice", now + std::chrono::seconds(1));
  REQUIRE(first);
  CHECK_FALSE(first_err);
  CHECK(first->per_set_order == c.per_set_order);

  auto [second, second_err] = book.consume(token, "alice", now + std::chrono::seconds(2));
  CHECK_FALSE(second);
  CHECK(second_err == ConsumeError::already_used);

  auto [unknown, unknown_err] = book.consume("never-issued", "alice", now);
  CHECK_FALSE(unknown);
  CHECK(unknown_err == ConsumeError::unknown_token);
  CHECK(book.outstanding() == 0);
}

TEST_CASE("expired tokens are rejected and burned") {
  const auto policy = prototype_policy();
  std::mt19937_64 rng(6);
  ChallengeBook book;
  const auto now = from_millis(5'000'000);
  const auto c = generate_challenge("alice", policy, rng, std::chrono::seconds(300), now);
  book.issue(c);
  auto [late, late_err] = book.consume(c.token, "alice", now + std::chrono::seconds(300));
  CHECK_FALSE(late);
  CHECK(late_err == ConsumeError::expired);
  auto [again, again_err] = book.consume(c.token, "alice", now + std::chrono::seconds(301));
  CHECK(again_err == ConsumeError::already_used);

  CHECK(consume_error_name(ConsumeError::unknown_token) == "unknown_token");
  CHECK(consume_error_name(ConsumeError::expired) == "expired_token");
  CHECK(consume_error_name(ConsumeError::already_used) == "reused_token");
  CHECK(consume_error_name(ConsumeError::wrong_user) == "token_user_mismatch");
}

TEST_CASE("prune forgets expired challenges") {
  const auto policy = prototype_policy();
  std::mt19937_64 rng(8);
  ChallengeBook book;
  const auto now = from_millis(0);
  book.issue(generate_challenge("a", policy, rng, std::chrono::seconds(10), now));
  book.issue(generate_challenge("b", policy, rng, std::chrono::seconds(100), now));
  book.prune(now + std::chrono::seconds(50));
  CHECK(book.outstanding() == 1);
}

TEST_CASE("concurrent consumers of one token: exactly one wins") {
  const auto policy = prototype_policy();
  std::mt19937_64 rng(10);
  for (int round = 0; round < 50; ++round) {
    ChallengeBook book;
    const auto c = generate_challenge("alice", policy, rng);
    book.issue(c);
    std::atomic<int> winners{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&] {
        if (book.consume(c.token, "alice").first) ++winners;
      });
    }
    for (auto& t : threads) t.join();
    REQUIRE(winners == 1);
  }
}
