#pragma once

// Credential lifecycle: registration, salted Argon2id hashing of canonical
// secrets, constant-time verification and JSON-lines persistence.

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

#include "picksort/model.hpp"

namespace picksort {

using Salt = std::array<std::uint8_t, 16>;
using Digest = std::array<std::uint8_t, 32>;
using Clock = std::chrono::system_clock;

class HashParamsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DuplicateUser : public std::runtime_error {
 public:
  explicit DuplicateUser(const std::string& username)
      : std::runtime_error("username '" + username + "' is already registered") {}
};

/// Throws HashParamsError when params are outside what Argon2id accepts or
/// the salt is not 16 bytes.
void check_hash_params(const HashParams& params);
Digest derive_hash(std::span<const std::uint8_t> salt, std::string_view canonical, const HashParams& params);

/// Usernames: 1..64 printable ASCII characters, no whitespace.
bool is_valid_username(std::string_view username) noexcept;

struct StoredCredential {
  std::string username;
  Salt salt{};
  Digest hash{};
  HashParams params;
  Clock::time_point created_at;
  /// Present only when the policy runs in study mode.
  std::optional<std::string> plaintext_canonical;
};

enum class FailureReason { unknown_user, invalid_secret_shape, mismatch };

std::string_view failure_reason_name(FailureReason reason) noexcept;

struct VerificationOutcome {
  bool accepted = false;
  std::optional<FailureReason> failure_reason;

  static VerificationOutcome accept() { return {true, std::nullopt}; }
  static VerificationOutcome reject(FailureReason reason) { return {false, reason}; }
};

/// In-memory credential index, optionally backed by an append-only JSON-lines
/// file that is replayed on construction (last write per username wins).
/// Reads are concurrent; writes are serialized.
class CredentialStore {
 public:
  CredentialStore() = default;
  explicit CredentialStore(std::filesystem::path file);

  CredentialStore(const CredentialStore&) = delete;
  CredentialStore& operator=(const CredentialStore&) = delete;

  /// Throws InvalidSecret (with every violation), DuplicateUser, or
  /// std::invalid_argument for a malformed username.
  StoredCredential register_user(const std::string& username, const SecretConfiguration& secret,
                                 const PolicyConfig& policy, Clock::time_point now = Clock::now());

  /// Never throws for bad input; every failure is an outcome. Unknown users
  /// and malformed secrets still pay for one key derivation.
  VerificationOutcome verify(std::string_view username, const SecretConfiguration& submitted,
                             const PolicyConfig& policy) const;

  std::optional<StoredCredential> find(std::string_view username) const;
  std::size_t size() const;
  /// Lines ignored during replay because they did not parse.
  std::size_t skipped_records() const noexcept { return skipped_; }

 private:
  void replay();
  void append(const StoredCredential& credential);

  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, StoredCredential> index_;
  std::optional<std::filesystem::path> file_;
  std::ofstream out_;
  std::size_t skipped_ = 0;
};

}  // namespace picksort
