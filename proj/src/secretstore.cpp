#include "picksort/secretstore.hpp"

#include <iostream>

#include <json.hpp>
#include <sodium.h>

#include "picksort/policy_io.hpp"
#include "picksort/random.hpp"

namespace picksort {

using nlohmann::json;

namespace {

constexpr int kRecordVersion = 1;

// Stands in for a real credential so unknown users cost one derivation too.
constexpr Salt kDummySalt = {0x70, 0x69, 0x63, 0x6b, 0x73, 0x6f, 0x72, 0x74,
                             0x2d, 0x64, 0x75, 0x6d, 0x6d, 0x79, 0x00, 0x01};
constexpr std::string_view kDummyCanonical = "0:dummy:dummy";

std::int64_t to_millis(Clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

json to_record(const StoredCredential& c) {
  json record = {{"v", kRecordVersion},
                 {"username", c.username},
                 {"salt", to_hex(c.salt)},
                 {"hash", to_hex(c.hash)},
                 {"params", hash_params_to_json(c.params)},
                 {"created_ms", to_millis(c.created_at)}};
  if (c.plaintext_canonical) record["canonical"] = *c.plaintext_canonical;
  return record;
}

StoredCredential from_record(const json& record) {
  if (record.at("v").get<int>() != kRecordVersion) throw std::invalid_argument("unsupported record version");
  StoredCredential c;
  c.username = record.at("username").get<std::string>();
  from_hex(record.at("salt").get<std::string>(), c.salt);
  from_hex(record.at("hash").get<std::string>(), c.hash);
  c.params = hash_params_from_json(record.at("params"));
  c.created_at = Clock::time_point(std::chrono::milliseconds(record.at("created_ms").get<std::int64_t>()));
  if (record.contains("canonical")) c.plaintext_canonical = record.at("canonical").get<std::string>();
  return c;
}

}  // namespace

void check_hash_params(const HashParams& params) {
  if (params.parallelism != 1) {
    throw HashParamsError("hash_params.parallelism must be 1 (Argon2id lanes are fixed at one)");
  }
  if (params.time_cost < crypto_pwhash_OPSLIMIT_MIN || params.time_cost > crypto_pwhash_OPSLIMIT_MAX) {
    throw HashParamsError("hash_params.time_cost out of range");
  }
  const std::uint64_t bytes = params.memory_kib * 1024;
  if (bytes / 1024 != params.memory_kib || bytes < crypto_pwhash_MEMLIMIT_MIN ||
      bytes > crypto_pwhash_MEMLIMIT_MAX) {
    throw HashParamsError("hash_params.memory_kib out of range (minimum 8)");
  }
}

Digest derive_hash(std::span<const std::uint8_t> salt, std::string_view canonical, const HashParams& params) {
  if (salt.size() != crypto_pwhash_SALTBYTES) throw HashParamsError("salt must be 16 bytes");
  check_hash_params(params);
  ensure_sodium();
  Digest out{};
  if (crypto_pwhash(out.data(), out.size(), canonical.data(), canonical.size(), salt.data(), params.time_cost,
                    static_cast<std::size_t>(params.memory_kib * 1024), crypto_pwhash_ALG_ARGON2ID13) != 0) {
    throw std::runtime_error("key derivation failed (out of memory?)");
  }
  return out;
}

bool is_valid_username(std::string_view username) noexcept {
  if (username.empty() || username.size() > 64) return false;
  for (char c : username) {
    if (c <= ' ' || c > '~') return false;
  }
  return true;
}

std::string_view failure_reason_name(FailureReason reason) noexcept {
  switch (reason) {
    case FailureReason::unknown_user: return "unknown_user";
    case FailureReason::invalid_secret_shape: return "invalid_secret_shape";
    case FailureReason::mismatch: return "mismatch";
  }
  return "unknown";
}

CredentialStore::CredentialStore(std::filesystem::path file) : file_(std::move(file)) {
  replay();
  if (file_->has_parent_path()) std::filesystem::create_directories(file_->parent_path());
  out_.open(*file_, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open credential file '" + file_->string() + "' for append");
}

void CredentialStore::replay() {
  std::ifstream in(*file_, std::ios::binary);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto credential = from_record(json::parse(line));
      index_.insert_or_assign(credential.username, std::move(credential));
    } catch (const std::exception& e) {
      ++skipped_;
      std::cerr << "picksort: skipping corrupt credential record: " << e.what() << '\n';
    }
  }
}

void CredentialStore::append(const StoredCredential& credential) {
  if (!file_) return;
  out_ << to_record(credential).dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("failed writing credential file '" + file_->string() + "'");
}

StoredCredential CredentialStore::register_user(const std::string& username, const SecretConfiguration& secret,
                                                const PolicyConfig& policy, Clock::time_point now) {
  if (!is_valid_username(username)) throw std::invalid_argument("malformed username");
  const std::string canonical = canonicalize(secret, policy);
  {
    std::shared_lock lock(mutex_);
    if (index_.contains(username)) throw DuplicateUser(username);
  }

  StoredCredential credential;
  credential.username = username;
  random_bytes(credential.salt);
  credential.params = policy.hash_params();
  credential.hash = derive_hash(credential.salt, canonical, credential.params);
  credential.created_at = now;
  if (policy.study_mode()) credential.plaintext_canonical = canonical;

  std::unique_lock lock(mutex_);
  if (index_.contains(username)) throw DuplicateUser(username);
  append(credential);
  index_.emplace(username, credential);
  return credential;
}

VerificationOutcome CredentialStore::verify(std::string_view username, const SecretConfiguration& submitted,
                                            const PolicyConfig& policy) const {
  std::optional<StoredCredential> stored = find(username);
  const bool shape_ok = validate_secret(submitted, policy).ok();

  if (!stored || !shape_ok) {
    try {
      (void)derive_hash(kDummySalt, kDummyCanonical, stored ? stored->params : policy.hash_params());
    } catch (const std::exception&) {
    }
    return VerificationOutcome::reject(stored ? FailureReason::invalid_secret_shape : FailureReason::unknown_user);
  }

  Digest candidate{};
  try {
    candidate = derive_hash(stored->salt, canonicalize(submitted), stored->params);
  } catch (const std::exception&) {
    return VerificationOutcome::reject(FailureReason::invalid_secret_shape);
  }
  if (sodium_memcmp(candidate.data(), stored->hash.data(), candidate.size()) != 0) {
    return VerificationOutcome::reject(FailureReason::mismatch);
  }
  return VerificationOutcome::accept();
}

std::optional<StoredCredential> CredentialStore::find(std::string_view username) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(std::string(username));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t CredentialStore::size() const {
  std::shared_lock lock(mutex_);
  return index_.size();
}

}  // namespace picksort
