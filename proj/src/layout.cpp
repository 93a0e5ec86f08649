#include "picksort/layout.hpp"

#include <algorithm>

#include "picksort/random.hpp"

namespace picksort {

std::string new_challenge_token() { return random_token(); }

bool is_valid_layout(const Challenge& challenge, const PolicyConfig& policy) {
  if (challenge.per_set_order.size() != policy.sets().size()) return false;
  for (const auto& set : policy.sets()) {
    auto it = challenge.per_set_order.find(set.set_id());
    if (it == challenge.per_set_order.end()) return false;
    std::vector<std::string> expected;
    for (const auto& e : set.elements()) expected.push_back(e.element_id);
    auto shown = it->second;
    std::sort(expected.begin(), expected.end());
    std::sort(shown.begin(), shown.end());
    if (shown != expected) return false;
  }
  return true;
}

std::string_view consume_error_name(ConsumeError error) noexcept {
  switch (error) {
    case ConsumeError::unknown_token: return "unknown_token";
    case ConsumeError::expired: return "expired_token";
    case ConsumeError::already_used: return "reused_token";
    case ConsumeError::wrong_user: return "token_user_mismatch";
  }
  return "invalid_token";
}

void ChallengeBook::issue(Challenge challenge) {
  std::lock_guard lock(mutex_);
  std::string token = challenge.token;
  live_.insert_or_assign(std::move(token), std::move(challenge));
}

std::pair<std::optional<Challenge>, std::optional<ConsumeError>> ChallengeBook::consume(const std::string& token,
                                                                                       std::string_view username,
                                                                                       Clock::time_point now) {
  std::lock_guard lock(mutex_);
  auto it = live_.find(token);
  if (it == live_.end()) {
    return {std::nullopt, used_.contains(token) ? ConsumeError::already_used : ConsumeError::unknown_token};
  }
  if (it->second.username != username) return {std::nullopt, ConsumeError::wrong_user};

  Challenge challenge = std::move(it->second);
  live_.erase(it);
  used_.emplace(token, challenge.expires_at);
  if (now >= challenge.expires_at) return {std::nullopt, ConsumeError::expired};
  return {std::move(challenge), std::nullopt};
}

std::size_t ChallengeBook::outstanding() const {
  std::lock_guard lock(mutex_);
  return live_.size();
}

void ChallengeBook::prune(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  std::erase_if(live_, [&](const auto& entry) { return entry.second.expires_at <= now; });
  std::erase_if(used_, [&](const auto& entry) { return entry.second <= now; });
}

}  // namespace picksort
