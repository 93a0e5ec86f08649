#include "picksort/random.hpp"

#include <array>
#include <stdexcept>

#include <sodium.h>

namespace picksort {

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw std::runtime_error("libsodium initialization failed");
}

void random_bytes(std::span<std::uint8_t> out) {
  ensure_sodium();
  randombytes_buf(out.data(), out.size());
}

SecureRandom::result_type SecureRandom::operator()() {
  result_type value = 0;
  random_bytes({reinterpret_cast<std::uint8_t*>(&value), sizeof value});
  return value;
}

std::string random_token() {
  std::array<std::uint8_t, 16> raw{};
  random_bytes(raw);
  constexpr int variant = sodium_base64_VARIANT_URLSAFE_NO_PADDING;
  std::string out(sodium_base64_ENCODED_LEN(raw.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), raw.data(), raw.size(), variant);
  out.resize(out.find('\0'));
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out(bytes.size() * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), bytes.data(), bytes.size());
  out.pop_back();
  return out;
}

void from_hex(std::string_view text, std::span<std::uint8_t> out) {
  std::size_t written = 0;
  const char* end = nullptr;
  if (text.size() != out.size() * 2 ||
      sodium_hex2bin(out.data(), out.size(), text.data(), text.size(), nullptr, &written, &end) != 0 ||
      written != out.size()) {
    throw std::invalid_argument("malformed hex field");
  }
}

}  // namespace picksort
