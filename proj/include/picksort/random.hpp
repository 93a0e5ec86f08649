#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>

namespace picksort {

/// Initializes libsodium once; throws std::runtime_error if that fails.
void ensure_sodium();

/// Fills the buffer from the operating system CSPRNG.
void random_bytes(std::span<std::uint8_t> out);

/// UniformRandomBitGenerator over the CSPRNG, for production shuffles.
class SecureRandom {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();
};

/// 128 random bits as unpadded URL-safe base64 (22 characters).
std::string random_token();

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Throws std::invalid_argument unless the text decodes to exactly out.size() bytes.
void from_hex(std::string_view text, std::span<std::uint8_t> out);

}  // namespace picksort
