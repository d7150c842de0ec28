#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "wban/bitstring.hpp"

namespace wban::crypto {

inline constexpr std::size_t kDigestBits = 160;
inline constexpr std::size_t kKeyBits = 128;
inline constexpr std::size_t kBlockBits = 128;

/// 160-bit one-way hash output.
struct Digest160 {
  std::array<std::uint8_t, kDigestBits / 8> bytes{};

  BitString to_bits() const { return BitString::from_bytes(bytes.data(), bytes.size()); }
  static Digest160 from_bits(const BitString& bits);
  std::string to_hex() const { return to_bits().to_hex(); }

  auto operator<=>(const Digest160&) const = default;
};

/// 128-bit symmetric cipher key.
struct Key128 {
  std::array<std::uint8_t, kKeyBits / 8> bytes{};

  BitString to_bits() const { return BitString::from_bytes(bytes.data(), bytes.size()); }
  static Key128 from_bits(const BitString& bits);
  static Key128 from_hex(std::string_view hex);
  std::string to_hex() const { return to_bits().to_hex(); }

  auto operator<=>(const Key128&) const = default;
};

/// Simulated-clock reading, whole seconds.
using Timestamp32 = std::uint32_t;

/// Maximum permitted transit delay for a protocol message.
struct FreshnessWindow {
  std::uint32_t delta_seconds = 2;
};

/// One or more 128-bit cipher blocks.
struct CipherText {
  BitString bits;

  std::size_t block_count() const { return bits.bit_size() / kBlockBits; }
  auto operator<=>(const CipherText&) const = default;
};

struct EmptyPlaintextError : std::invalid_argument {
  EmptyPlaintextError() : std::invalid_argument("encrypt: empty plaintext") {}
};

struct MalformedCiphertextError : std::invalid_argument {
  explicit MalformedCiphertextError(std::size_t bits)
      : std::invalid_argument("decrypt: ciphertext of " + std::to_string(bits) +
                              " bits is not a positive multiple of 128") {}
};

/// SHA-1 over the input bytes. Inputs whose bit length is not a multiple of
/// eight are first zero-extended on the left to the next byte boundary.
Digest160 hash160(const BitString& input);

/// Width adapter between 160-bit digests and 128-bit cipher keys: the 128
/// most significant bits of the digest.
Key128 derive_key(const Digest160& digest);

/// AES-128-ECB over the plaintext zero-padded on the right to a whole number
/// of blocks. Field layouts are fixed per message schema, so the padding is
/// unambiguous to strip on the far side.
CipherText encrypt(const Key128& key, const BitString& plaintext);

/// Inverse of encrypt; returns the full padded plaintext. Callers slice
/// fields by schema and discard the padding.
BitString decrypt(const Key128& key, const CipherText& ciphertext);

enum class FreshnessVerdict : std::uint8_t { Fresh, EchoMismatch, WindowExceeded };

/// Accepts iff the echoed timestamp matches the cleartext companion and the
/// transit delay is within the window (inclusive bound).
FreshnessVerdict check_freshness(Timestamp32 t_sent, Timestamp32 t_echoed,
                                 Timestamp32 t_received, FreshnessWindow window);

/// Monotone non-decreasing logical clock; the simulator owns one per run.
class LogicalClock {
 public:
  explicit LogicalClock(Timestamp32 start = 0) : now_(start) {}

  Timestamp32 now() const { return now_; }

  void advance_to(Timestamp32 t) {
    if (t > now_) now_ = t;
  }

 private:
  Timestamp32 now_;
};

}  // namespace wban::crypto
