#pragma once

#include <cstdint>
#include <random>

#include "wban/bitstring.hpp"

namespace wban {

/// Deterministic random source. All randomness in the artifact (key material,
/// nonces, blinding values, jitter) flows through one of these, so a scenario
/// is reproducible from its seed alone. mt19937_64 output is pinned by the
/// standard; no std distribution adaptors are used because their sequences
/// are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(engine_() >> 32); }

  /// Uniform value in [0, bound); bound 0 yields 0.
  std::uint32_t below(std::uint32_t bound) {
    return bound == 0 ? 0 : next_u32() % bound;
  }

  BitString next_bits(std::size_t bit_len) {
    std::vector<std::uint8_t> buf((bit_len + 7) / 8);
    for (std::size_t i = 0; i < buf.size(); i += 8) {
      std::uint64_t word = next_u64();
      for (std::size_t j = 0; j < 8 && i + j < buf.size(); ++j) {
        buf[i + j] = static_cast<std::uint8_t>(word >> (56 - 8 * j));
      }
    }
    return BitString::from_bytes(buf).slice(0, bit_len);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wban
