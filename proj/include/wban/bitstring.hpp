#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wban {

/// Fixed-width bit sequence with an explicit length.
///
/// Bits are addressed MSB-first: bit 0 is the most significant bit of the
/// first byte, and concatenation appends on the right. An n-bit string is
/// stored in ceil(n/8) bytes; the unused low bits of the last byte are kept
/// at zero so that equality and ordering work on the raw buffer.
class BitString {
 public:
  BitString() = default;

  static BitString zeros(std::size_t bit_len);
  static BitString from_bytes(const std::uint8_t* data, std::size_t byte_len);
  static BitString from_bytes(const std::vector<std::uint8_t>& bytes);
  static BitString from_text(std::string_view text);
  static BitString from_hex(std::string_view hex);  // 4 bits per digit
  static BitString from_u32(std::uint32_t value);   // 32 bits, big-endian
  static BitString from_u64(std::uint64_t value);   // 64 bits, big-endian

  std::size_t bit_size() const { return bit_len_; }
  std::size_t byte_size() const { return bytes_.size(); }
  bool empty() const { return bit_len_ == 0; }

  bool bit(std::size_t i) const;
  void set_bit(std::size_t i, bool value);
  void flip_bit(std::size_t i);

  /// Bits [offset, offset + width); offset + width must not exceed bit_size().
  BitString slice(std::size_t offset, std::size_t width) const;

  /// Zero-extend on the left to `width` bits (width >= bit_size()).
  BitString left_padded(std::size_t width) const;

  /// Zero-pad on the right to `width` bits (width >= bit_size()).
  BitString right_padded(std::size_t width) const;

  std::uint32_t to_u32() const;  // requires bit_size() == 32
  std::uint64_t to_u64() const;  // requires bit_size() == 64
  std::string to_hex() const;    // requires bit_size() % 4 == 0

  /// Raw storage; the tail byte carries zero padding when bit_size() % 8 != 0.
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b);

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_len_ = 0;
};

/// a || b, MSB-first.
BitString concat(const BitString& a, const BitString& b);

inline BitString concat(const BitString& a, const BitString& b, const auto&... rest) {
  return concat(concat(a, b), rest...);
}

/// Width-normalizing exclusive-or: the shorter operand is zero-extended on
/// the left, so the result is max(width(a), width(b)) bits wide.
BitString xor_norm(const BitString& a, const BitString& b);

}  // namespace wban
