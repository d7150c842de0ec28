#include "wban/bitstring.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace wban {

namespace {

std::size_t bytes_for(std::size_t bits) { return (bits + 7) / 8; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitString BitString::zeros(std::size_t bit_len) {
  BitString s;
  s.bit_len_ = bit_len;
  s.bytes_.assign(bytes_for(bit_len), 0);
  return s;
}

BitString BitString::from_bytes(const std::uint8_t* data, std::size_t byte_len) {
  BitString s;
  s.bit_len_ = byte_len * 8;
  s.bytes_.assign(data, data + byte_len);
  return s;
}

BitString BitString::from_bytes(const std::vector<std::uint8_t>& bytes) {
  return from_bytes(bytes.data(), bytes.size());
}

BitString BitString::from_text(std::string_view text) {
  return from_bytes(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
}

BitString BitString::from_hex(std::string_view hex) {
  BitString s = zeros(hex.size() * 4);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    int v = hex_digit(hex[i]);
    if (v < 0) throw std::invalid_argument("BitString::from_hex: bad digit");
    for (int b = 0; b < 4; ++b) {
      if (v & (8 >> b)) s.set_bit(i * 4 + b, true);
    }
  }
  return s;
}

BitString BitString::from_u32(std::uint32_t value) {
  BitString s = zeros(32);
  for (int i = 0; i < 4; ++i) s.bytes_[i] = static_cast<std::uint8_t>(value >> (24 - 8 * i));
  return s;
}

BitString BitString::from_u64(std::uint64_t value) {
  BitString s = zeros(64);
  for (int i = 0; i < 8; ++i) s.bytes_[i] = static_cast<std::uint8_t>(value >> (56 - 8 * i));
  return s;
}

bool BitString::bit(std::size_t i) const {
  if (i >= bit_len_) throw std::out_of_range("BitString::bit");
  return (bytes_[i / 8] >> (7 - i % 8)) & 1u;
}

void BitString::set_bit(std::size_t i, bool value) {
  if (i >= bit_len_) throw std::out_of_range("BitString::set_bit");
  const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - i % 8));
  if (value) {
    bytes_[i / 8] |= mask;
  } else {
    bytes_[i / 8] &= static_cast<std::uint8_t>(~mask);
  }
}

void BitString::flip_bit(std::size_t i) { set_bit(i, !bit(i)); }

BitString BitString::slice(std::size_t offset, std::size_t width) const {
  if (offset + width > bit_len_) throw std::out_of_range("BitString::slice");
  BitString out = zeros(width);
  if (offset % 8 == 0) {
    std::memcpy(out.bytes_.data(), bytes_.data() + offset / 8, bytes_for(width));
    // clear tail padding copied from the source
    if (width % 8 != 0) {
      out.bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - width % 8));
    }
  } else {
    for (std::size_t i = 0; i < width; ++i) out.set_bit(i, bit(offset + i));
  }
  return out;
}

BitString BitString::left_padded(std::size_t width) const {
  if (width < bit_len_) throw std::invalid_argument("BitString::left_padded: narrower than value");
  return concat(zeros(width - bit_len_), *this);
}

BitString BitString::right_padded(std::size_t width) const {
  if (width < bit_len_) throw std::invalid_argument("BitString::right_padded: narrower than value");
  BitString out = *this;
  out.bit_len_ = width;
  out.bytes_.resize(bytes_for(width), 0);
  return out;
}

std::uint32_t BitString::to_u32() const {
  if (bit_len_ != 32) throw std::invalid_argument("BitString::to_u32: need exactly 32 bits");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[i];
  return v;
}

std::uint64_t BitString::to_u64() const {
  if (bit_len_ != 64) throw std::invalid_argument("BitString::to_u64: need exactly 64 bits");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | bytes_[i];
  return v;
}

std::string BitString::to_hex() const {
  if (bit_len_ % 4 != 0) throw std::invalid_argument("BitString::to_hex: need a multiple of 4 bits");
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bit_len_ / 4);
  for (std::size_t i = 0; i < bit_len_ / 4; ++i) {
    const std::uint8_t byte = bytes_[i / 2];
    out.push_back(digits[(i % 2 == 0) ? (byte >> 4) : (byte & 0x0F)]);
  }
  return out;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
  if (auto c = a.bit_len_ <=> b.bit_len_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.bytes_.begin(), a.bytes_.end(),
                                                b.bytes_.begin(), b.bytes_.end());
}

BitString concat(const BitString& a, const BitString& b) {
  BitString out = a.right_padded(a.bit_size() + b.bit_size());
  if (a.bit_size() % 8 == 0) {
    const auto& src = b.bytes();
    std::vector<std::uint8_t> merged = out.bytes();
    std::copy(src.begin(), src.end(), merged.begin() + a.byte_size());
    out = BitString::from_bytes(merged).slice(0, a.bit_size() + b.bit_size());
  } else {
    for (std::size_t i = 0; i < b.bit_size(); ++i) out.set_bit(a.bit_size() + i, b.bit(i));
  }
  return out;
}

BitString xor_norm(const BitString& a, const BitString& b) {
  const std::size_t width = std::max(a.bit_size(), b.bit_size());
  BitString wa = a.left_padded(width);
  BitString wb = b.left_padded(width);
  std::vector<std::uint8_t> merged(wa.byte_size());
  for (std::size_t i = 0; i < merged.size(); ++i) merged[i] = wa.bytes()[i] ^ wb.bytes()[i];
  return BitString::from_bytes(merged).slice(0, width);
}

}  // namespace wban
