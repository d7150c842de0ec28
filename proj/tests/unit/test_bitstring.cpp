#include "wban/bitstring.hpp"

#include <stdexcept>

#include "doctest.h"
#include "wban/rng.hpp"

using wban::BitString;
using wban::concat;
using wban::SeededRng;
using wban::xor_norm;

TEST_CASE("construction and bit addressing") {
  BitString s = BitString::zeros(12);
  CHECK(s.bit_size() == 12);
  CHECK(s.byte_size() == 2);
  for (std::size_t i = 0; i < 12; ++i) CHECK(!s.bit(i));

  s.set_bit(0, true);
  s.set_bit(11, true);
  CHECK(s.bit(0));
  CHECK(s.bit(11));
  CHECK(s.bytes()[0] == 0x80);
  CHECK(s.bytes()[1] == 0x10);

  s.flip_bit(0);
  CHECK(!s.bit(0));
  CHECK_THROWS_AS(s.bit(12), std::out_of_range);
  CHECK_THROWS_AS(s.set_bit(12, true), std::out_of_range);
}

TEST_CASE("integer and hex conversions round-trip") {
  CHECK(BitString::from_u32(0xDEADBEEF).to_u32() == 0xDEADBEEF);
  CHECK(BitString::from_u64(0x0123456789ABCDEFull).to_u64() == 0x0123456789ABCDEFull);
  CHECK(BitString::from_u32(1).bit_size() == 32);
  CHECK(BitString::from_u32(0x80000000).bit(0));

  const BitString h = BitString::from_hex("a9993e36");
  CHECK(h.bit_size() == 32);
  CHECK(h.to_hex() == "a9993e36");
  CHECK(h.to_u32() == 0xa9993e36);

  const BitString nibble = BitString::from_hex("f");
  CHECK(nibble.bit_size() == 4);
  CHECK(nibble.to_hex() == "f");

  CHECK(BitString::from_text("abc").bytes() == std::vector<std::uint8_t>{0x61, 0x62, 0x63});
  CHECK_THROWS_AS(BitString::from_hex("xy"), std::invalid_argument);
}

TEST_CASE("slice, aligned and unaligned") {
  const BitString s = BitString::from_hex("0123456789abcdef");
  CHECK(s.slice(0, 32).to_hex() == "01234567");
  CHECK(s.slice(32, 32).to_hex() == "89abcdef");
  CHECK(s.slice(8, 16).to_hex() == "2345");

  // offset not on a byte boundary
  const BitString odd = s.slice(4, 8);
  CHECK(odd.to_hex() == "12");

  CHECK_THROWS_AS(s.slice(60, 8), std::out_of_range);
}

TEST_CASE("concat joins MSB-first") {
  const BitString a = BitString::from_hex("ab");
  const BitString b = BitString::from_hex("cd");
  CHECK(concat(a, b).to_hex() == "abcd");
  CHECK(concat(a, b, a).to_hex() == "abcdab");

  // unaligned join: 4 bits || 8 bits
  const BitString n = BitString::from_hex("f");
  CHECK(concat(n, a).bit_size() == 12);
  CHECK(concat(n, a).to_hex() == "fab");

  SeededRng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const BitString x = rng.next_bits(1 + rng.below(40));
    const BitString y = rng.next_bits(1 + rng.below(40));
    const BitString z = rng.next_bits(1 + rng.below(40));
    CHECK(concat(concat(x, y), z) == concat(x, concat(y, z)));
    CHECK(concat(x, y).slice(0, x.bit_size()) == x);
    CHECK(concat(x, y).slice(x.bit_size(), y.bit_size()) == y);
  }
}

TEST_CASE("padding") {
  const BitString a = BitString::from_hex("ff");
  CHECK(a.left_padded(16).to_hex() == "00ff");
  CHECK(a.right_padded(16).to_hex() == "ff00");
  CHECK(a.left_padded(8) == a);
  CHECK_THROWS_AS(a.left_padded(4), std::invalid_argument);
}

TEST_CASE("xor_norm identities") {
  SeededRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t len = 1 + rng.below(200);
    const BitString a = rng.next_bits(len);
    CHECK(xor_norm(a, BitString::zeros(len)) == a);
    CHECK(xor_norm(a, a) == BitString::zeros(len));
  }
}

TEST_CASE("xor_norm zero-extends the shorter operand on the left") {
  const BitString a = BitString::from_u32(0xDEADBEEF);
  const BitString b = BitString::from_u64(0x0123456789ABCDEFull);
  const BitString out = xor_norm(a, b);
  CHECK(out.bit_size() == 64);
  CHECK(out.to_u64() == (0x0123456789ABCDEFull ^ 0xDEADBEEFull));
  CHECK(out == xor_norm(concat(BitString::zeros(32), a), b));
}

TEST_CASE("xor_norm is commutative and associative after normalization") {
  SeededRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const BitString a = rng.next_bits(1 + rng.below(80));
    const BitString b = rng.next_bits(1 + rng.below(80));
    const BitString c = rng.next_bits(1 + rng.below(80));
    CHECK(xor_norm(a, b) == xor_norm(b, a));
    CHECK(xor_norm(xor_norm(a, b), c) == xor_norm(a, xor_norm(b, c)));
  }
}

TEST_CASE("ordering is deterministic and usable as a map key") {
  const BitString a = BitString::from_hex("00");
  const BitString b = BitString::from_hex("01");
  CHECK(a < b);
  CHECK(a == a);
  CHECK(BitString::zeros(7) < BitString::zeros(8));  // width sorts first
}
