#include "wban/crypto.hpp"

#include "doctest.h"
#include "wban/rng.hpp"

using namespace wban;
using namespace wban::crypto;

TEST_CASE("hash160 matches published SHA-1 test vectors") {
  CHECK(hash160(BitString::from_text("abc")).to_hex() ==
        "a9993e364706816aba3e25717850c26c9cd0d89d");
  CHECK(hash160(BitString()).to_hex() == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  CHECK(hash160(BitString::from_text("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))
            .to_hex() == "84983e441c3bd26ebaae4aa1f95129e5e54670f1");
}

TEST_CASE("hash160 is pure") {
  const BitString input = BitString::from_text("same input");
  CHECK(hash160(input) == hash160(input));
}

TEST_CASE("hash160 left-pads sub-byte inputs to a byte boundary") {
  // 4-bit input 0b1111 normalizes to the byte 0x0f
  CHECK(hash160(BitString::from_hex("f")) == hash160(BitString::from_hex("0f")));
}

TEST_CASE("derive_key truncates to the 128 most significant bits") {
  Digest160 d;
  for (std::size_t i = 0; i < d.bytes.size(); ++i) d.bytes[i] = static_cast<std::uint8_t>(i + 1);
  const Key128 k = derive_key(d);
  CHECK(k.to_bits() == d.to_bits().slice(0, 128));

  // digests differing only in the trailing 32 bits give identical keys
  Digest160 d2 = d;
  d2.bytes[16] ^= 0xFF;
  d2.bytes[19] ^= 0x01;
  CHECK(derive_key(d2) == k);

  const BitString x = BitString::from_text("x");
  CHECK(derive_key(hash160(x)) == derive_key(hash160(x)));
}

TEST_CASE("AES-128 matches the FIPS-197 example vector") {
  const Key128 key = Key128::from_hex("000102030405060708090a0b0c0d0e0f");
  const BitString plaintext = BitString::from_hex("00112233445566778899aabbccddeeff");
  const CipherText ct = encrypt(key, plaintext);
  CHECK(ct.bits.to_hex() == "69c4e0d86a7b0430d8cdb78070b4c55a");
  CHECK(decrypt(key, ct) == plaintext);
}

TEST_CASE("encrypt pads to whole blocks") {
  SeededRng rng(21);
  const Key128 key = Key128::from_bits(rng.next_bits(128));

  CHECK(encrypt(key, rng.next_bits(448)).bits.bit_size() == 512);  // 4 blocks
  CHECK(encrypt(key, rng.next_bits(448)).block_count() == 4);
  CHECK(encrypt(key, rng.next_bits(224)).bits.bit_size() == 256);  // 2 blocks
  CHECK(encrypt(key, rng.next_bits(224)).block_count() == 2);

  for (std::size_t len = 1; len <= 2048; ++len) {
    const std::size_t expect = 128 * ((len + 127) / 128);
    CHECK(encrypt(key, rng.next_bits(len)).bits.bit_size() == expect);
  }
}

TEST_CASE("encrypt/decrypt round-trips under the original length") {
  SeededRng rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const Key128 key = Key128::from_bits(rng.next_bits(128));
    const std::size_t len = 1 + rng.below(700);
    const BitString m = rng.next_bits(len);
    const BitString padded = decrypt(key, encrypt(key, m));
    CHECK(padded.bit_size() % 128 == 0);
    CHECK(padded.slice(0, len) == m);
  }
}

TEST_CASE("decrypt with the wrong key does not reproduce the plaintext") {
  SeededRng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const Key128 k1 = Key128::from_bits(rng.next_bits(128));
    const Key128 k2 = Key128::from_bits(rng.next_bits(128));
    REQUIRE(k1 != k2);
    const BitString m = rng.next_bits(256);
    CHECK(decrypt(k2, encrypt(k1, m)).slice(0, 256) != m);
  }
}

TEST_CASE("cipher error paths") {
  const Key128 key{};
  CHECK_THROWS_AS(encrypt(key, BitString()), EmptyPlaintextError);
  CHECK_THROWS_AS(decrypt(key, CipherText{BitString::zeros(127)}), MalformedCiphertextError);
  CHECK_THROWS_AS(decrypt(key, CipherText{BitString::zeros(129)}), MalformedCiphertextError);
  CHECK_THROWS_AS(decrypt(key, CipherText{}), MalformedCiphertextError);
  CHECK_NOTHROW(decrypt(key, CipherText{BitString::zeros(512)}));
}

TEST_CASE("ciphertexts keep their block count through decrypt") {
  SeededRng rng(24);
  const Key128 key = Key128::from_bits(rng.next_bits(128));
  const CipherText ct{rng.next_bits(512)};
  CHECK(decrypt(key, ct).bit_size() == 512);
}

TEST_CASE("check_freshness per the declared predicate, exhaustively") {
  for (Timestamp32 sent = 0; sent <= 4; ++sent) {
    for (Timestamp32 echoed = 0; echoed <= 4; ++echoed) {
      for (Timestamp32 received = 0; received <= 7; ++received) {
        for (std::uint32_t delta = 1; delta <= 3; ++delta) {
          const auto verdict = check_freshness(sent, echoed, received, FreshnessWindow{delta});
          if (echoed != sent) {
            CHECK(verdict == FreshnessVerdict::EchoMismatch);
          } else if (received >= sent && received - sent <= delta) {
            CHECK(verdict == FreshnessVerdict::Fresh);
          } else {
            CHECK(verdict == FreshnessVerdict::WindowExceeded);
          }
        }
      }
    }
  }
}

TEST_CASE("check_freshness boundary cases") {
  const FreshnessWindow w{2};
  CHECK(check_freshness(5, 5, 5, w) == FreshnessVerdict::Fresh);   // zero delay
  CHECK(check_freshness(5, 5, 7, w) == FreshnessVerdict::Fresh);   // delay == window, inclusive
  CHECK(check_freshness(5, 5, 8, w) == FreshnessVerdict::WindowExceeded);
  CHECK(check_freshness(5, 6, 5, w) == FreshnessVerdict::EchoMismatch);
  CHECK(check_freshness(5, 5, 4, w) == FreshnessVerdict::WindowExceeded);  // from the past
}

TEST_CASE("logical clock is monotone") {
  LogicalClock clock(10);
  CHECK(clock.now() == 10);
  clock.advance_to(15);
  CHECK(clock.now() == 15);
  clock.advance_to(12);  // never goes backwards
  CHECK(clock.now() == 15);
}
