#include "wban/crypto.hpp"

#include <openssl/evp.h>

#include <memory>

namespace wban::crypto {

namespace {

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

std::vector<std::uint8_t> aes_128_ecb(const Key128& key, const std::vector<std::uint8_t>& in,
                                      bool encrypting) {
  CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx) throw std::runtime_error("aes_128_ecb: EVP_CIPHER_CTX_new failed");
  if (EVP_CipherInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.bytes.data(), nullptr,
                        encrypting ? 1 : 0) != 1) {
    throw std::runtime_error("aes_128_ecb: init failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);  // blocks are padded by the caller

  std::vector<std::uint8_t> out(in.size());
  int produced = 0;
  if (EVP_CipherUpdate(ctx.get(), out.data(), &produced, in.data(),
                       static_cast<int>(in.size())) != 1) {
    throw std::runtime_error("aes_128_ecb: update failed");
  }
  int tail = 0;
  if (EVP_CipherFinal_ex(ctx.get(), out.data() + produced, &tail) != 1) {
    throw std::runtime_error("aes_128_ecb: final failed");
  }
  out.resize(static_cast<std::size_t>(produced + tail));
  return out;
}

}  // namespace

Digest160 Digest160::from_bits(const BitString& bits) {
  if (bits.bit_size() != kDigestBits) {
    throw std::invalid_argument("Digest160::from_bits: need exactly 160 bits");
  }
  Digest160 d;
  std::copy(bits.bytes().begin(), bits.bytes().end(), d.bytes.begin());
  return d;
}

Key128 Key128::from_bits(const BitString& bits) {
  if (bits.bit_size() != kKeyBits) {
    throw std::invalid_argument("Key128::from_bits: need exactly 128 bits");
  }
  Key128 k;
  std::copy(bits.bytes().begin(), bits.bytes().end(), k.bytes.begin());
  return k;
}

Key128 Key128::from_hex(std::string_view hex) { return from_bits(BitString::from_hex(hex)); }

Digest160 hash160(const BitString& input) {
  const std::size_t padded_bits = (input.bit_size() + 7) / 8 * 8;
  const BitString normalized =
      input.bit_size() == padded_bits ? input : input.left_padded(padded_bits);

  Digest160 d;
  unsigned int out_len = 0;
  if (EVP_Digest(normalized.bytes().data(), normalized.bytes().size(), d.bytes.data(), &out_len,
                 EVP_sha1(), nullptr) != 1 ||
      out_len != d.bytes.size()) {
    throw std::runtime_error("hash160: EVP_Digest failed");
  }
  return d;
}

Key128 derive_key(const Digest160& digest) {
  Key128 k;
  std::copy(digest.bytes.begin(), digest.bytes.begin() + k.bytes.size(), k.bytes.begin());
  return k;
}

CipherText encrypt(const Key128& key, const BitString& plaintext) {
  if (plaintext.empty()) throw EmptyPlaintextError();
  const std::size_t blocks = (plaintext.bit_size() + kBlockBits - 1) / kBlockBits;
  const BitString padded = plaintext.right_padded(blocks * kBlockBits);
  return CipherText{BitString::from_bytes(aes_128_ecb(key, padded.bytes(), true))};
}

BitString decrypt(const Key128& key, const CipherText& ciphertext) {
  const std::size_t bits = ciphertext.bits.bit_size();
  if (bits == 0 || bits % kBlockBits != 0) throw MalformedCiphertextError(bits);
  return BitString::from_bytes(aes_128_ecb(key, ciphertext.bits.bytes(), false));
}

FreshnessVerdict check_freshness(Timestamp32 t_sent, Timestamp32 t_echoed, Timestamp32 t_received,
                                 FreshnessWindow window) {
  if (t_echoed != t_sent) return FreshnessVerdict::EchoMismatch;
  if (t_received < t_sent || t_received - t_sent > window.delta_seconds) {
    return FreshnessVerdict::WindowExceeded;
  }
  return FreshnessVerdict::Fresh;
}

}  // namespace wban::crypto
