#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>

#include "wban/crypto.hpp"

namespace wban::codec {

/// 32-bit principal identifier (M_id, U_i, SN_j, ID_gw).
using Identity = std::uint32_t;
using crypto::Timestamp32;

inline constexpr std::size_t kIdentityBits = 32;
inline constexpr std::size_t kNonceBits = 64;
inline constexpr std::size_t kTimestampBits = 32;

enum class MessageKind : std::uint8_t {
  AuthRequest,      // expert -> gateway
  GatewayToMobile,  // gateway -> mobile
  MobileToSensor,   // mobile -> sensor
  SensorToExpert,   // sensor -> expert
};

inline constexpr std::size_t kMessageKindCount = 4;
inline constexpr std::size_t kAuthRequestBits = 672;
inline constexpr std::size_t kGatewayToMobileBits = 288;
inline constexpr std::size_t kMobileToSensorBits = 288;
inline constexpr std::size_t kSensorToExpertBits = 160;
inline constexpr std::size_t kHandshakeTotalBits = 1408;

constexpr std::size_t wire_size_bits(MessageKind kind) {
  switch (kind) {
    case MessageKind::AuthRequest: return kAuthRequestBits;
    case MessageKind::GatewayToMobile: return kGatewayToMobileBits;
    case MessageKind::MobileToSensor: return kMobileToSensorBits;
    case MessageKind::SensorToExpert: return kSensorToExpertBits;
  }
  return 0;
}

const char* to_string(MessageKind kind);

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// C = E_Kj[M_id || ID_gw], one block; the expert's long-term credential.
struct CredentialC {
  crypto::CipherText ct;
  auto operator<=>(const CredentialC&) const = default;
};

/// <CID_i, C, T_1>: 512 + 128 + 32 = 672 bits.
struct AuthRequest {
  crypto::CipherText cid;  // E_Kl[H(M_id) || M || U_i || SN_j || C || T_1], 4 blocks
  CredentialC c;
  Timestamp32 t1 = 0;
  bool operator==(const AuthRequest&) const = default;
};

/// <V_i, T_3>: 256 + 32 = 288 bits.
struct GatewayToMobile {
  crypto::CipherText vi;  // E_KGW-U[U_i || SN_j || X || T_3], 2 blocks
  Timestamp32 t3 = 0;
  bool operator==(const GatewayToMobile&) const = default;
};

/// <V'_i, T_5>: 256 + 32 = 288 bits.
struct MobileToSensor {
  crypto::CipherText vi_prime;  // E_KU-SNj[X || U_i || SN_j || T_5], 2 blocks
  Timestamp32 t5 = 0;
  bool operator==(const MobileToSensor&) const = default;
};

/// <L, T_7>: 128 + 32 = 160 bits.
struct SensorToExpert {
  crypto::CipherText l;  // E_Kssk[SN_j || M_id || T_7], 1 block
  Timestamp32 t7 = 0;
  bool operator==(const SensorToExpert&) const = default;
};

using ProtocolMessage = std::variant<AuthRequest, GatewayToMobile, MobileToSensor, SensorToExpert>;

MessageKind kind_of(const ProtocolMessage& msg);

BitString encode(const AuthRequest& msg);
BitString encode(const GatewayToMobile& msg);
BitString encode(const MobileToSensor& msg);
BitString encode(const SensorToExpert& msg);
BitString encode(const ProtocolMessage& msg);

/// Parses a wire string of exactly wire_size_bits(kind); anything else is a
/// SchemaError. Padding inside ciphertext blocks is retained until the
/// decryption side slices fields.
ProtocolMessage decode(MessageKind kind, const BitString& wire);

// Plaintext field groups and their bit-exact layouts. pack_* produce the
// unpadded plaintext; unpack_* accept the block-padded plaintext that
// decryption returns and slice fields at fixed offsets.

struct CidFields {
  crypto::Digest160 expert_id_hash;
  std::uint64_t nonce = 0;
  Identity u_i = 0;
  Identity sn_j = 0;
  CredentialC c;
  Timestamp32 t1 = 0;
};
inline constexpr std::size_t kCidPlainBits = 448;  // 160+64+32+32+128+32, 4 blocks
BitString pack_cid(const CidFields& f);
CidFields unpack_cid(const BitString& padded_plaintext);

struct CredentialFields {
  Identity m_id = 0;
  Identity id_gw = 0;
};
inline constexpr std::size_t kCredentialPlainBits = 64;  // 1 block
BitString pack_credential(const CredentialFields& f);
CredentialFields unpack_credential(const BitString& padded_plaintext);

struct InnerXFields {
  Identity m_id = 0;
  std::uint64_t nonce = 0;
};
inline constexpr std::size_t kInnerXPlainBits = 96;  // 1 block
BitString pack_inner_x(const InnerXFields& f);
InnerXFields unpack_inner_x(const BitString& padded_plaintext);

struct ViFields {
  Identity u_i = 0;
  Identity sn_j = 0;
  crypto::CipherText x;  // 1 block, carried opaque by the mobile
  Timestamp32 t3 = 0;
};
inline constexpr std::size_t kViPlainBits = 224;  // 2 blocks
BitString pack_vi(const ViFields& f);
ViFields unpack_vi(const BitString& padded_plaintext);

struct ViPrimeFields {
  crypto::CipherText x;  // 1 block
  Identity u_i = 0;
  Identity sn_j = 0;
  Timestamp32 t5 = 0;
};
inline constexpr std::size_t kViPrimePlainBits = 224;  // 2 blocks
BitString pack_vi_prime(const ViPrimeFields& f);
ViPrimeFields unpack_vi_prime(const BitString& padded_plaintext);

struct LFields {
  Identity sn_j = 0;
  Identity m_id = 0;
  Timestamp32 t7 = 0;
};
inline constexpr std::size_t kLPlainBits = 96;  // 1 block
BitString pack_l(const LFields& f);
LFields unpack_l(const BitString& padded_plaintext);

// Sealed builders: encrypt the field group and attach the cleartext
// companion timestamp from the same field value, so the encrypted timestamp
// and its echo companion cannot disagree at construction time. Each performs
// exactly one block-cipher invocation.

AuthRequest seal_auth_request(const crypto::Key128& k_l, const CidFields& f);
GatewayToMobile seal_gateway_to_mobile(const crypto::Key128& k_gw_u, const ViFields& f);
MobileToSensor seal_mobile_to_sensor(const crypto::Key128& k_u_snj, const ViPrimeFields& f);
SensorToExpert seal_sensor_to_expert(const crypto::Key128& k_ssk, const LFields& f);

}  // namespace wban::codec
