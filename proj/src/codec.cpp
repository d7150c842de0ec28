#include "wban/codec.hpp"

namespace wban::codec {

namespace {

using crypto::CipherText;

void require_blocks(const CipherText& ct, std::size_t blocks, const char* what) {
  if (ct.bits.bit_size() != blocks * crypto::kBlockBits) {
    throw SchemaError(std::string(what) + ": expected " + std::to_string(blocks) +
                      " cipher block(s), got " + std::to_string(ct.bits.bit_size()) + " bits");
  }
}

void require_wire(const BitString& wire, MessageKind kind) {
  if (wire.bit_size() != wire_size_bits(kind)) {
    throw SchemaError(std::string("decode ") + to_string(kind) + ": expected " +
                      std::to_string(wire_size_bits(kind)) + " bits, got " +
                      std::to_string(wire.bit_size()));
  }
}

BitString ts_bits(Timestamp32 t) { return BitString::from_u32(t); }

}  // namespace

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::AuthRequest: return "auth_request";
    case MessageKind::GatewayToMobile: return "gateway_to_mobile";
    case MessageKind::MobileToSensor: return "mobile_to_sensor";
    case MessageKind::SensorToExpert: return "sensor_to_expert";
  }
  return "?";
}

MessageKind kind_of(const ProtocolMessage& msg) {
  return static_cast<MessageKind>(msg.index());
}

BitString encode(const AuthRequest& msg) {
  require_blocks(msg.cid, 4, "AuthRequest.cid");
  require_blocks(msg.c.ct, 1, "AuthRequest.c");
  return concat(msg.cid.bits, msg.c.ct.bits, ts_bits(msg.t1));
}

BitString encode(const GatewayToMobile& msg) {
  require_blocks(msg.vi, 2, "GatewayToMobile.vi");
  return concat(msg.vi.bits, ts_bits(msg.t3));
}

BitString encode(const MobileToSensor& msg) {
  require_blocks(msg.vi_prime, 2, "MobileToSensor.vi_prime");
  return concat(msg.vi_prime.bits, ts_bits(msg.t5));
}

BitString encode(const SensorToExpert& msg) {
  require_blocks(msg.l, 1, "SensorToExpert.l");
  return concat(msg.l.bits, ts_bits(msg.t7));
}

BitString encode(const ProtocolMessage& msg) {
  return std::visit([](const auto& m) { return encode(m); }, msg);
}

ProtocolMessage decode(MessageKind kind, const BitString& wire) {
  require_wire(wire, kind);
  switch (kind) {
    case MessageKind::AuthRequest:
      return AuthRequest{CipherText{wire.slice(0, 512)}, CredentialC{CipherText{wire.slice(512, 128)}},
                         wire.slice(640, 32).to_u32()};
    case MessageKind::GatewayToMobile:
      return GatewayToMobile{CipherText{wire.slice(0, 256)}, wire.slice(256, 32).to_u32()};
    case MessageKind::MobileToSensor:
      return MobileToSensor{CipherText{wire.slice(0, 256)}, wire.slice(256, 32).to_u32()};
    case MessageKind::SensorToExpert:
      return SensorToExpert{CipherText{wire.slice(0, 128)}, wire.slice(128, 32).to_u32()};
  }
  throw SchemaError("decode: unknown message kind");
}

BitString pack_cid(const CidFields& f) {
  require_blocks(f.c.ct, 1, "CidFields.c");
  return concat(f.expert_id_hash.to_bits(), BitString::from_u64(f.nonce),
                BitString::from_u32(f.u_i), BitString::from_u32(f.sn_j), f.c.ct.bits,
                ts_bits(f.t1));
}

CidFields unpack_cid(const BitString& padded) {
  if (padded.bit_size() < kCidPlainBits) throw SchemaError("unpack_cid: plaintext too short");
  CidFields f;
  f.expert_id_hash = crypto::Digest160::from_bits(padded.slice(0, 160));
  f.nonce = padded.slice(160, 64).to_u64();
  f.u_i = padded.slice(224, 32).to_u32();
  f.sn_j = padded.slice(256, 32).to_u32();
  f.c = CredentialC{CipherText{padded.slice(288, 128)}};
  f.t1 = padded.slice(416, 32).to_u32();
  return f;
}

BitString pack_credential(const CredentialFields& f) {
  return concat(BitString::from_u32(f.m_id), BitString::from_u32(f.id_gw));
}

CredentialFields unpack_credential(const BitString& padded) {
  if (padded.bit_size() < kCredentialPlainBits) {
    throw SchemaError("unpack_credential: plaintext too short");
  }
  return CredentialFields{padded.slice(0, 32).to_u32(), padded.slice(32, 32).to_u32()};
}

BitString pack_inner_x(const InnerXFields& f) {
  return concat(BitString::from_u32(f.m_id), BitString::from_u64(f.nonce));
}

InnerXFields unpack_inner_x(const BitString& padded) {
  if (padded.bit_size() < kInnerXPlainBits) throw SchemaError("unpack_inner_x: plaintext too short");
  return InnerXFields{padded.slice(0, 32).to_u32(), padded.slice(32, 64).to_u64()};
}

BitString pack_vi(const ViFields& f) {
  require_blocks(f.x, 1, "ViFields.x");
  return concat(BitString::from_u32(f.u_i), BitString::from_u32(f.sn_j), f.x.bits, ts_bits(f.t3));
}

ViFields unpack_vi(const BitString& padded) {
  if (padded.bit_size() < kViPlainBits) throw SchemaError("unpack_vi: plaintext too short");
  ViFields f;
  f.u_i = padded.slice(0, 32).to_u32();
  f.sn_j = padded.slice(32, 32).to_u32();
  f.x = CipherText{padded.slice(64, 128)};
  f.t3 = padded.slice(192, 32).to_u32();
  return f;
}

BitString pack_vi_prime(const ViPrimeFields& f) {
  require_blocks(f.x, 1, "ViPrimeFields.x");
  return concat(f.x.bits, BitString::from_u32(f.u_i), BitString::from_u32(f.sn_j), ts_bits(f.t5));
}

ViPrimeFields unpack_vi_prime(const BitString& padded) {
  if (padded.bit_size() < kViPrimePlainBits) {
    throw SchemaError("unpack_vi_prime: plaintext too short");
  }
  ViPrimeFields f;
  f.x = CipherText{padded.slice(0, 128)};
  f.u_i = padded.slice(128, 32).to_u32();
  f.sn_j = padded.slice(160, 32).to_u32();
  f.t5 = padded.slice(192, 32).to_u32();
  return f;
}

BitString pack_l(const LFields& f) {
  return concat(BitString::from_u32(f.sn_j), BitString::from_u32(f.m_id), ts_bits(f.t7));
}

LFields unpack_l(const BitString& padded) {
  if (padded.bit_size() < kLPlainBits) throw SchemaError("unpack_l: plaintext too short");
  return LFields{padded.slice(0, 32).to_u32(), padded.slice(32, 32).to_u32(),
                 padded.slice(64, 32).to_u32()};
}

AuthRequest seal_auth_request(const crypto::Key128& k_l, const CidFields& f) {
  return AuthRequest{crypto::encrypt(k_l, pack_cid(f)), f.c, f.t1};
}

GatewayToMobile seal_gateway_to_mobile(const crypto::Key128& k_gw_u, const ViFields& f) {
  return GatewayToMobile{crypto::encrypt(k_gw_u, pack_vi(f)), f.t3};
}

MobileToSensor seal_mobile_to_sensor(const crypto::Key128& k_u_snj, const ViPrimeFields& f) {
  return MobileToSensor{crypto::encrypt(k_u_snj, pack_vi_prime(f)), f.t5};
}

SensorToExpert seal_sensor_to_expert(const crypto::Key128& k_ssk, const LFields& f) {
  return SensorToExpert{crypto::encrypt(k_ssk, pack_l(f)), f.t7};
}

}  // namespace wban::codec
