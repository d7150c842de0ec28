#include "wban/codec.hpp"

#include "doctest.h"
#include "wban/rng.hpp"

using namespace wban;
using namespace wban::codec;
using crypto::CipherText;

namespace {

SeededRng& rng() {
  static SeededRng r(31);
  return r;
}

AuthRequest random_auth_request() {
  return AuthRequest{CipherText{rng().next_bits(512)}, CredentialC{CipherText{rng().next_bits(128)}},
                     rng().next_u32()};
}

}  // namespace

TEST_CASE("wire sizes are the fixed per-hop constants") {
  CHECK(wire_size_bits(MessageKind::AuthRequest) == 672);
  CHECK(wire_size_bits(MessageKind::GatewayToMobile) == 288);
  CHECK(wire_size_bits(MessageKind::MobileToSensor) == 288);
  CHECK(wire_size_bits(MessageKind::SensorToExpert) == 160);
  CHECK(wire_size_bits(MessageKind::AuthRequest) + wire_size_bits(MessageKind::GatewayToMobile) +
            wire_size_bits(MessageKind::MobileToSensor) +
            wire_size_bits(MessageKind::SensorToExpert) ==
        1408);
  CHECK(kHandshakeTotalBits == 1408);
}

TEST_CASE("encode/decode round-trips every message kind under fuzzing") {
  for (int trial = 0; trial < 50; ++trial) {
    const AuthRequest a = random_auth_request();
    const BitString wa = encode(a);
    CHECK(wa.bit_size() == 672);
    CHECK(std::get<AuthRequest>(decode(MessageKind::AuthRequest, wa)) == a);

    const GatewayToMobile gm{CipherText{rng().next_bits(256)}, rng().next_u32()};
    const BitString wg = encode(gm);
    CHECK(wg.bit_size() == 288);
    CHECK(std::get<GatewayToMobile>(decode(MessageKind::GatewayToMobile, wg)) == gm);

    const MobileToSensor ms{CipherText{rng().next_bits(256)}, rng().next_u32()};
    CHECK(std::get<MobileToSensor>(decode(MessageKind::MobileToSensor, encode(ms))) == ms);

    const SensorToExpert se{CipherText{rng().next_bits(128)}, rng().next_u32()};
    const BitString ws = encode(se);
    CHECK(ws.bit_size() == 160);
    CHECK(std::get<SensorToExpert>(decode(MessageKind::SensorToExpert, ws)) == se);
  }
}

TEST_CASE("decode gates on the exact wire length") {
  CHECK_THROWS_AS(decode(MessageKind::AuthRequest, BitString::zeros(671)), SchemaError);
  CHECK_THROWS_AS(decode(MessageKind::AuthRequest, BitString::zeros(673)), SchemaError);
  CHECK_THROWS_AS(decode(MessageKind::GatewayToMobile, BitString::zeros(287)), SchemaError);
  CHECK_THROWS_AS(decode(MessageKind::SensorToExpert, BitString::zeros(0)), SchemaError);
  CHECK_NOTHROW(decode(MessageKind::SensorToExpert, BitString::zeros(160)));
}

TEST_CASE("encode rejects width violations") {
  AuthRequest bad = random_auth_request();
  bad.cid = CipherText{rng().next_bits(384)};  // 3 blocks instead of 4
  CHECK_THROWS_AS(encode(bad), SchemaError);

  GatewayToMobile bad2{CipherText{rng().next_bits(128)}, 0};
  CHECK_THROWS_AS(encode(bad2), SchemaError);
}

TEST_CASE("wire field offsets match the documented layout") {
  const AuthRequest a = random_auth_request();
  const BitString wire = encode(a);
  CHECK(wire.slice(0, 512) == a.cid.bits);
  CHECK(wire.slice(512, 128) == a.c.ct.bits);
  CHECK(wire.slice(640, 32).to_u32() == a.t1);

  const GatewayToMobile gm{CipherText{rng().next_bits(256)}, 77};
  const BitString wg = encode(gm);
  CHECK(wg.slice(0, 256) == gm.vi.bits);
  CHECK(wg.slice(256, 32).to_u32() == 77);

  const SensorToExpert se{CipherText{rng().next_bits(128)}, 99};
  const BitString ws = encode(se);
  CHECK(ws.slice(0, 128) == se.l.bits);
  CHECK(ws.slice(128, 32).to_u32() == 99);
}

TEST_CASE("plaintext packers place fields at the documented offsets") {
  CidFields f;
  f.expert_id_hash = crypto::hash160(BitString::from_text("id"));
  f.nonce = 0x1122334455667788ull;
  f.u_i = 0xAAAA0001;
  f.sn_j = 0xBBBB0002;
  f.c = CredentialC{CipherText{rng().next_bits(128)}};
  f.t1 = 42;

  const BitString plain = pack_cid(f);
  REQUIRE(plain.bit_size() == kCidPlainBits);
  CHECK(plain.slice(0, 160) == f.expert_id_hash.to_bits());
  CHECK(plain.slice(160, 64).to_u64() == f.nonce);
  CHECK(plain.slice(224, 32).to_u32() == f.u_i);
  CHECK(plain.slice(256, 32).to_u32() == f.sn_j);
  CHECK(plain.slice(288, 128) == f.c.ct.bits);
  CHECK(plain.slice(416, 32).to_u32() == f.t1);

  // unpack accepts the block-padded form decryption returns
  const CidFields back = unpack_cid(plain.right_padded(512));
  CHECK(back.expert_id_hash == f.expert_id_hash);
  CHECK(back.nonce == f.nonce);
  CHECK(back.u_i == f.u_i);
  CHECK(back.sn_j == f.sn_j);
  CHECK(back.c.ct.bits == f.c.ct.bits);
  CHECK(back.t1 == f.t1);
}

TEST_CASE("remaining pack/unpack pairs round-trip") {
  const BitString cred = pack_credential({0xA1B2C3D4, 0x67570001});
  CHECK(cred.bit_size() == kCredentialPlainBits);
  const CredentialFields cf = unpack_credential(cred.right_padded(128));
  CHECK(cf.m_id == 0xA1B2C3D4);
  CHECK(cf.id_gw == 0x67570001);

  const BitString x = pack_inner_x({0xA1B2C3D4, 0xFEEDFACEDEADBEEFull});
  CHECK(x.bit_size() == kInnerXPlainBits);
  const InnerXFields xf = unpack_inner_x(x.right_padded(128));
  CHECK(xf.m_id == 0xA1B2C3D4);
  CHECK(xf.nonce == 0xFEEDFACEDEADBEEFull);

  const ViFields vf{0xB1000001, 0xC5001001, CipherText{rng().next_bits(128)}, 7};
  const ViFields vb = unpack_vi(pack_vi(vf).right_padded(256));
  CHECK(vb.u_i == vf.u_i);
  CHECK(vb.sn_j == vf.sn_j);
  CHECK(vb.x.bits == vf.x.bits);
  CHECK(vb.t3 == vf.t3);

  const ViPrimeFields pf{CipherText{rng().next_bits(128)}, 0xB1000001, 0xC5001001, 9};
  const ViPrimeFields pb = unpack_vi_prime(pack_vi_prime(pf).right_padded(256));
  CHECK(pb.x.bits == pf.x.bits);
  CHECK(pb.u_i == pf.u_i);
  CHECK(pb.sn_j == pf.sn_j);
  CHECK(pb.t5 == pf.t5);

  const BitString l = pack_l({0xC5001001, 0xA1B2C3D4, 13});
  const LFields lb = unpack_l(l.right_padded(128));
  CHECK(lb.sn_j == 0xC5001001);
  CHECK(lb.m_id == 0xA1B2C3D4);
  CHECK(lb.t7 == 13);
}

TEST_CASE("sealed builders keep the encrypted and cleartext timestamps equal") {
  SeededRng local(5);
  const crypto::Key128 key = crypto::Key128::from_bits(local.next_bits(128));

  CidFields f;
  f.expert_id_hash = crypto::hash160(BitString::from_u32(1));
  f.nonce = local.next_u64();
  f.u_i = 2;
  f.sn_j = 3;
  f.c = CredentialC{CipherText{local.next_bits(128)}};
  f.t1 = 1234;
  const AuthRequest req = seal_auth_request(key, f);
  CHECK(req.t1 == 1234);
  CHECK(unpack_cid(crypto::decrypt(key, req.cid)).t1 == req.t1);

  const ViFields vi{7, 8, CipherText{local.next_bits(128)}, 4321};
  const GatewayToMobile gm = seal_gateway_to_mobile(key, vi);
  CHECK(unpack_vi(crypto::decrypt(key, gm.vi)).t3 == gm.t3);

  const ViPrimeFields vp{CipherText{local.next_bits(128)}, 7, 8, 555};
  const MobileToSensor ms = seal_mobile_to_sensor(key, vp);
  CHECK(unpack_vi_prime(crypto::decrypt(key, ms.vi_prime)).t5 == ms.t5);

  const SensorToExpert se = seal_sensor_to_expert(key, {8, 1, 777});
  CHECK(unpack_l(crypto::decrypt(key, se.l)).t7 == se.t7);
}
