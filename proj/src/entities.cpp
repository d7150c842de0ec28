#include "wban/entities.hpp"

namespace wban::entities {

namespace {

using crypto::FreshnessVerdict;

// Explicit tallies sit next to the primitive calls they meter so the
// documented op mapping stays auditable against the code. Canonicalization
// hashes (raw password -> 160 bits) and the digest-to-key truncation are
// deliberately not metered; see metrics::op_mapping().
void tally_hash(metrics::OpCounts* t) {
  if (t) ++t->hash_ops;
}
void tally_enc(metrics::OpCounts* t) {
  if (t) ++t->enc_or_dec_ops;
}
void tally_xor(metrics::OpCounts* t, std::uint32_t n = 1) {
  if (t) t->xor_ops += n;
}

RejectReason freshness_reject(FreshnessVerdict v) {
  return v == FreshnessVerdict::EchoMismatch ? RejectReason::EchoMismatch
                                             : RejectReason::WindowExceeded;
}

}  // namespace

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::EchoMismatch: return "echo_mismatch";
    case RejectReason::WindowExceeded: return "window_exceeded";
    case RejectReason::IdentityMismatch: return "identity_mismatch";
    case RejectReason::UnknownCredential: return "unknown_credential";
    case RejectReason::UnknownTarget: return "unknown_target";
    case RejectReason::UnknownSensor: return "unknown_sensor";
    case RejectReason::NotAuthenticated: return "not_authenticated";
    case RejectReason::NoPendingHandshake: return "no_pending_handshake";
    case RejectReason::LoginRejected: return "login_rejected";
  }
  return "?";
}

SessionKey SessionKey::derive(Identity m_id, Identity sn_j, std::uint64_t nonce,
                              metrics::OpCounts* tally) {
  tally_xor(tally, 2);
  const BitString mix = xor_norm(xor_norm(BitString::from_u32(m_id), BitString::from_u32(sn_j)),
                                 BitString::from_u64(nonce));
  tally_hash(tally);
  const crypto::Digest160 digest = crypto::hash160(mix);
  return SessionKey{digest, crypto::derive_key(digest)};
}

crypto::Digest160 blind_password(const Password& pw, const BitString& r_d) {
  const crypto::Digest160 pw_digest = crypto::hash160(BitString::from_text(pw.text));
  return crypto::hash160(xor_norm(pw_digest.to_bits(), r_d));
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(Identity id_gw, crypto::FreshnessWindow window)
    : id_gw_(id_gw), window_(window) {}

crypto::Digest160 Gateway::expert_verifier(Identity m_id, const crypto::Digest160& epw,
                                           const crypto::Key128& s_key) const {
  return crypto::hash160(
      xor_norm(xor_norm(BitString::from_u32(m_id), epw.to_bits()), s_key.to_bits()));
}

bool Gateway::expert_id_registered(Identity m_id) const {
  for (const auto& [c, rec] : experts_) {
    if (rec.m_id == m_id) return true;
  }
  return false;
}

ExpertCredentials Gateway::register_expert(Identity m_id, const crypto::Digest160& epw,
                                           SeededRng& rng) {
  const auto k_j = crypto::Key128::from_bits(rng.next_bits(crypto::kKeyBits));
  const auto k_l = crypto::Key128::from_bits(rng.next_bits(crypto::kKeyBits));
  const auto s_key = crypto::Key128::from_bits(rng.next_bits(crypto::kKeyBits));
  return register_expert_with_keys(m_id, epw, k_j, k_l, s_key);
}

ExpertCredentials Gateway::register_expert_with_keys(Identity m_id, const crypto::Digest160& epw,
                                                     const crypto::Key128& k_j,
                                                     const crypto::Key128& k_l,
                                                     const crypto::Key128& s_key) {
  if (expert_id_registered(m_id)) {
    throw RegistrationError(RegistrationError::Code::AlreadyRegistered,
                            "register_expert: M_id already registered");
  }
  const codec::CredentialC c{crypto::encrypt(k_j, codec::pack_credential({m_id, id_gw_}))};
  const crypto::Digest160 n_i = expert_verifier(m_id, epw, s_key);
  experts_[c.ct.bits] = ExpertRecord{m_id, k_j, k_l, s_key, n_i};
  return ExpertCredentials{c, n_i, s_key, k_j, k_l};
}

crypto::Key128 Gateway::register_mobile(Identity u_i) {
  if (mobiles_.contains(u_i)) {
    throw RegistrationError(RegistrationError::Code::AlreadyRegistered,
                            "register_mobile: U_i already registered");
  }
  const auto k_gw_u = crypto::derive_key(
      crypto::hash160(xor_norm(BitString::from_u32(u_i), BitString::from_u32(id_gw_))));
  mobiles_[u_i] = k_gw_u;
  return k_gw_u;
}

SensorRegistration Gateway::register_sensor(Identity u_i, Identity sn_j) {
  if (!mobiles_.contains(u_i)) {
    throw RegistrationError(RegistrationError::Code::UnknownMobile,
                            "register_sensor: owner mobile is not registered");
  }
  if (sensors_.contains(sn_j)) {
    throw RegistrationError(RegistrationError::Code::AlreadyRegistered,
                            "register_sensor: SN_j already registered");
  }
  const auto k_u_snj = crypto::derive_key(
      crypto::hash160(xor_norm(BitString::from_u32(u_i), BitString::from_u32(sn_j))));
  const auto k_gw_snj = crypto::derive_key(
      crypto::hash160(xor_norm(BitString::from_u32(id_gw_), BitString::from_u32(sn_j))));
  sensors_[sn_j] = SensorRecord{k_gw_snj, k_u_snj, u_i};
  return SensorRegistration{SensorCredentials{u_i, sn_j, k_u_snj, k_gw_snj},
                            MobileSensorShare{sn_j, k_u_snj}};
}

StepResult<codec::GatewayToMobile> Gateway::handle_auth(const codec::AuthRequest& req,
                                                        Timestamp32 now) {
  const auto it = experts_.find(req.c.ct.bits);
  if (it == experts_.end()) return RejectReason::UnknownCredential;
  const ExpertRecord& rec = it->second;

  tally_enc(tally_);
  const codec::CidFields cid = codec::unpack_cid(crypto::decrypt(rec.k_l, req.cid));

  const auto fresh = crypto::check_freshness(req.t1, cid.t1, now, window_);
  if (fresh != FreshnessVerdict::Fresh) return freshness_reject(fresh);

  tally_enc(tally_);
  const codec::CredentialFields cred = codec::unpack_credential(crypto::decrypt(rec.k_j, req.c.ct));
  tally_hash(tally_);
  const crypto::Digest160 id_hash = crypto::hash160(BitString::from_u32(cred.m_id));
  if (id_hash != cid.expert_id_hash || cred.id_gw != id_gw_) {
    return RejectReason::IdentityMismatch;
  }

  const auto mobile = mobiles_.find(cid.u_i);
  if (mobile == mobiles_.end()) return RejectReason::UnknownTarget;
  const auto sensor = sensors_.find(cid.sn_j);
  if (sensor == sensors_.end() || sensor->second.owner != cid.u_i) {
    return RejectReason::UnknownTarget;
  }

  tally_enc(tally_);
  const crypto::CipherText x =
      crypto::encrypt(sensor->second.k_gw_snj, codec::pack_inner_x({cred.m_id, cid.nonce}));
  tally_enc(tally_);
  return codec::seal_gateway_to_mobile(mobile->second, {cid.u_i, cid.sn_j, x, now});
}

crypto::Digest160 Gateway::renew_expert_verifier(Identity m_id, const crypto::Digest160& epw_new) {
  for (auto& [c, rec] : experts_) {
    if (rec.m_id == m_id) {
      rec.n_i = expert_verifier(m_id, epw_new, rec.s_key);
      return rec.n_i;
    }
  }
  throw RegistrationError(RegistrationError::Code::UnknownExpert,
                          "renew_expert_verifier: M_id is not registered");
}

// ---------------------------------------------------------------------------
// ExpertDevice

ExpertDevice::ExpertDevice(Identity m_id, BitString r_d, const ExpertCredentials& creds,
                           crypto::FreshnessWindow window)
    : m_id_(m_id),
      r_d_(std::move(r_d)),
      n_i_(creds.n_i),
      s_key_(creds.s_key),
      k_j_(creds.k_j),
      k_l_(creds.k_l),
      c_(creds.c),
      window_(window) {}

ExpertDevice ExpertDevice::enroll(Gateway& gw, Identity m_id, const Password& pw, SeededRng& rng,
                                  crypto::FreshnessWindow window) {
  BitString r_d = rng.next_bits(crypto::kDigestBits);
  const crypto::Digest160 epw = blind_password(pw, r_d);
  const ExpertCredentials creds = gw.register_expert(m_id, epw, rng);
  return ExpertDevice(m_id, std::move(r_d), creds, window);
}

crypto::Digest160 ExpertDevice::recompute_verifier(Identity m_id, const Password& pw) {
  // N*_i = H(M_id xor H(PW xor r_d) xor S_key); hashing the raw password to
  // 160 bits first is canonicalization, not a metered operation.
  const crypto::Digest160 pw_digest = crypto::hash160(BitString::from_text(pw.text));
  tally_xor(tally_);
  const BitString blinded = xor_norm(pw_digest.to_bits(), r_d_);
  tally_hash(tally_);
  const crypto::Digest160 epw = crypto::hash160(blinded);
  tally_xor(tally_, 2);
  const BitString mix =
      xor_norm(xor_norm(BitString::from_u32(m_id), epw.to_bits()), s_key_.to_bits());
  tally_hash(tally_);
  return crypto::hash160(mix);
}

bool ExpertDevice::login(Identity m_id, const Password& pw) {
  logged_in_ = recompute_verifier(m_id, pw) == n_i_;
  return logged_in_;
}

StepResult<codec::AuthRequest> ExpertDevice::start_auth(Identity u_i, Identity sn_j,
                                                        Timestamp32 now, SeededRng& rng) {
  if (!logged_in_) return RejectReason::NotAuthenticated;
  const std::uint64_t nonce = rng.next_u64();
  tally_hash(tally_);
  const crypto::Digest160 id_hash = crypto::hash160(BitString::from_u32(m_id_));
  tally_enc(tally_);
  codec::AuthRequest req = codec::seal_auth_request(k_l_, {id_hash, nonce, u_i, sn_j, c_, now});
  pending_ = Pending{nonce, u_i, sn_j, now};
  return req;
}

StepResult<SessionKey> ExpertDevice::finish(const codec::SensorToExpert& msg, Timestamp32 now) {
  if (!pending_) return RejectReason::NoPendingHandshake;

  const SessionKey key = SessionKey::derive(m_id_, pending_->sn_j, pending_->nonce, tally_);
  tally_enc(tally_);
  const codec::LFields fields = codec::unpack_l(crypto::decrypt(key.cipher_key, msg.l));

  const auto fresh = crypto::check_freshness(msg.t7, fields.t7, now, window_);
  if (fresh != FreshnessVerdict::Fresh) return freshness_reject(fresh);
  if (fields.sn_j != pending_->sn_j || fields.m_id != m_id_) {
    return RejectReason::IdentityMismatch;
  }

  pending_.reset();
  session_ = key;
  return key;
}

StepResult<std::monostate> ExpertDevice::update_password(Gateway& gw, const Password& old_pw,
                                                         const Password& new_pw, SeededRng& rng) {
  if (recompute_verifier(m_id_, old_pw) != n_i_) return RejectReason::LoginRejected;

  BitString r_d_new = rng.next_bits(crypto::kDigestBits);
  const crypto::Digest160 epw_new = blind_password(new_pw, r_d_new);
  const crypto::Digest160 n_i_new = gw.renew_expert_verifier(m_id_, epw_new);
  r_d_ = std::move(r_d_new);
  n_i_ = n_i_new;
  return std::monostate{};
}

// ---------------------------------------------------------------------------
// Mobile

Mobile::Mobile(Identity u_i, const crypto::Key128& k_gw_u, crypto::FreshnessWindow window)
    : u_i_(u_i), k_gw_u_(k_gw_u), window_(window) {}

void Mobile::add_sensor(const MobileSensorShare& share) {
  sensor_keys_[share.sn_j] = share.k_u_snj;
}

StepResult<codec::MobileToSensor> Mobile::forward(const codec::GatewayToMobile& msg,
                                                  Timestamp32 now) {
  tally_enc(tally_);
  const codec::ViFields fields = codec::unpack_vi(crypto::decrypt(k_gw_u_, msg.vi));

  const auto fresh = crypto::check_freshness(msg.t3, fields.t3, now, window_);
  if (fresh != FreshnessVerdict::Fresh) return freshness_reject(fresh);
  if (fields.u_i != u_i_) return RejectReason::IdentityMismatch;

  const auto key = sensor_keys_.find(fields.sn_j);
  if (key == sensor_keys_.end()) return RejectReason::UnknownSensor;

  // X passes through opaque; the mobile holds no key that opens it.
  tally_enc(tally_);
  return codec::seal_mobile_to_sensor(key->second, {fields.x, u_i_, fields.sn_j, now});
}

// ---------------------------------------------------------------------------
// Sensor

Sensor::Sensor(const SensorCredentials& creds, crypto::FreshnessWindow window)
    : sn_j_(creds.sn_j),
      u_i_(creds.u_i),
      k_u_snj_(creds.k_u_snj),
      k_gw_snj_(creds.k_gw_snj),
      window_(window) {}

StepResult<codec::SensorToExpert> Sensor::handle(const codec::MobileToSensor& msg,
                                                 Timestamp32 now) {
  tally_enc(tally_);
  const codec::ViPrimeFields fields =
      codec::unpack_vi_prime(crypto::decrypt(k_u_snj_, msg.vi_prime));

  // Freshness and identity are checked before X is opened; the verdict is
  // the same either way.
  const auto fresh = crypto::check_freshness(msg.t5, fields.t5, now, window_);
  if (fresh != FreshnessVerdict::Fresh) return freshness_reject(fresh);
  if (fields.sn_j != sn_j_) return RejectReason::IdentityMismatch;

  tally_enc(tally_);
  const codec::InnerXFields inner = codec::unpack_inner_x(crypto::decrypt(k_gw_snj_, fields.x));

  const SessionKey key = SessionKey::derive(inner.m_id, fields.sn_j, inner.nonce, tally_);
  tally_enc(tally_);
  codec::SensorToExpert reply = codec::seal_sensor_to_expert(key.cipher_key, {sn_j_, inner.m_id, now});
  session_ = key;
  return reply;
}

}  // namespace wban::entities
