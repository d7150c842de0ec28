#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "wban/codec.hpp"
#include "wban/crypto.hpp"
#include "wban/metrics.hpp"
#include "wban/rng.hpp"

namespace wban::entities {

using codec::Identity;
using crypto::Timestamp32;

/// Why a principal refused to act on a message. The two freshness reasons
/// correspond to a stale request: the echoed timestamp disagreed with the
/// cleartext companion, or the transit delay exceeded the window.
enum class RejectReason : std::uint8_t {
  EchoMismatch,
  WindowExceeded,
  IdentityMismatch,
  UnknownCredential,
  UnknownTarget,
  UnknownSensor,
  NotAuthenticated,
  NoPendingHandshake,
  LoginRejected,
};

const char* to_string(RejectReason reason);

constexpr bool is_freshness_reject(RejectReason r) {
  return r == RejectReason::EchoMismatch || r == RejectReason::WindowExceeded;
}

/// Either the step's product or the reason the principal stopped. A rejected
/// step leaves the principal's state untouched; nothing is emitted after an
/// error verdict.
template <typename T>
class StepResult {
 public:
  StepResult(T value) : state_(std::move(value)) {}
  StepResult(RejectReason reason) : state_(reason) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const { return std::get<T>(state_); }
  RejectReason reason() const { return std::get<RejectReason>(state_); }

 private:
  std::variant<T, RejectReason> state_;
};

struct RegistrationError : std::runtime_error {
  enum class Code { AlreadyRegistered, UnknownMobile, UnknownExpert };
  Code code;
  RegistrationError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
};

struct Password {
  std::string text;
};

/// Per-session key shared by expert and sensor:
/// K_ssk = H(M_id xor SN_j xor M), with the 128-bit cipher form used for L.
struct SessionKey {
  crypto::Digest160 digest;
  crypto::Key128 cipher_key;

  static SessionKey derive(Identity m_id, Identity sn_j, std::uint64_t nonce,
                           metrics::OpCounts* tally);
  bool operator==(const SessionKey&) const = default;
};

/// What the gateway hands a medical expert at registration.
struct ExpertCredentials {
  codec::CredentialC c;
  crypto::Digest160 n_i;
  crypto::Key128 s_key;
  crypto::Key128 k_j;
  crypto::Key128 k_l;
};

struct SensorCredentials {
  Identity u_i = 0;
  Identity sn_j = 0;
  crypto::Key128 k_u_snj;
  crypto::Key128 k_gw_snj;
};

/// The mobile's share of a sensor registration. Deliberately excludes
/// K_GW-SNj: the semi-trusted mobile must not be able to open X.
struct MobileSensorShare {
  Identity sn_j = 0;
  crypto::Key128 k_u_snj;
};

struct SensorRegistration {
  SensorCredentials sensor;
  MobileSensorShare mobile_share;
};

/// Device-side blinding of the password before it leaves for the gateway:
/// EPW = H(H(PW) xor r_d). The raw password is first hashed to 160 bits so
/// the xor operand widths are canonical.
crypto::Digest160 blind_password(const Password& pw, const BitString& r_d);

/// Trusted registration and authentication server.
class Gateway {
 public:
  explicit Gateway(Identity id_gw, crypto::FreshnessWindow window = {});

  Identity id() const { return id_gw_; }

  ExpertCredentials register_expert(Identity m_id, const crypto::Digest160& epw, SeededRng& rng);
  ExpertCredentials register_expert_with_keys(Identity m_id, const crypto::Digest160& epw,
                                              const crypto::Key128& k_j, const crypto::Key128& k_l,
                                              const crypto::Key128& s_key);
  crypto::Key128 register_mobile(Identity u_i);
  SensorRegistration register_sensor(Identity u_i, Identity sn_j);

  /// Step 2: look up C, open CID_i, verify freshness and identities, check
  /// that SN_j is registered under the claimed U_i, then build X and V_i.
  StepResult<codec::GatewayToMobile> handle_auth(const codec::AuthRequest& req, Timestamp32 now);

  /// Password-update phase, gateway side: N_i^new = H(M_id xor EPW^new xor S_key).
  crypto::Digest160 renew_expert_verifier(Identity m_id, const crypto::Digest160& epw_new);

  void set_tally(metrics::OpCounts* tally) { tally_ = tally; }

 private:
  struct ExpertRecord {
    Identity m_id;
    crypto::Key128 k_j;
    crypto::Key128 k_l;
    crypto::Key128 s_key;
    crypto::Digest160 n_i;
  };
  struct SensorRecord {
    crypto::Key128 k_gw_snj;
    crypto::Key128 k_u_snj;
    Identity owner;
  };

  crypto::Digest160 expert_verifier(Identity m_id, const crypto::Digest160& epw,
                                    const crypto::Key128& s_key) const;
  bool expert_id_registered(Identity m_id) const;

  Identity id_gw_;
  crypto::FreshnessWindow window_;
  std::map<BitString, ExpertRecord> experts_;  // keyed by the credential C bits
  std::map<Identity, crypto::Key128> mobiles_;
  std::map<Identity, SensorRecord> sensors_;
  metrics::OpCounts* tally_ = nullptr;
};

/// The medical expert's authorized device: long-term credentials, the login
/// gate, and the initiator side of the handshake. One handshake may be
/// pending at a time; starting a new one replaces a stale attempt.
class ExpertDevice {
 public:
  ExpertDevice(Identity m_id, BitString r_d, const ExpertCredentials& creds,
               crypto::FreshnessWindow window = {});

  /// Device-side enrollment: pick r_d, blind the password, register with the
  /// gateway over the assumed-secure channel, store what comes back.
  static ExpertDevice enroll(Gateway& gw, Identity m_id, const Password& pw, SeededRng& rng,
                             crypto::FreshnessWindow window = {});

  /// Step 1 gate: recompute N*_i from the supplied credentials and compare
  /// with the stored verifier.
  bool login(Identity m_id, const Password& pw);

  /// Step 1: draw the nonce M, seal CID_i under K_l, remember the pending
  /// handshake.
  StepResult<codec::AuthRequest> start_auth(Identity u_i, Identity sn_j, Timestamp32 now,
                                            SeededRng& rng);

  /// Step 5: derive K_ssk from the pending state, open L, verify freshness
  /// and identities, confirm the session.
  StepResult<SessionKey> finish(const codec::SensorToExpert& msg, Timestamp32 now);

  /// Password-update phase. Rejects (state unchanged) if the old password
  /// fails the login check.
  StepResult<std::monostate> update_password(Gateway& gw, const Password& old_pw,
                                             const Password& new_pw, SeededRng& rng);

  Identity id() const { return m_id_; }
  bool logged_in() const { return logged_in_; }
  bool has_pending() const { return pending_.has_value(); }
  const codec::CredentialC& credential() const { return c_; }
  const std::optional<SessionKey>& session() const { return session_; }

  void set_tally(metrics::OpCounts* tally) { tally_ = tally; }

 private:
  crypto::Digest160 recompute_verifier(Identity m_id, const Password& pw);

  struct Pending {
    std::uint64_t nonce;
    Identity u_i;
    Identity sn_j;
    Timestamp32 t1;
  };

  Identity m_id_;
  BitString r_d_;
  crypto::Digest160 n_i_;
  crypto::Key128 s_key_;
  crypto::Key128 k_j_;
  crypto::Key128 k_l_;
  codec::CredentialC c_;
  crypto::FreshnessWindow window_;
  bool logged_in_ = false;
  std::optional<Pending> pending_;
  std::optional<SessionKey> session_;
  metrics::OpCounts* tally_ = nullptr;
};

/// The patient's semi-trusted phone: relays between gateway and sensor and
/// re-wraps X without ever being able to open it.
class Mobile {
 public:
  Mobile(Identity u_i, const crypto::Key128& k_gw_u, crypto::FreshnessWindow window = {});

  void add_sensor(const MobileSensorShare& share);

  /// Step 3: open V_i, verify freshness and that the message is addressed to
  /// this mobile, then re-wrap the opaque X under K_U-SNj.
  StepResult<codec::MobileToSensor> forward(const codec::GatewayToMobile& msg, Timestamp32 now);

  Identity id() const { return u_i_; }

  void set_tally(metrics::OpCounts* tally) { tally_ = tally; }

 private:
  Identity u_i_;
  crypto::Key128 k_gw_u_;
  std::map<Identity, crypto::Key128> sensor_keys_;
  crypto::FreshnessWindow window_;
  metrics::OpCounts* tally_ = nullptr;
};

/// Body sensor node: terminates the forward pass, derives the session key,
/// and answers the expert with L.
class Sensor {
 public:
  explicit Sensor(const SensorCredentials& creds, crypto::FreshnessWindow window = {});

  /// Step 4: open V'_i, verify freshness and own identity, open X, derive
  /// K_ssk and answer with L.
  StepResult<codec::SensorToExpert> handle(const codec::MobileToSensor& msg, Timestamp32 now);

  Identity id() const { return sn_j_; }
  Identity owner() const { return u_i_; }
  const std::optional<SessionKey>& session() const { return session_; }

  void set_tally(metrics::OpCounts* tally) { tally_ = tally; }

 private:
  Identity sn_j_;
  Identity u_i_;
  crypto::Key128 k_u_snj_;
  crypto::Key128 k_gw_snj_;
  crypto::FreshnessWindow window_;
  std::optional<SessionKey> session_;
  metrics::OpCounts* tally_ = nullptr;
};

}  // namespace wban::entities
