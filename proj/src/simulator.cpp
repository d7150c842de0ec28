#include "wban/simulator.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "wban/rng.hpp"

namespace wban::sim {

namespace {

using entities::ExpertDevice;
using entities::Gateway;
using entities::Mobile;
using entities::Sensor;
using metrics::Role;
using ordered_json = nlohmann::ordered_json;

constexpr unsigned kNoHandshake = std::numeric_limits<unsigned>::max();

std::string actor_name(Role role, Identity id) {
  return std::string(metrics::to_string(role)) + ":" + std::to_string(id);
}

Role receiving_role(MessageKind kind) {
  switch (kind) {
    case MessageKind::AuthRequest: return Role::Gateway;
    case MessageKind::GatewayToMobile: return Role::MobileDevice;
    case MessageKind::MobileToSensor: return Role::Sensor;
    case MessageKind::SensorToExpert: return Role::MedicalExpert;
  }
  return Role::Gateway;
}

// ---------------------------------------------------------------------------
// Adversary knowledge and its closure.
//
// Every ciphertext the adversary observes carries a tag naming the key it
// was produced under (schema knowledge, Dolev-Yao style) and the layout of
// its plaintext. The closure repeatedly opens any tagged ciphertext whose
// key the adversary holds and files the recovered fields, which may include
// further tagged ciphertexts (X inside V_i). Keys never appear in any
// plaintext, so the held-key set can only grow by explicit grants.

enum class Layout : std::uint8_t { Cid, Credential, Vi, ViPrime, L, InnerX };

struct CtTag {
  std::string key_id;
  Layout layout;
  Identity m_id = 0;  // naming context for nested key ids
  Identity u_i = 0;
  unsigned handshake = 0;
};

struct KnowledgeItem {
  std::string label;
  BitString bits;
  std::optional<CtTag> ct;
};

std::string key_l_id(Identity m_id) { return "K_l/" + std::to_string(m_id); }
std::string key_j_id(Identity m_id) { return "K_j/" + std::to_string(m_id); }
std::string key_gw_u_id(Identity u_i) { return "K_GW-U/" + std::to_string(u_i); }
std::string key_u_sn_id(Identity u_i, Identity sn_j) {
  return "K_U-SN/" + std::to_string(u_i) + "/" + std::to_string(sn_j);
}
std::string key_gw_sn_id(Identity sn_j) { return "K_GW-SN/" + std::to_string(sn_j); }
std::string key_ssk_id(unsigned handshake) { return "K_ssk/h" + std::to_string(handshake); }

class Knowledge {
 public:
  void grant_key(const std::string& id, const crypto::Key128& key) { held_[id] = key; }

  void observe(KnowledgeItem item) {
    const std::string dedupe = item.label + "|" + item.bits.to_hex();
    if (seen_.insert(dedupe).second) items_.push_back(std::move(item));
  }

  void close() {
    bool grew = true;
    while (grew) {
      grew = false;
      const std::size_t n = items_.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (!items_[i].ct || expanded_.contains(items_[i].label)) continue;
        const auto key = held_.find(items_[i].ct->key_id);
        if (key == held_.end()) continue;
        expanded_.insert(items_[i].label);
        expand(items_[i], key->second);
        grew = true;
      }
    }
  }

  bool contains_bits(const BitString& bits) const {
    return std::any_of(items_.begin(), items_.end(),
                       [&](const KnowledgeItem& it) { return it.bits == bits; });
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const auto& it : items_) out.push_back(it.label);
    return out;
  }

 private:
  void expand(const KnowledgeItem& item, const crypto::Key128& key) {
    const CtTag& tag = *item.ct;
    const BitString plain = crypto::decrypt(key, crypto::CipherText{item.bits});
    auto field = [&](const char* name, BitString bits, std::optional<CtTag> ct = std::nullopt) {
      observe(KnowledgeItem{item.label + "." + name, std::move(bits), std::move(ct)});
    };
    switch (tag.layout) {
      case Layout::Cid: {
        const codec::CidFields f = codec::unpack_cid(plain);
        field("h_mid", f.expert_id_hash.to_bits());
        field("m", BitString::from_u64(f.nonce));
        field("u_i", BitString::from_u32(f.u_i));
        field("sn_j", BitString::from_u32(f.sn_j));
        field("c", f.c.ct.bits, CtTag{key_j_id(tag.m_id), Layout::Credential, tag.m_id, tag.u_i,
                                      tag.handshake});
        field("t1", BitString::from_u32(f.t1));
        break;
      }
      case Layout::Credential: {
        const codec::CredentialFields f = codec::unpack_credential(plain);
        field("m_id", BitString::from_u32(f.m_id));
        field("id_gw", BitString::from_u32(f.id_gw));
        break;
      }
      case Layout::Vi: {
        const codec::ViFields f = codec::unpack_vi(plain);
        field("u_i", BitString::from_u32(f.u_i));
        field("sn_j", BitString::from_u32(f.sn_j));
        field("x", f.x.bits,
              CtTag{key_gw_sn_id(f.sn_j), Layout::InnerX, tag.m_id, f.u_i, tag.handshake});
        field("t3", BitString::from_u32(f.t3));
        break;
      }
      case Layout::ViPrime: {
        const codec::ViPrimeFields f = codec::unpack_vi_prime(plain);
        field("x", f.x.bits,
              CtTag{key_gw_sn_id(f.sn_j), Layout::InnerX, tag.m_id, f.u_i, tag.handshake});
        field("u_i", BitString::from_u32(f.u_i));
        field("sn_j", BitString::from_u32(f.sn_j));
        field("t5", BitString::from_u32(f.t5));
        break;
      }
      case Layout::L: {
        const codec::LFields f = codec::unpack_l(plain);
        field("sn_j", BitString::from_u32(f.sn_j));
        field("m_id", BitString::from_u32(f.m_id));
        field("t7", BitString::from_u32(f.t7));
        break;
      }
      case Layout::InnerX: {
        const codec::InnerXFields f = codec::unpack_inner_x(plain);
        field("m_id", BitString::from_u32(f.m_id));
        field("m", BitString::from_u64(f.nonce));
        break;
      }
    }
  }

  std::map<std::string, crypto::Key128> held_;
  std::vector<KnowledgeItem> items_;
  std::set<std::string> seen_;
  std::set<std::string> expanded_;
};

// ---------------------------------------------------------------------------

struct QueuedEvent {
  Timestamp32 t = 0;
  std::uint64_t seq = 0;
  enum class Type : std::uint8_t { StartHandshake, Deliver, DataAtMobile } type = Type::Deliver;
  unsigned hs = kNoHandshake;
  unsigned expert = 0;
  unsigned patient = 0;
  MessageKind kind = MessageKind::AuthRequest;
  BitString wire;
  bool adversarial = false;
  Timestamp32 data_sent = 0;
};

struct EventAfter {
  bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;  // ties broken by insertion order
  }
};

struct ExpertNode {
  Identity m_id = 0;
  entities::Password password;
  entities::ExpertCredentials creds;
  std::optional<ExpertDevice> device;
  std::vector<std::pair<unsigned, unsigned>> assignments;  // (patient, sensor)
  std::size_t next_assignment = 0;
};

struct PatientNode {
  Identity u_i = 0;
  crypto::Key128 k_gw_u;
  std::optional<Mobile> mobile;
  std::vector<Identity> sensor_ids;
  std::vector<entities::SensorRegistration> registrations;
  std::vector<Sensor> sensors;
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, bool with_data)
      : cfg_(config), with_data_(with_data), rng_(config.seed) {
    validate();
    build_world();
  }

  ScenarioReport run() {
    for (unsigned e = 0; e < experts_.size(); ++e) {
      if (!experts_[e].assignments.empty()) {
        push(QueuedEvent{0, next_seq(), QueuedEvent::Type::StartHandshake, kNoHandshake, e});
      }
    }
    drain();

    if (cfg_.adversary.kind == AdversarySpec::Kind::MasqueradeForge) inject_forgeries();
    if (with_data_) run_data_phase();
    if (cfg_.adversary.kind == AdversarySpec::Kind::CompromisedMobile) audit_knowledge();

    report_.end_time = std::max(clock_.now(), last_data_received_);
    return std::move(report_);
  }

 private:
  void validate() const {
    if (cfg_.experts == 0 && cfg_.expert_fixtures.empty()) {
      throw ConfigError("scenario needs at least one medical expert");
    }
    if (cfg_.patients == 0 && cfg_.patient_fixtures.empty()) {
      throw ConfigError("scenario needs at least one patient");
    }
    if (cfg_.sensors_per_patient == 0 && cfg_.patient_fixtures.empty()) {
      throw ConfigError("scenario needs at least one sensor per patient");
    }
    if (cfg_.delta_t_seconds == 0) throw ConfigError("freshness window must be positive");
    if (cfg_.repetitions == 0) throw ConfigError("repetitions must be at least 1");
  }

  void build_world() {
    const crypto::FreshnessWindow window{cfg_.delta_t_seconds};
    gateway_.emplace(cfg_.gateway_id, window);

    std::vector<ExpertFixture> experts = cfg_.expert_fixtures;
    if (experts.empty()) {
      for (unsigned i = 0; i < cfg_.experts; ++i) {
        experts.push_back(ExpertFixture{0xAE000000u + i + 1, "", {}, {}, {}, {}});
      }
    }
    for (const ExpertFixture& fx : experts) {
      ExpertNode node;
      node.m_id = fx.m_id;
      node.password.text = fx.password.empty() ? "pw-" + std::to_string(fx.m_id) : fx.password;
      BitString r_d = fx.r_d ? *fx.r_d : rng_.next_bits(crypto::kDigestBits);
      const crypto::Digest160 epw = entities::blind_password(node.password, r_d);
      if (fx.k_j && fx.k_l && fx.s_key) {
        node.creds = gateway_->register_expert_with_keys(fx.m_id, epw, *fx.k_j, *fx.k_l, *fx.s_key);
      } else {
        node.creds = gateway_->register_expert(fx.m_id, epw, rng_);
      }
      node.device.emplace(fx.m_id, std::move(r_d), node.creds, window);
      experts_.push_back(std::move(node));
    }

    std::vector<PatientFixture> patients = cfg_.patient_fixtures;
    if (patients.empty()) {
      for (unsigned p = 0; p < cfg_.patients; ++p) {
        PatientFixture fx;
        fx.u_i = 0xB1000000u + p + 1;
        for (unsigned s = 0; s < cfg_.sensors_per_patient; ++s) {
          fx.sensors.push_back(0xC5000000u + (p + 1) * 0x1000u + s + 1);
        }
        patients.push_back(std::move(fx));
      }
    }
    for (const PatientFixture& fx : patients) {
      PatientNode node;
      node.u_i = fx.u_i;
      node.k_gw_u = gateway_->register_mobile(fx.u_i);
      node.mobile.emplace(fx.u_i, node.k_gw_u, window);
      for (Identity sn_j : fx.sensors) {
        entities::SensorRegistration reg = gateway_->register_sensor(fx.u_i, sn_j);
        node.mobile->add_sensor(reg.mobile_share);
        node.sensors.emplace_back(reg.sensor, window);
        node.sensor_ids.push_back(sn_j);
        node.registrations.push_back(std::move(reg));
      }
      patients_.push_back(std::move(node));
    }

    // Masquerade repetitions count forgeries, not handshakes; one honest run
    // suffices as the observation phase.
    const unsigned reps =
        cfg_.adversary.kind == AdversarySpec::Kind::MasqueradeForge ? 1 : cfg_.repetitions;
    for (auto& expert : experts_) {
      for (unsigned rep = 0; rep < reps; ++rep) {
        for (unsigned p = 0; p < patients_.size(); ++p) {
          for (unsigned s = 0; s < patients_[p].sensors.size(); ++s) {
            expert.assignments.emplace_back(p, s);
          }
        }
      }
    }
  }

  std::uint64_t next_seq() { return seq_counter_++; }

  void push(QueuedEvent ev) { queue_.push(std::move(ev)); }

  void drain() {
    while (!queue_.empty()) {
      QueuedEvent ev = queue_.top();
      queue_.pop();
      clock_.advance_to(ev.t);
      switch (ev.type) {
        case QueuedEvent::Type::StartHandshake: start_next_handshake(ev.expert); break;
        case QueuedEvent::Type::Deliver: deliver(ev); break;
        case QueuedEvent::Type::DataAtMobile: data_at_mobile(ev); break;
      }
    }
  }

  void log(Timestamp32 t, std::string type, std::string actor, std::string kind = {},
           std::size_t bits = 0, std::string reason = {}, std::string detail = {}) {
    report_.events.push_back(Event{t, std::move(type), std::move(actor), std::move(kind), bits,
                                   std::move(reason), std::move(detail)});
  }

  Timestamp32 hop_latency(MessageKind kind) {
    Timestamp32 base = 0;
    switch (kind) {
      case MessageKind::AuthRequest: base = cfg_.latency.expert_to_gw; break;
      case MessageKind::GatewayToMobile: base = cfg_.latency.gw_to_mobile; break;
      case MessageKind::MobileToSensor: base = cfg_.latency.mobile_to_sensor; break;
      case MessageKind::SensorToExpert: base = cfg_.latency.sensor_to_expert; break;
    }
    if (cfg_.latency.jitter_max > 0) base += rng_.below(cfg_.latency.jitter_max + 1);
    return base;
  }

  HandshakeOutcome& outcome(unsigned hs) { return report_.handshakes[hs]; }

  metrics::OpCounts* tally_for(unsigned hs, Role role) {
    if (hs == kNoHandshake) return nullptr;
    return &outcome(hs).trace.ops[static_cast<std::size_t>(role)];
  }

  void start_next_handshake(unsigned e) {
    ExpertNode& expert = experts_[e];
    if (expert.next_assignment >= expert.assignments.size()) return;
    const auto [p, s] = expert.assignments[expert.next_assignment++];

    const unsigned hs = static_cast<unsigned>(report_.handshakes.size());
    HandshakeOutcome out;
    out.number = hs;
    out.expert = expert.m_id;
    out.mobile = patients_[p].u_i;
    out.sensor = patients_[p].sensor_ids[s];
    report_.handshakes.push_back(std::move(out));
    hs_expert_[hs] = e;
    hs_patient_[hs] = p;
    hs_sensor_[hs] = s;

    const Timestamp32 now = clock_.now();
    ExpertDevice& device = *expert.device;
    device.set_tally(tally_for(hs, Role::MedicalExpert));
    if (!device.login(expert.m_id, expert.password)) {
      device.set_tally(nullptr);
      finish_rejected(hs, RejectReason::LoginRejected, Role::MedicalExpert);
      return;
    }
    auto req = device.start_auth(patients_[p].u_i, patients_[p].sensor_ids[s], now, rng_);
    device.set_tally(nullptr);
    if (!req) {
      finish_rejected(hs, req.reason(), Role::MedicalExpert);
      return;
    }
    send(hs, MessageKind::AuthRequest, codec::encode(req.value()),
         actor_name(Role::MedicalExpert, expert.m_id));
  }

  void send(unsigned hs, MessageKind kind, BitString wire, const std::string& from) {
    const Timestamp32 now = clock_.now();
    const std::size_t idx = static_cast<std::size_t>(kind);
    if (hs != kNoHandshake) outcome(hs).trace.wire_bits[idx] = wire.bit_size();
    log(now, "send", from, codec::to_string(kind), wire.bit_size());

    observe_wire(hs, kind, wire);

    const auto& adv = cfg_.adversary;
    const Timestamp32 latency = hop_latency(kind);

    if (adv.kind == AdversarySpec::Kind::Replay && adv.target == kind) {
      // The adversary holds the message and re-injects it after the extra
      // delay; the original delivery is suppressed.
      log(now, "suppress", "adversary", codec::to_string(kind), wire.bit_size());
      BitString replayed = wire;
      const Timestamp32 inject_at = now + adv.replay_delay;
      std::string detail = "delay=" + std::to_string(adv.replay_delay);
      if (adv.rewrite_cleartext_timestamp) {
        const BitString fresh_ts = BitString::from_u32(inject_at);
        const std::size_t ts_offset = wire.bit_size() - codec::kTimestampBits;
        for (std::size_t i = 0; i < codec::kTimestampBits; ++i) {
          replayed.set_bit(ts_offset + i, fresh_ts.bit(i));
        }
        detail += ",rewritten_ts=" + std::to_string(inject_at);
      }
      log(inject_at, "replay", "adversary", codec::to_string(kind), replayed.bit_size(), "",
          detail);
      ++report_.attack.injections;
      push(QueuedEvent{inject_at + latency, next_seq(), QueuedEvent::Type::Deliver, hs,
                       hs == kNoHandshake ? 0u : hs_expert_[hs],
                       hs == kNoHandshake ? 0u : hs_patient_[hs], kind, std::move(replayed), true});
      return;
    }

    if (adv.kind == AdversarySpec::Kind::TamperBit && adv.target == kind) {
      BitString tampered = wire;
      tampered.flip_bit(adv.tamper_bit);
      log(now, "tamper", "adversary", codec::to_string(kind), tampered.bit_size(), "",
          "bit=" + std::to_string(adv.tamper_bit));
      ++report_.attack.injections;
      if (hs != kNoHandshake) tampered_hs_.insert(hs);
      push(QueuedEvent{now + latency, next_seq(), QueuedEvent::Type::Deliver, hs,
                       hs == kNoHandshake ? 0u : hs_expert_[hs],
                       hs == kNoHandshake ? 0u : hs_patient_[hs], kind, std::move(tampered), true});
      return;
    }

    push(QueuedEvent{now + latency, next_seq(), QueuedEvent::Type::Deliver, hs,
                     hs == kNoHandshake ? 0u : hs_expert_[hs],
                     hs == kNoHandshake ? 0u : hs_patient_[hs], kind, std::move(wire), false});
  }

  void deliver(const QueuedEvent& ev) {
    const Timestamp32 now = clock_.now();
    const Role role = receiving_role(ev.kind);
    const unsigned hs = ev.hs;

    switch (ev.kind) {
      case MessageKind::AuthRequest: {
        const auto msg = std::get<codec::AuthRequest>(codec::decode(ev.kind, ev.wire));
        gateway_->set_tally(tally_for(hs, Role::Gateway));
        const auto res = gateway_->handle_auth(msg, now);
        gateway_->set_tally(nullptr);
        const std::string actor = actor_name(Role::Gateway, cfg_.gateway_id);
        if (!res) {
          reject(ev, actor, role, res.reason());
          return;
        }
        accept(ev, actor);
        if (hs != kNoHandshake) {
          send(hs, MessageKind::GatewayToMobile, codec::encode(res.value()), actor);
        }
        return;
      }
      case MessageKind::GatewayToMobile: {
        const auto msg = std::get<codec::GatewayToMobile>(codec::decode(ev.kind, ev.wire));
        PatientNode& patient = patients_[ev.patient];
        Mobile& mobile = *patient.mobile;
        mobile.set_tally(tally_for(hs, Role::MobileDevice));
        const auto res = mobile.forward(msg, now);
        mobile.set_tally(nullptr);
        const std::string actor = actor_name(Role::MobileDevice, patient.u_i);
        if (!res) {
          reject(ev, actor, role, res.reason());
          return;
        }
        accept(ev, actor);
        if (hs != kNoHandshake) {
          send(hs, MessageKind::MobileToSensor, codec::encode(res.value()), actor);
        }
        return;
      }
      case MessageKind::MobileToSensor: {
        const auto msg = std::get<codec::MobileToSensor>(codec::decode(ev.kind, ev.wire));
        if (hs == kNoHandshake) return;
        Sensor& sensor = patients_[ev.patient].sensors[hs_sensor_[hs]];
        sensor.set_tally(tally_for(hs, Role::Sensor));
        const auto res = sensor.handle(msg, now);
        sensor.set_tally(nullptr);
        const std::string actor = actor_name(Role::Sensor, sensor.id());
        if (!res) {
          reject(ev, actor, role, res.reason());
          return;
        }
        outcome(hs).sensor_key_hex = sensor.session()->digest.to_hex();
        accept(ev, actor);
        send(hs, MessageKind::SensorToExpert, codec::encode(res.value()), actor);
        return;
      }
      case MessageKind::SensorToExpert: {
        const auto msg = std::get<codec::SensorToExpert>(codec::decode(ev.kind, ev.wire));
        if (hs == kNoHandshake) return;
        ExpertNode& expert = experts_[ev.expert];
        ExpertDevice& device = *expert.device;
        device.set_tally(tally_for(hs, Role::MedicalExpert));
        const auto res = device.finish(msg, now);
        device.set_tally(nullptr);
        const std::string actor = actor_name(Role::MedicalExpert, expert.m_id);
        if (!res) {
          reject(ev, actor, role, res.reason());
          return;
        }
        accept(ev, actor);
        HandshakeOutcome& out = outcome(hs);
        out.key_established = true;
        out.expert_key_hex = res.value().digest.to_hex();
        out.trace.completed = true;
        if (tampered_hs_.contains(hs)) ++report_.attack.acceptances;
        log(now, "key_established", actor, "", 0, "", "key=" + out.expert_key_hex);
        push(QueuedEvent{now, next_seq(), QueuedEvent::Type::StartHandshake, kNoHandshake,
                         ev.expert});
        return;
      }
    }
  }

  void accept(const QueuedEvent& ev, const std::string& actor) {
    log(clock_.now(), "deliver", actor, codec::to_string(ev.kind), ev.wire.bit_size(),
        ev.adversarial ? "adversarial" : "");
    if (ev.adversarial && cfg_.adversary.kind == AdversarySpec::Kind::Replay) {
      ++report_.attack.acceptances;
    }
  }

  void reject(const QueuedEvent& ev, const std::string& actor, Role role, RejectReason reason) {
    log(clock_.now(), "reject", actor, codec::to_string(ev.kind), ev.wire.bit_size(),
        entities::to_string(reason), ev.adversarial ? "adversarial" : "");
    if (ev.hs != kNoHandshake) finish_rejected(ev.hs, reason, role);
  }

  void finish_rejected(unsigned hs, RejectReason reason, Role role) {
    HandshakeOutcome& out = outcome(hs);
    out.reject = reason;
    out.rejected_by = metrics::to_string(role);
    push(QueuedEvent{clock_.now(), next_seq(), QueuedEvent::Type::StartHandshake, kNoHandshake,
                     hs_expert_[hs]});
  }

  // Adversarial tap: file the wire's fields, tagged with the keys that
  // sealed them, into the observation pool used by knowledge audits and
  // forgery construction.
  void observe_wire(unsigned hs, MessageKind kind, const BitString& wire) {
    if (cfg_.adversary.kind != AdversarySpec::Kind::CompromisedMobile &&
        cfg_.adversary.kind != AdversarySpec::Kind::MasqueradeForge) {
      return;
    }
    if (hs == kNoHandshake) return;
    const HandshakeOutcome& out = outcome(hs);
    const std::string prefix = "h" + std::to_string(hs) + "." + codec::to_string(kind) + ".";
    auto item = [&](const char* name, BitString bits, std::optional<CtTag> ct = std::nullopt) {
      observations_.push_back(KnowledgeItem{prefix + name, std::move(bits), std::move(ct)});
    };
    switch (kind) {
      case MessageKind::AuthRequest:
        item("cid", wire.slice(0, 512), CtTag{key_l_id(out.expert), Layout::Cid, out.expert,
                                              out.mobile, hs});
        item("c", wire.slice(512, 128),
             CtTag{key_j_id(out.expert), Layout::Credential, out.expert, out.mobile, hs});
        item("t1", wire.slice(640, 32));
        break;
      case MessageKind::GatewayToMobile:
        item("vi", wire.slice(0, 256),
             CtTag{key_gw_u_id(out.mobile), Layout::Vi, out.expert, out.mobile, hs});
        item("t3", wire.slice(256, 32));
        break;
      case MessageKind::MobileToSensor:
        item("vi_prime", wire.slice(0, 256),
             CtTag{key_u_sn_id(out.mobile, out.sensor), Layout::ViPrime, out.expert, out.mobile,
                   hs});
        item("t5", wire.slice(256, 32));
        break;
      case MessageKind::SensorToExpert:
        item("l", wire.slice(0, 128), CtTag{key_ssk_id(hs), Layout::L, out.expert, out.mobile, hs});
        item("t7", wire.slice(128, 32));
        break;
    }
  }

  void inject_forgeries() {
    // The adversary has watched one honest run; it now forges auth requests
    // from random bits, optionally reusing the genuine credential C.
    std::optional<BitString> genuine_c;
    for (const KnowledgeItem& item : observations_) {
      if (item.ct && item.ct->layout == Layout::Credential) {
        genuine_c = item.bits;
        break;
      }
    }
    for (unsigned rep = 0; rep < cfg_.repetitions; ++rep) {
      const Timestamp32 now = clock_.now();
      codec::AuthRequest forged;
      forged.cid = crypto::CipherText{rng_.next_bits(512)};
      if (cfg_.adversary.forge == AdversarySpec::Forge::RandomCidGenuineC && genuine_c) {
        forged.c = codec::CredentialC{crypto::CipherText{*genuine_c}};
      } else {
        forged.c = codec::CredentialC{crypto::CipherText{rng_.next_bits(128)}};
      }
      forged.t1 = now;
      const BitString wire = codec::encode(forged);
      log(now, "forge", "adversary", codec::to_string(MessageKind::AuthRequest), wire.bit_size(),
          "",
          cfg_.adversary.forge == AdversarySpec::Forge::RandomCidGenuineC ? "genuine_c"
                                                                          : "random_c");
      ++report_.attack.injections;
      push(QueuedEvent{now + hop_latency(MessageKind::AuthRequest), next_seq(),
                       QueuedEvent::Type::Deliver, kNoHandshake, 0, 0, MessageKind::AuthRequest,
                       wire, true});
      drain();
      // Forged deliveries reach the gateway outside any handshake; an
      // accepted one would be the security failure we are probing for.
      if (!report_.events.empty() && report_.events.back().type == "deliver") {
        ++report_.attack.acceptances;
      }
    }
  }

  void run_data_phase() {
    if (cfg_.data.packets_per_sensor == 0) return;
    const Timestamp32 start = clock_.now();
    std::vector<Timestamp32> mobile_free(patients_.size(), start);

    // Every established session streams packets_per_sensor dummy packets
    // from its sensor towards its expert.
    for (const HandshakeOutcome& out : report_.handshakes) {
      if (!out.key_established) continue;
      const unsigned p = hs_patient_.at(out.number);
      for (unsigned k = 0; k < cfg_.data.packets_per_sensor; ++k) {
        const Timestamp32 sent = start + k * cfg_.data.interval_seconds;
        const Timestamp32 at_mobile = sent + cfg_.latency.mobile_to_sensor;
        push(QueuedEvent{at_mobile, next_seq(), QueuedEvent::Type::DataAtMobile, out.number, 0, p,
                         MessageKind::AuthRequest, {}, false, sent});
      }
    }
    data_mobile_free_ = std::move(mobile_free);
    drain();
  }

  void data_at_mobile(const QueuedEvent& ev) {
    // The patient's mobile serializes its uplink: one packet per
    // service_seconds, queueing behind whatever is already in flight.
    Timestamp32& free_at = data_mobile_free_[ev.patient];
    const Timestamp32 begin = std::max(clock_.now(), free_at);
    const Timestamp32 depart = begin + cfg_.data.service_seconds;
    free_at = depart;
    const Timestamp32 received = depart + cfg_.latency.gw_to_mobile + cfg_.latency.expert_to_gw;
    const std::size_t bits = static_cast<std::size_t>(cfg_.data.packet_bytes) * 8;
    report_.packets.push_back(PacketRecord{ev.data_sent, received, bits});
    last_data_received_ = std::max(last_data_received_, received);
    log(ev.data_sent, "data_send", actor_name(Role::Sensor, outcome(ev.hs).sensor), "data", bits);
    log(received, "data_recv", actor_name(Role::MedicalExpert, outcome(ev.hs).expert), "data",
        bits);
  }

  void audit_knowledge() {
    // The compromised mobile's starting knowledge: its own two key families
    // plus every wire that crossed a public channel.
    if (patients_.empty()) return;
    const PatientNode& victim = patients_.front();
    report_.knowledge.ran = true;

    Knowledge base;
    base.grant_key(key_gw_u_id(victim.u_i), victim.k_gw_u);
    for (const auto& reg : victim.registrations) {
      base.grant_key(key_u_sn_id(victim.u_i, reg.sensor.sn_j), reg.sensor.k_u_snj);
    }
    for (const KnowledgeItem& item : observations_) base.observe(item);
    base.close();
    report_.knowledge.base_items = base.labels();

    Knowledge inverted = base;
    for (const auto& reg : victim.registrations) {
      inverted.grant_key(key_gw_sn_id(reg.sensor.sn_j), reg.sensor.k_gw_snj);
    }
    inverted.close();

    bool inversion_all_m = true;
    bool inversion_all_mid = true;
    bool any_handshake = false;
    for (const HandshakeOutcome& out : report_.handshakes) {
      if (!out.key_established || out.mobile != victim.u_i) continue;
      any_handshake = true;

      // Ground truth for this handshake's secrets, recovered with the
      // simulator's registration-time key material and cross-checked
      // against the sensor's session digest.
      const auto [m_id_bits, m_bits, kssk] = handshake_secrets(out);

      if (base.contains_bits(m_id_bits)) report_.knowledge.contains_m_id = true;
      if (base.contains_bits(m_bits)) report_.knowledge.contains_m = true;
      if (base.contains_bits(kssk.digest.to_bits()) ||
          base.contains_bits(kssk.cipher_key.to_bits())) {
        report_.knowledge.contains_kssk = true;
      }
      inversion_all_mid &= inverted.contains_bits(m_id_bits);
      inversion_all_m &= inverted.contains_bits(m_bits);
    }
    report_.knowledge.inversion_recovers_m_id = any_handshake && inversion_all_mid;
    report_.knowledge.inversion_recovers_m = any_handshake && inversion_all_m;
    log(clock_.now(), "closure", "adversary", "", 0, "",
        "items=" + std::to_string(report_.knowledge.base_items.size()));

    run_relay_probe(victim);
  }

  // With K_GW-U and K_U-SNj in hand, the compromised mobile can re-wrap a
  // captured X as a well-formed, fresh V'_i that no expert asked for. The
  // sensor has no way to tell and answers with L; the expert, with no
  // pending handshake, must refuse it.
  void run_relay_probe(const PatientNode& victim) {
    const HandshakeOutcome* target = nullptr;
    for (const HandshakeOutcome& out : report_.handshakes) {
      if (out.key_established && out.mobile == victim.u_i) {
        target = &out;
        break;
      }
    }
    if (!target) return;

    const unsigned p = hs_patient_.at(target->number);
    const unsigned s = hs_sensor_.at(target->number);
    const unsigned e = hs_expert_.at(target->number);

    // adversary-side extraction of X: decrypt the observed V_i with the
    // held K_GW-U
    std::optional<BitString> vi_bits;
    const std::string want = "h" + std::to_string(target->number) + ".gateway_to_mobile.vi";
    for (const KnowledgeItem& item : observations_) {
      if (item.label == want) vi_bits = item.bits;
    }
    if (!vi_bits) return;
    const codec::ViFields vi =
        codec::unpack_vi(crypto::decrypt(victim.k_gw_u, crypto::CipherText{*vi_bits}));

    const Timestamp32 now = clock_.now();
    const codec::MobileToSensor forged = codec::seal_mobile_to_sensor(
        victim.registrations[s].sensor.k_u_snj, {vi.x, victim.u_i, vi.sn_j, now});
    log(now, "forge", "adversary", codec::to_string(MessageKind::MobileToSensor),
        codec::encode(forged).bit_size(), "", "replayed_x_without_expert");
    ++report_.attack.injections;

    report_.knowledge.relay_probe_ran = true;
    const auto answer = patients_[p].sensors[s].handle(forged, now);
    if (!answer) {
      // the sensor cannot detect this by design; reaching here would mean
      // the probe itself is malformed
      report_.knowledge.relay_probe_rejected = true;
      report_.knowledge.relay_probe_reason = entities::to_string(answer.reason());
      return;
    }
    log(now, "deliver", actor_name(Role::Sensor, patients_[p].sensor_ids[s]),
        codec::to_string(MessageKind::MobileToSensor), 288, "adversarial");

    const auto confirm = experts_[e].device->finish(answer.value(), now);
    if (confirm.ok()) {
      ++report_.attack.acceptances;
      log(now, "key_established", actor_name(Role::MedicalExpert, experts_[e].m_id), "", 0, "",
          "UNEXPECTED: forged relay accepted");
      return;
    }
    report_.knowledge.relay_probe_rejected = true;
    report_.knowledge.relay_probe_reason = entities::to_string(confirm.reason());
    log(now, "reject", actor_name(Role::MedicalExpert, experts_[e].m_id),
        codec::to_string(MessageKind::SensorToExpert), 160, report_.knowledge.relay_probe_reason,
        "adversarial");
  }

  std::tuple<BitString, BitString, entities::SessionKey> handshake_secrets(
      const HandshakeOutcome& out) const {
    const unsigned p = hs_patient_.at(out.number);
    const unsigned s = hs_sensor_.at(out.number);
    const auto& reg = patients_[p].registrations[s];

    std::optional<BitString> vi_bits;
    const std::string want = "h" + std::to_string(out.number) + ".gateway_to_mobile.vi";
    for (const KnowledgeItem& item : observations_) {
      if (item.label == want) vi_bits = item.bits;
    }
    if (!vi_bits) throw std::logic_error("handshake_secrets: V_i was never observed");

    const codec::ViFields vi =
        codec::unpack_vi(crypto::decrypt(patients_[p].k_gw_u, crypto::CipherText{*vi_bits}));
    const codec::InnerXFields inner =
        codec::unpack_inner_x(crypto::decrypt(reg.sensor.k_gw_snj, vi.x));

    const entities::SessionKey kssk =
        entities::SessionKey::derive(inner.m_id, vi.sn_j, inner.nonce, nullptr);
    if (kssk.digest.to_hex() != out.sensor_key_hex) {
      throw std::logic_error("handshake_secrets: extracted secrets disagree with the session key");
    }
    return {BitString::from_u32(inner.m_id), BitString::from_u64(inner.nonce), kssk};
  }

  const ScenarioConfig cfg_;
  const bool with_data_;
  SeededRng rng_;
  crypto::LogicalClock clock_;
  std::optional<Gateway> gateway_;
  std::vector<ExpertNode> experts_;
  std::vector<PatientNode> patients_;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, EventAfter> queue_;
  std::uint64_t seq_counter_ = 0;
  std::map<unsigned, unsigned> hs_expert_, hs_patient_, hs_sensor_;
  std::set<unsigned> tampered_hs_;
  std::vector<KnowledgeItem> observations_;
  std::vector<Timestamp32> data_mobile_free_;
  Timestamp32 last_data_received_ = 0;

  ScenarioReport report_;
};

}  // namespace

unsigned ScenarioReport::established_count() const {
  return static_cast<unsigned>(std::count_if(handshakes.begin(), handshakes.end(),
                                             [](const auto& h) { return h.key_established; }));
}

unsigned ScenarioReport::rejected_count() const {
  return static_cast<unsigned>(std::count_if(handshakes.begin(), handshakes.end(),
                                             [](const auto& h) { return h.reject.has_value(); }));
}

Measurement measurement_from(const std::vector<PacketRecord>& packets, Timestamp32 total_time) {
  Measurement m;
  m.packets_received = static_cast<unsigned>(packets.size());
  m.span_seconds = total_time;
  if (packets.empty()) return m;

  std::size_t total_bits = 0;
  double delay_sum = 0.0;
  for (const PacketRecord& p : packets) {
    total_bits += p.bits;
    delay_sum += static_cast<double>(p.received - p.sent);
  }
  const double span = total_time > 0 ? static_cast<double>(total_time) : 1.0;
  m.throughput_bytes_per_s = static_cast<double>(total_bits) / 8.0 / span;
  m.eed_seconds = delay_sum / static_cast<double>(packets.size());
  return m;
}

std::size_t ciphertext_bits(MessageKind kind) {
  return wire_size_bits(kind) - codec::kTimestampBits;
}

ScenarioReport run_honest(const ScenarioConfig& config) {
  ScenarioConfig cfg = config;
  cfg.adversary.kind = AdversarySpec::Kind::Passive;
  return Simulation(cfg, false).run();
}

ScenarioReport run_replay_attack(const ScenarioConfig& config, MessageKind target,
                                 Timestamp32 extra_delay, bool rewrite_cleartext_timestamp) {
  if (extra_delay <= config.delta_t_seconds) {
    throw ConfigError("replay delay must exceed the freshness window");
  }
  ScenarioConfig cfg = config;
  cfg.adversary.kind = AdversarySpec::Kind::Replay;
  cfg.adversary.target = target;
  cfg.adversary.replay_delay = extra_delay;
  cfg.adversary.rewrite_cleartext_timestamp = rewrite_cleartext_timestamp;
  return Simulation(cfg, false).run();
}

ScenarioReport run_tamper_attack(const ScenarioConfig& config, MessageKind target,
                                 std::size_t bit_position) {
  if (bit_position >= codec::wire_size_bits(target)) {
    throw ConfigError("tamper bit position exceeds the wire size");
  }
  ScenarioConfig cfg = config;
  cfg.adversary.kind = AdversarySpec::Kind::TamperBit;
  cfg.adversary.target = target;
  cfg.adversary.tamper_bit = bit_position;
  return Simulation(cfg, false).run();
}

ScenarioReport run_masquerade_attack(const ScenarioConfig& config, AdversarySpec::Forge forge) {
  ScenarioConfig cfg = config;
  cfg.adversary.kind = AdversarySpec::Kind::MasqueradeForge;
  cfg.adversary.forge = forge;
  return Simulation(cfg, false).run();
}

ScenarioReport run_compromised_mobile(const ScenarioConfig& config) {
  ScenarioConfig cfg = config;
  cfg.adversary.kind = AdversarySpec::Kind::CompromisedMobile;
  return Simulation(cfg, false).run();
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  switch (config.adversary.kind) {
    case AdversarySpec::Kind::Passive: return run_honest(config);
    case AdversarySpec::Kind::Replay:
      return run_replay_attack(config, config.adversary.target, config.adversary.replay_delay,
                               config.adversary.rewrite_cleartext_timestamp);
    case AdversarySpec::Kind::TamperBit:
      return run_tamper_attack(config, config.adversary.target, config.adversary.tamper_bit);
    case AdversarySpec::Kind::MasqueradeForge:
      return run_masquerade_attack(config, config.adversary.forge);
    case AdversarySpec::Kind::CompromisedMobile: return run_compromised_mobile(config);
  }
  throw ConfigError("unknown adversary kind");
}

Measurement measure(const ScenarioConfig& config, ScenarioReport* report_out) {
  if (config.data.packets_per_sensor == 0) {
    throw ConfigError("measure needs data.packets_per_sensor >= 1");
  }
  ScenarioConfig cfg = config;
  cfg.adversary.kind = AdversarySpec::Kind::Passive;
  ScenarioReport report = Simulation(cfg, true).run();
  const Measurement m = measurement_from(report.packets, report.end_time);
  if (report_out) *report_out = std::move(report);
  return m;
}

namespace {

ordered_json event_json(const Event& ev) {
  ordered_json j;
  j["t"] = ev.t;
  j["event"] = ev.type;
  j["actor"] = ev.actor;
  if (!ev.kind.empty()) j["kind"] = ev.kind;
  if (ev.bits != 0) j["bits"] = ev.bits;
  if (!ev.reason.empty()) j["reason"] = ev.reason;
  if (!ev.detail.empty()) j["detail"] = ev.detail;
  return j;
}

ordered_json handshake_json(const HandshakeOutcome& h) {
  ordered_json j;
  j["event"] = "handshake";
  j["n"] = h.number;
  j["expert"] = h.expert;
  j["mobile"] = h.mobile;
  j["sensor"] = h.sensor;
  j["outcome"] = h.key_established ? "key_established" : "rejected";
  if (h.reject) {
    j["reason"] = entities::to_string(*h.reject);
    j["rejected_by"] = h.rejected_by;
  }
  if (!h.expert_key_hex.empty()) j["key"] = h.expert_key_hex;
  return j;
}

ordered_json summary_json(const ScenarioReport& report) {
  ordered_json j;
  j["event"] = "summary";
  j["handshakes"] = report.handshakes.size();
  j["established"] = report.established_count();
  j["rejected"] = report.rejected_count();
  j["attack_injections"] = report.attack.injections;
  j["attack_acceptances"] = report.attack.acceptances;
  j["per_hop_bits"] = {codec::kAuthRequestBits, codec::kGatewayToMobileBits,
                       codec::kMobileToSensorBits, codec::kSensorToExpertBits};
  j["total_bits"] = codec::kHandshakeTotalBits;
  j["end_time"] = report.end_time;
  if (!report.packets.empty()) {
    const Measurement m = measurement_from(report.packets, report.end_time);
    j["packets"] = m.packets_received;
    j["throughput_bytes_per_s"] = m.throughput_bytes_per_s;
    j["eed_seconds"] = m.eed_seconds;
  }
  if (report.knowledge.ran) {
    j["closure_items"] = report.knowledge.base_items.size();
    j["closure_contains_m_id"] = report.knowledge.contains_m_id;
    j["closure_contains_m"] = report.knowledge.contains_m;
    j["closure_contains_kssk"] = report.knowledge.contains_kssk;
    j["inversion_recovers_m_id"] = report.knowledge.inversion_recovers_m_id;
    j["inversion_recovers_m"] = report.knowledge.inversion_recovers_m;
    if (report.knowledge.relay_probe_ran) {
      j["relay_probe_rejected"] = report.knowledge.relay_probe_rejected;
      j["relay_probe_reason"] = report.knowledge.relay_probe_reason;
    }
  }
  return j;
}

}  // namespace

std::string to_jsonl(const ScenarioReport& report) {
  std::ostringstream out;
  for (const Event& ev : report.events) out << event_json(ev).dump() << "\n";
  for (const HandshakeOutcome& h : report.handshakes) out << handshake_json(h).dump() << "\n";
  out << summary_json(report).dump() << "\n";
  return out.str();
}

std::string summary_line(const ScenarioReport& report) { return summary_json(report).dump(); }

}  // namespace wban::sim
