#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wban/entities.hpp"
#include "wban/metrics.hpp"

namespace wban::sim {

using codec::Identity;
using codec::MessageKind;
using crypto::Timestamp32;
using entities::RejectReason;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixed propagation delay per handshake hop, plus optional seeded jitter.
struct HopLatency {
  Timestamp32 expert_to_gw = 1;
  Timestamp32 gw_to_mobile = 1;
  Timestamp32 mobile_to_sensor = 1;
  Timestamp32 sensor_to_expert = 1;
  std::uint32_t jitter_max = 0;
};

struct AdversarySpec {
  enum class Kind : std::uint8_t { Passive, Replay, TamperBit, MasqueradeForge, CompromisedMobile };
  enum class Forge : std::uint8_t { RandomCidGenuineC, RandomC };

  Kind kind = Kind::Passive;
  MessageKind target = MessageKind::AuthRequest;  // Replay / TamperBit
  Timestamp32 replay_delay = 10;                  // Replay: extra in-flight delay
  bool rewrite_cleartext_timestamp = false;       // Replay: refresh the cleartext T_i
  std::size_t tamper_bit = 0;                     // TamperBit: wire bit position
  Forge forge = Forge::RandomCidGenuineC;         // MasqueradeForge
};

/// Post-handshake dummy data traffic used by measure(). Packets ride
/// sensor -> mobile -> gateway -> expert; the patient's mobile serializes
/// its uplink, which is what makes delay grow with sensor count.
struct DataTraffic {
  unsigned packets_per_sensor = 5;
  unsigned packet_bytes = 128;
  std::uint32_t service_seconds = 1;
  std::uint32_t interval_seconds = 1;
};

/// Fixed key material for golden-transcript fixtures; generated experts
/// draw these from the scenario rng instead.
struct ExpertFixture {
  Identity m_id = 0;
  std::string password;
  std::optional<crypto::Key128> k_j, k_l, s_key;
  std::optional<BitString> r_d;  // 160 bits
};

struct PatientFixture {
  Identity u_i = 0;
  std::vector<Identity> sensors;
};

struct ScenarioConfig {
  unsigned experts = 1;
  unsigned patients = 1;
  unsigned sensors_per_patient = 1;
  HopLatency latency;
  std::uint32_t delta_t_seconds = 2;
  std::uint64_t seed = 1;
  unsigned repetitions = 1;
  AdversarySpec adversary;
  DataTraffic data;
  Identity gateway_id = 0x67570001;

  // Explicit principals override the generated counts when non-empty.
  std::vector<ExpertFixture> expert_fixtures;
  std::vector<PatientFixture> patient_fixtures;
};

/// One structured record of the run; serialized as a JSON line.
struct Event {
  Timestamp32 t = 0;
  std::string type;    // send | deliver | reject | suppress | replay | tamper |
                       // forge | key_established | data_send | data_recv | closure
  std::string actor;
  std::string kind;
  std::size_t bits = 0;
  std::string reason;
  std::string detail;
};

struct HandshakeOutcome {
  unsigned number = 0;
  Identity expert = 0, mobile = 0, sensor = 0;
  bool key_established = false;
  std::optional<RejectReason> reject;
  std::string rejected_by;
  std::string expert_key_hex;  // K_ssk digest as confirmed by the expert
  std::string sensor_key_hex;  // K_ssk digest as derived by the sensor
  metrics::HandshakeTrace trace;
};

struct PacketRecord {
  Timestamp32 sent = 0;
  Timestamp32 received = 0;
  std::size_t bits = 0;
};

struct AttackStats {
  unsigned injections = 0;
  unsigned acceptances = 0;
};

struct KnowledgeAudit {
  bool ran = false;
  bool contains_m_id = false;
  bool contains_m = false;
  bool contains_kssk = false;
  bool inversion_recovers_m_id = false;
  bool inversion_recovers_m = false;
  // The forged-relay probe: the compromised mobile re-wraps a captured X as
  // a fresh V'_i with no expert having initiated; the sensor cannot tell,
  // but the expert must refuse the resulting L.
  bool relay_probe_ran = false;
  bool relay_probe_rejected = false;
  std::string relay_probe_reason;
  std::vector<std::string> base_items;
};

struct ScenarioReport {
  std::vector<HandshakeOutcome> handshakes;
  std::vector<Event> events;
  std::vector<PacketRecord> packets;
  AttackStats attack;
  KnowledgeAudit knowledge;
  Timestamp32 end_time = 0;

  unsigned established_count() const;
  unsigned rejected_count() const;
};

struct Measurement {
  double throughput_bytes_per_s = 0.0;
  double eed_seconds = 0.0;
  unsigned packets_received = 0;
  Timestamp32 span_seconds = 0;
};

/// Throughput = (N x |packet|) / T; EED = mean(receive - send). The pure
/// formula over packet timing records, independent of how they were made.
Measurement measurement_from(const std::vector<PacketRecord>& packets, Timestamp32 total_time);

/// Wire bits eligible for ciphertext tampering (the non-timestamp prefix).
std::size_t ciphertext_bits(MessageKind kind);

ScenarioReport run_honest(const ScenarioConfig& config);
ScenarioReport run_replay_attack(const ScenarioConfig& config, MessageKind target,
                                 Timestamp32 extra_delay, bool rewrite_cleartext_timestamp);
ScenarioReport run_tamper_attack(const ScenarioConfig& config, MessageKind target,
                                 std::size_t bit_position);
ScenarioReport run_masquerade_attack(const ScenarioConfig& config, AdversarySpec::Forge forge);
ScenarioReport run_compromised_mobile(const ScenarioConfig& config);

/// Dispatches on config.adversary.kind.
ScenarioReport run_scenario(const ScenarioConfig& config);

/// Honest run followed by the data-traffic phase; reports the throughput and
/// end-to-end delay of the data packets.
Measurement measure(const ScenarioConfig& config, ScenarioReport* report_out = nullptr);

/// Line-delimited structured records: one line per event, one per handshake
/// outcome, one summary line. Field order is stable; identical runs yield
/// identical bytes.
std::string to_jsonl(const ScenarioReport& report);
std::string summary_line(const ScenarioReport& report);

}  // namespace wban::sim
