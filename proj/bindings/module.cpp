// Python bindings for the WBAN authentication testbed: the crypto
// primitives, honest/adversarial scenario runners, cost tables, the BAN
// engine, and the throughput/delay measurement.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "wban/ban/case_study.hpp"
#include "wban/ban/parser.hpp"
#include "wban/simulator.hpp"

namespace py = pybind11;
using ordered_json = nlohmann::ordered_json;

namespace {

using wban::BitString;
namespace ban = wban::ban;
namespace codec = wban::codec;
namespace crypto = wban::crypto;
namespace metrics = wban::metrics;
namespace sim = wban::sim;

BitString bits_from_pybytes(const py::bytes& data) {
  const std::string s = data;
  return BitString::from_bytes(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

py::bytes bits_to_pybytes(const BitString& bits) {
  return py::bytes(reinterpret_cast<const char*>(bits.bytes().data()), bits.byte_size());
}

crypto::Key128 key_from_pybytes(const py::bytes& data) {
  const std::string s = data;
  if (s.size() != 16) throw py::value_error("key must be exactly 16 bytes");
  return crypto::Key128::from_bits(
      BitString::from_bytes(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

py::object json_to_py(const ordered_json& j) {
  const py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

sim::ScenarioConfig make_config(std::uint64_t seed, unsigned experts, unsigned patients,
                                unsigned sensors, unsigned repetitions, std::uint32_t delta,
                                std::uint32_t latency) {
  sim::ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.experts = experts;
  cfg.patients = patients;
  cfg.sensors_per_patient = sensors;
  cfg.repetitions = repetitions;
  cfg.delta_t_seconds = delta;
  cfg.latency.expert_to_gw = latency;
  cfg.latency.gw_to_mobile = latency;
  cfg.latency.mobile_to_sensor = latency;
  cfg.latency.sensor_to_expert = latency;
  return cfg;
}

ordered_json report_to_json(const sim::ScenarioReport& report) {
  ordered_json j;
  j["established"] = report.established_count();
  j["rejected"] = report.rejected_count();
  j["attack_injections"] = report.attack.injections;
  j["attack_acceptances"] = report.attack.acceptances;
  j["end_time"] = report.end_time;
  j["handshakes"] = ordered_json::array();
  for (const auto& h : report.handshakes) {
    ordered_json hj;
    hj["n"] = h.number;
    hj["expert"] = h.expert;
    hj["mobile"] = h.mobile;
    hj["sensor"] = h.sensor;
    hj["key_established"] = h.key_established;
    if (h.reject) {
      hj["reason"] = wban::entities::to_string(*h.reject);
      hj["rejected_by"] = h.rejected_by;
    }
    hj["expert_key"] = h.expert_key_hex;
    hj["sensor_key"] = h.sensor_key_hex;
    j["handshakes"].push_back(std::move(hj));
  }
  if (report.knowledge.ran) {
    j["closure"] = ordered_json{{"items", report.knowledge.base_items.size()},
                                {"contains_m_id", report.knowledge.contains_m_id},
                                {"contains_m", report.knowledge.contains_m},
                                {"contains_kssk", report.knowledge.contains_kssk},
                                {"inversion_recovers_m_id", report.knowledge.inversion_recovers_m_id},
                                {"inversion_recovers_m", report.knowledge.inversion_recovers_m},
                                {"relay_probe_rejected", report.knowledge.relay_probe_rejected},
                                {"relay_probe_reason", report.knowledge.relay_probe_reason}};
  }
  return j;
}

codec::MessageKind kind_from_name(const std::string& name) {
  if (name == "auth-request") return codec::MessageKind::AuthRequest;
  if (name == "gateway-to-mobile") return codec::MessageKind::GatewayToMobile;
  if (name == "mobile-to-sensor") return codec::MessageKind::MobileToSensor;
  if (name == "sensor-to-expert") return codec::MessageKind::SensorToExpert;
  throw py::value_error("unknown message kind: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "WBAN end-to-end authentication testbed";

  m.def(
      "hash160",
      [](const py::bytes& data) {
        return bits_to_pybytes(crypto::hash160(bits_from_pybytes(data)).to_bits());
      },
      py::arg("data"), "SHA-1 digest of the input bytes (20 bytes out)");

  m.def(
      "derive_key",
      [](const py::bytes& digest) {
        const std::string s = digest;
        if (s.size() != 20) throw py::value_error("digest must be exactly 20 bytes");
        return bits_to_pybytes(
            crypto::derive_key(crypto::Digest160::from_bits(bits_from_pybytes(digest))).to_bits());
      },
      py::arg("digest"), "128 most significant bits of a 160-bit digest");

  m.def(
      "encrypt",
      [](const py::bytes& key, const py::bytes& plaintext) {
        return bits_to_pybytes(crypto::encrypt(key_from_pybytes(key), bits_from_pybytes(plaintext)).bits);
      },
      py::arg("key"), py::arg("plaintext"),
      "AES-128-ECB with zero right-padding to whole blocks");

  m.def(
      "decrypt",
      [](const py::bytes& key, const py::bytes& ciphertext) {
        return bits_to_pybytes(crypto::decrypt(
            key_from_pybytes(key), crypto::CipherText{bits_from_pybytes(ciphertext)}));
      },
      py::arg("key"), py::arg("ciphertext"), "inverse of encrypt; returns the padded plaintext");

  m.def("wire_size_bits", [](const std::string& kind) {
    return codec::wire_size_bits(kind_from_name(kind));
  });

  m.def("wire_sizes", [] {
    return json_to_py(ordered_json{{"auth_request", codec::kAuthRequestBits},
                                   {"gateway_to_mobile", codec::kGatewayToMobileBits},
                                   {"mobile_to_sensor", codec::kMobileToSensorBits},
                                   {"sensor_to_expert", codec::kSensorToExpertBits},
                                   {"total", codec::kHandshakeTotalBits}});
  });

  m.def(
      "run_handshake",
      [](std::uint64_t seed, unsigned experts, unsigned patients, unsigned sensors,
         unsigned repetitions, std::uint32_t delta, std::uint32_t latency) {
        const auto report = sim::run_honest(
            make_config(seed, experts, patients, sensors, repetitions, delta, latency));
        return json_to_py(report_to_json(report));
      },
      py::arg("seed") = 1, py::arg("experts") = 1, py::arg("patients") = 1, py::arg("sensors") = 1,
      py::arg("repetitions") = 1, py::arg("delta") = 2, py::arg("latency") = 1);

  m.def(
      "handshake_jsonl",
      [](std::uint64_t seed, unsigned experts, unsigned patients, unsigned sensors,
         unsigned repetitions, std::uint32_t delta, std::uint32_t latency) {
        const auto report = sim::run_honest(
            make_config(seed, experts, patients, sensors, repetitions, delta, latency));
        return sim::to_jsonl(report);
      },
      py::arg("seed") = 1, py::arg("experts") = 1, py::arg("patients") = 1, py::arg("sensors") = 1,
      py::arg("repetitions") = 1, py::arg("delta") = 2, py::arg("latency") = 1,
      "line-delimited structured records of an honest run (byte-stable per seed)");

  m.def(
      "run_attack",
      [](const std::string& kind, const std::string& target, std::uint32_t delay, bool rewrite_ts,
         std::size_t bit, const std::string& forge, std::uint64_t seed, unsigned runs,
         std::uint32_t delta, std::uint32_t latency) {
        const sim::ScenarioConfig cfg = make_config(seed, 1, 1, 1, runs, delta, latency);
        sim::ScenarioReport report;
        if (kind == "replay") {
          report = sim::run_replay_attack(cfg, kind_from_name(target), delay, rewrite_ts);
        } else if (kind == "tamper") {
          report = sim::run_tamper_attack(cfg, kind_from_name(target), bit);
        } else if (kind == "masquerade") {
          report = sim::run_masquerade_attack(cfg, forge == "random-c"
                                                       ? sim::AdversarySpec::Forge::RandomC
                                                       : sim::AdversarySpec::Forge::RandomCidGenuineC);
        } else if (kind == "compromised-mobile") {
          report = sim::run_compromised_mobile(cfg);
        } else {
          throw py::value_error("unknown attack kind: " + kind);
        }
        return json_to_py(report_to_json(report));
      },
      py::arg("kind"), py::arg("target") = "auth-request", py::arg("delay") = 10,
      py::arg("rewrite_ts") = false, py::arg("bit") = 0, py::arg("forge") = "random-cid",
      py::arg("seed") = 1, py::arg("runs") = 1, py::arg("delta") = 2, py::arg("latency") = 1);

  m.def(
      "measure",
      [](unsigned experts, unsigned patients, unsigned sensors, unsigned packets,
         std::uint64_t seed, std::uint32_t delta, std::uint32_t latency) {
        sim::ScenarioConfig cfg = make_config(seed, experts, patients, sensors, 1, delta, latency);
        if (packets > 0) cfg.data.packets_per_sensor = packets;
        const sim::Measurement m = sim::measure(cfg);
        return json_to_py(ordered_json{{"throughput_bytes_per_s", m.throughput_bytes_per_s},
                                       {"eed_seconds", m.eed_seconds},
                                       {"packets_received", m.packets_received},
                                       {"span_seconds", m.span_seconds}});
      },
      py::arg("experts") = 1, py::arg("patients") = 1, py::arg("sensors") = 1,
      py::arg("packets") = 5, py::arg("seed") = 1, py::arg("delta") = 2, py::arg("latency") = 1);

  m.def(
      "costs",
      [] {
        const auto report = sim::run_honest(make_config(1, 1, 1, 1, 1, 2, 1));
        const auto& trace = report.handshakes.front().trace;
        const metrics::RoleCosts costs = metrics::count_handshake_ops(trace);
        const metrics::CommLedger ledger = metrics::ledger_from_trace(trace);
        ordered_json j;
        for (std::size_t r = 0; r < metrics::kRoleCount; ++r) {
          const auto& c = costs.by_role[r];
          j[metrics::to_string(static_cast<metrics::Role>(r))] = {
              {"hash_ops", c.hash_ops}, {"enc_or_dec_ops", c.enc_or_dec_ops}, {"xor_ops", c.xor_ops}};
        }
        j["total"] = {{"hash_ops", costs.total().hash_ops},
                      {"enc_or_dec_ops", costs.total().enc_or_dec_ops},
                      {"xor_ops", costs.total().xor_ops}};
        j["per_hop_bits"] = ledger.per_hop;
        j["total_bits"] = ledger.total;
        return json_to_py(j);
      },
      "per-role operation counts and per-hop bits of one instrumented honest run");

  m.def(
      "ban_verify",
      [](const std::vector<std::string>& drop, unsigned steps, const std::string& source) {
        ban::ProtocolSpec spec =
            source.empty() ? ban::load_case_study() : ban::parse_protocol(source);
        for (const auto& label : drop) spec = spec.without_assumption(label);
        const ban::Engine engine(spec.link);
        const ban::DerivationResult result = engine.derive(spec, steps);
        ordered_json goals = ordered_json::object();
        for (std::size_t i = 0; i < spec.goals.size(); ++i) {
          goals[spec.goals[i].first] =
              ordered_json{{"derived", result.goal_derived[i]},
                           {"trace_length",
                            result.goal_derived[i] ? result.trace_for(i).size() : 0}};
        }
        return json_to_py(ordered_json{{"goals", goals},
                                       {"facts_derived", result.facts_derived},
                                       {"inconclusive", result.inconclusive()},
                                       {"all_goals_derived", result.all_goals_derived()}});
      },
      py::arg("drop") = std::vector<std::string>{}, py::arg("steps") = 10000,
      py::arg("source") = std::string{});

  m.def("ban_case_study_source", [] { return std::string(ban::case_study_source()); });
}
