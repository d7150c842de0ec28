#include "wban/metrics.hpp"

#include "doctest.h"
#include "wban/entities.hpp"
#include "wban/rng.hpp"

using namespace wban;
using namespace wban::metrics;
using namespace wban::entities;

namespace {

struct InstrumentedRun {
  std::array<OpCounts, kRoleCount> ops{};
  std::array<BitString, 4> wires;
  HandshakeTrace trace;

  // One full authentication (login + steps 1-5) with per-role tallies.
  explicit InstrumentedRun(std::uint64_t seed, bool instrument = true,
                           Identity m_id = 0xA1B2C3D4) {
    SeededRng rng(seed);
    const Identity gw_id = 0x67570001, u_i = 0xB1000001, sn_j = 0xC5001001;
    const Password pw{"pw"};
    const crypto::FreshnessWindow window{2};

    Gateway gw(gw_id, window);
    BitString r_d = rng.next_bits(160);
    const auto creds = gw.register_expert(m_id, blind_password(pw, r_d), rng);
    ExpertDevice expert(m_id, std::move(r_d), creds, window);
    Mobile mobile(u_i, gw.register_mobile(u_i), window);
    const auto reg = gw.register_sensor(u_i, sn_j);
    mobile.add_sensor(reg.mobile_share);
    Sensor sensor(reg.sensor, window);

    auto slot = [&](Role r) -> OpCounts* {
      return instrument ? &ops[static_cast<std::size_t>(r)] : nullptr;
    };
    expert.set_tally(slot(Role::MedicalExpert));
    gw.set_tally(slot(Role::Gateway));
    mobile.set_tally(slot(Role::MobileDevice));
    sensor.set_tally(slot(Role::Sensor));

    REQUIRE(expert.login(m_id, pw));
    const auto req = expert.start_auth(u_i, sn_j, 0, rng).value();
    const auto gm = gw.handle_auth(req, 0).value();
    const auto ms = mobile.forward(gm, 0).value();
    const auto se = sensor.handle(ms, 0).value();
    REQUIRE(expert.finish(se, 0).ok());

    wires = {codec::encode(req), codec::encode(gm), codec::encode(ms), codec::encode(se)};
    trace.completed = true;
    trace.ops = ops;
    for (std::size_t i = 0; i < 4; ++i) trace.wire_bits[i] = wires[i].bit_size();
  }
};

}  // namespace

TEST_CASE("per-role operation counts reproduce the cost table") {
  const InstrumentedRun run(50);
  const RoleCosts costs = count_handshake_ops(run.trace);

  CHECK(costs[Role::MedicalExpert] == OpCounts{4, 2, 5});  // 4 T_H + 2 T_ENC + 5 T_XOR
  CHECK(costs[Role::Gateway] == OpCounts{1, 4, 0});        // 4 T_ENC + T_H
  CHECK(costs[Role::MobileDevice] == OpCounts{0, 2, 0});   // 2 T_ENC
  CHECK(costs[Role::Sensor] == OpCounts{1, 3, 2});         // 3 T_ENC + T_H + 2 T_XOR

  const OpCounts total = costs.total();
  CHECK(total.hash_ops == 6);
  CHECK(total.enc_or_dec_ops == 11);
  CHECK(total.xor_ops == 7);
}

TEST_CASE("live counters agree with the documented op mapping") {
  const InstrumentedRun run(51);
  CHECK(count_handshake_ops(run.trace) == expected_role_costs());

  // the mapping's own sums are the published per-role formulas
  CHECK(expected_ops(Role::MedicalExpert) == OpCounts{4, 2, 5});
  CHECK(expected_ops(Role::Gateway) == OpCounts{1, 4, 0});
  CHECK(expected_ops(Role::MobileDevice) == OpCounts{0, 2, 0});
  CHECK(expected_ops(Role::Sensor) == OpCounts{1, 3, 2});
  CHECK(!op_mapping().empty());
}

TEST_CASE("operation counts are structure-determined") {
  const InstrumentedRun a(52, true, 0xA1000001);
  const InstrumentedRun b(9999, true, 0xAFFFFFFF);
  CHECK(a.ops == b.ops);
}

TEST_CASE("instrumentation does not alter protocol outputs") {
  const InstrumentedRun with(53, true);
  const InstrumentedRun without(53, false);
  for (std::size_t i = 0; i < 4; ++i) CHECK(with.wires[i] == without.wires[i]);
  CHECK(without.ops == std::array<OpCounts, kRoleCount>{});  // nothing tallied
}

TEST_CASE("communication ledger matches the fixed per-hop sizes") {
  const InstrumentedRun run(54);
  const CommLedger ledger = ledger_from_trace(run.trace);
  CHECK(ledger.per_hop == std::array<std::size_t, 4>{672, 288, 288, 160});
  CHECK(ledger.total == 1408);

  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ledger.per_hop[i] == codec::wire_size_bits(static_cast<codec::MessageKind>(i)));
  }
}

TEST_CASE("incomplete traces are refused") {
  HandshakeTrace incomplete;
  CHECK_THROWS_AS(count_handshake_ops(incomplete), TraceError);
  CHECK_THROWS_AS(ledger_from_trace(incomplete), TraceError);
}

TEST_CASE("rendered tables carry the headline numbers") {
  const InstrumentedRun run(55);
  const std::string cost = render_cost_table(count_handshake_ops(run.trace));
  CHECK(cost.find("4T_H + 5T_XOR + 2T_ENC") != std::string::npos);
  CHECK(cost.find("6T_H + 7T_XOR + 11T_ENC") != std::string::npos);

  const std::string comm = render_comm_table(ledger_from_trace(run.trace));
  CHECK(comm.find("672") != std::string::npos);
  CHECK(comm.find("1408") != std::string::npos);
}
