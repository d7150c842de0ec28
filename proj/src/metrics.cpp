#include "wban/metrics.hpp"

#include <sstream>

namespace wban::metrics {

namespace {

constexpr OpMappingRow kOpMapping[] = {
    {Role::MedicalExpert, "login: EPW = H(PW xor r_d)", {1, 0, 1}},
    {Role::MedicalExpert, "login: N*_i = H(M_id xor EPW xor S_key)", {1, 0, 2}},
    {Role::MedicalExpert, "step 1: H(M_id)", {1, 0, 0}},
    {Role::MedicalExpert, "step 1: CID_i = E_Kl[H(M_id)||M||U_i||SN_j||C||T_1]", {0, 1, 0}},
    {Role::MedicalExpert, "step 5: K_ssk = H(M_id xor SN_j xor M)", {1, 0, 2}},
    {Role::MedicalExpert, "step 5: D_Kssk[L]", {0, 1, 0}},
    {Role::Gateway, "step 2: D_Kl[CID_i]", {0, 1, 0}},
    {Role::Gateway, "step 2: D_Kj[C]", {0, 1, 0}},
    {Role::Gateway, "step 2: H(M*_id)", {1, 0, 0}},
    {Role::Gateway, "step 2: X = E_KGW-SNj[M_id||M]", {0, 1, 0}},
    {Role::Gateway, "step 2: V_i = E_KGW-U[U_i||SN_j||X||T_3]", {0, 1, 0}},
    {Role::MobileDevice, "step 3: D_KGW-U[V_i]", {0, 1, 0}},
    {Role::MobileDevice, "step 3: V'_i = E_KU-SNj[X||U_i||SN_j||T_5]", {0, 1, 0}},
    {Role::Sensor, "step 4: D_KU-SNj[V'_i]", {0, 1, 0}},
    {Role::Sensor, "step 4: D_KGW-SNj[X]", {0, 1, 0}},
    {Role::Sensor, "step 4: K_ssk = H(M*_id xor SN*_j xor M*)", {1, 0, 2}},
    {Role::Sensor, "step 4: L = E_Kssk[SN_j||M_id||T_7]", {0, 1, 0}},
};

std::string cost_formula(const OpCounts& c) {
  std::ostringstream out;
  bool first = true;
  auto term = [&](std::uint32_t n, const char* sym) {
    if (n == 0) return;
    if (!first) out << " + ";
    if (n > 1) out << n;
    out << sym;
    first = false;
  };
  term(c.hash_ops, "T_H");
  term(c.xor_ops, "T_XOR");
  term(c.enc_or_dec_ops, "T_ENC");
  if (first) out << "0";
  return out.str();
}

}  // namespace

const char* to_string(Role role) {
  switch (role) {
    case Role::MedicalExpert: return "medical_expert";
    case Role::Gateway: return "gateway";
    case Role::MobileDevice: return "mobile_device";
    case Role::Sensor: return "sensor";
  }
  return "?";
}

OpCounts RoleCosts::total() const {
  OpCounts sum;
  for (const auto& c : by_role) sum += c;
  return sum;
}

RoleCosts count_handshake_ops(const HandshakeTrace& trace) {
  if (!trace.completed) throw TraceError("count_handshake_ops: trace is not a completed run");
  return RoleCosts{trace.ops};
}

CommLedger ledger_from_trace(const HandshakeTrace& trace) {
  if (!trace.completed) throw TraceError("ledger_from_trace: trace is not a completed run");
  CommLedger ledger;
  ledger.per_hop = trace.wire_bits;
  for (std::size_t bits : ledger.per_hop) ledger.total += bits;
  return ledger;
}

std::span<const OpMappingRow> op_mapping() { return kOpMapping; }

OpCounts expected_ops(Role role) {
  OpCounts sum;
  for (const auto& row : kOpMapping) {
    if (row.role == role) sum += row.cost;
  }
  return sum;
}

RoleCosts expected_role_costs() {
  RoleCosts costs;
  for (std::size_t r = 0; r < kRoleCount; ++r) {
    costs.by_role[r] = expected_ops(static_cast<Role>(r));
  }
  return costs;
}

std::string render_cost_table(const RoleCosts& costs) {
  std::ostringstream out;
  out << "Node            | Computation cost\n";
  out << "----------------+-----------------\n";
  static const char* names[] = {"Medical expert", "Gateway", "Mobile device", "Sensor"};
  for (std::size_t r = 0; r < kRoleCount; ++r) {
    out << names[r];
    for (std::size_t pad = std::string(names[r]).size(); pad < 16; ++pad) out << ' ';
    out << "| " << cost_formula(costs.by_role[r]) << "\n";
  }
  out << "Total           | " << cost_formula(costs.total()) << "\n";
  return out.str();
}

std::string render_comm_table(const CommLedger& ledger) {
  std::ostringstream out;
  out << "Communication between nodes | Cost (bits)\n";
  out << "----------------------------+------------\n";
  static const char* hops[] = {"M_id -> GW", "GW -> U_i", "U_i -> SN_j", "SN_j -> M_id"};
  for (std::size_t i = 0; i < ledger.per_hop.size(); ++i) {
    out << hops[i];
    for (std::size_t pad = std::string(hops[i]).size(); pad < 28; ++pad) out << ' ';
    out << "| " << ledger.per_hop[i] << "\n";
  }
  out << "Total                       | " << ledger.total << "\n";
  return out.str();
}

}  // namespace wban::metrics
