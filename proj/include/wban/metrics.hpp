#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "wban/codec.hpp"

namespace wban::metrics {

enum class Role : std::uint8_t { MedicalExpert, Gateway, MobileDevice, Sensor };
inline constexpr std::size_t kRoleCount = 4;

const char* to_string(Role role);

/// Tally of primitive operations attributed to one principal. Encryption and
/// decryption share one counter, matching the single T_ENC cost symbol for
/// symmetric key encryption/decryption.
struct OpCounts {
  std::uint32_t hash_ops = 0;
  std::uint32_t enc_or_dec_ops = 0;
  std::uint32_t xor_ops = 0;

  OpCounts& operator+=(const OpCounts& o) {
    hash_ops += o.hash_ops;
    enc_or_dec_ops += o.enc_or_dec_ops;
    xor_ops += o.xor_ops;
    return *this;
  }
  friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
  bool operator==(const OpCounts&) const = default;
};

/// Record of one authentication run: per-role operation tallies and the wire
/// size of each of the four handshake messages, in protocol order.
struct HandshakeTrace {
  bool completed = false;
  std::array<OpCounts, kRoleCount> ops{};
  std::array<std::size_t, codec::kMessageKindCount> wire_bits{};
};

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RoleCosts {
  std::array<OpCounts, kRoleCount> by_role{};

  const OpCounts& operator[](Role r) const { return by_role[static_cast<std::size_t>(r)]; }
  OpCounts total() const;
  bool operator==(const RoleCosts&) const = default;
};

/// Per-principal operation counts of a completed honest run.
RoleCosts count_handshake_ops(const HandshakeTrace& trace);

struct CommLedger {
  std::array<std::size_t, codec::kMessageKindCount> per_hop{};
  std::size_t total = 0;
  bool operator==(const CommLedger&) const = default;
};

/// Per-hop bit counts of a completed honest run.
CommLedger ledger_from_trace(const HandshakeTrace& trace);

/// One line of the documented operation mapping: which protocol formula
/// contributes which tallies to which principal. The rows are the audit
/// trail for the per-role totals; live counters must reproduce their sums.
///
/// Conventions: the expert's login recomputation of N*_i is part of the
/// authentication run (2 hash + 3 xor); hashing the raw password down to 160
/// bits is input canonicalization and is not an operation of the scheme;
/// the digest-to-key truncation is a width adapter, not a hash; an xor
/// counts once per invocation regardless of operand width.
struct OpMappingRow {
  Role role;
  const char* formula;
  OpCounts cost;
};

std::span<const OpMappingRow> op_mapping();

/// Sum of the mapping rows for one role.
OpCounts expected_ops(Role role);

RoleCosts expected_role_costs();

std::string render_cost_table(const RoleCosts& costs);
std::string render_comm_table(const CommLedger& ledger);

}  // namespace wban::metrics
