#pragma once

#include <string_view>

#include "wban/ban/engine.hpp"

namespace wban::ban {

/// The WBAN handshake in the engine's textual syntax: assumptions P1-P20,
/// idealized messages M1-M4, goals G1-G4, and the K_ssk linkage.
std::string_view case_study_source();

/// Parsed form of case_study_source().
ProtocolSpec load_case_study();

}  // namespace wban::ban
