#include "wban/ban/case_study.hpp"

#include "wban/ban/parser.hpp"

namespace wban::ban {

namespace {

// Principals: MD (medical expert), GW (gateway), Ui (patient's mobile),
// SNj (sensor). Mid and SNj are the identity atoms that appear inside
// payloads; H_Mid is the hashed expert identity, opaque and distinct from
// Mid. X's plaintext (Mid, M) rides inside M2/M3 as a nested encryption.
constexpr std::string_view kCaseStudy = R"(# WBAN end-to-end authentication, BAN-logic case study

sessionkey K_ssk parties MD/Mid SNj/SNj ingredients Mid SNj M

message M1: MD -> GW  : enc(K_l, H_Mid, M, Ui, SNj, C, T1)
message M2: GW -> Ui  : enc(K_GW_U, Ui, SNj, enc(K_GW_SNj, Mid, M), T3)
message M3: Ui -> SNj : enc(K_U_SNj, enc(K_GW_SNj, Mid, M), Ui, SNj, T5)
message M4: SNj -> MD : enc(K_ssk, SNj, Mid, T7)

assume P1:  believes(MD, shared(MD, K_l, GW))
assume P2:  believes(GW, shared(MD, K_l, GW))
assume P3:  believes(MD, shared(MD, K_j, GW))
assume P4:  believes(GW, shared(MD, K_j, GW))
assume P5:  believes(GW, fresh(T1))
assume P6:  believes(GW, fresh(M))
assume P7:  believes(GW, shared(Ui, K_GW_U, GW))
assume P8:  believes(Ui, shared(Ui, K_GW_U, GW))
assume P9:  believes(Ui, fresh(T3))
assume P10: believes(Ui, shared(SNj, K_U_SNj, Ui))
assume P11: believes(SNj, shared(SNj, K_U_SNj, Ui))
assume P12: believes(SNj, fresh(T5))
assume P13: believes(GW, shared(SNj, K_GW_SNj, GW))
assume P14: believes(SNj, shared(SNj, K_GW_SNj, GW))
assume P15: believes(MD, fresh(T7))
assume P16: believes(SNj, shared(SNj, K_ssk, MD))
assume P17: believes(MD, shared(SNj, K_ssk, MD))
assume P18: believes(MD, controls(SNj, shared(MD, K_ssk, SNj)))
assume P19: believes(SNj, controls(MD, shared(MD, K_ssk, SNj)))
assume P20: believes(SNj, fresh(M))

goal G1: believes(MD, believes(SNj, shared(MD, K_ssk, SNj)))
goal G2: believes(SNj, believes(MD, shared(MD, K_ssk, SNj)))
goal G3: believes(MD, shared(MD, K_ssk, SNj))
goal G4: believes(SNj, shared(MD, K_ssk, SNj))
)";

}  // namespace

std::string_view case_study_source() { return kCaseStudy; }

ProtocolSpec load_case_study() { return parse_protocol(kCaseStudy); }

}  // namespace wban::ban
