#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wban/ban/formula.hpp"

namespace wban::ban {

/// Inference rules. R1-R4 are the classic BAN rules; the remaining three are
/// the explicit mechanizations this engine needs to replay the case-study
/// proof: seeing through an encryption whose key the principal believes it
/// shares, and the two session-key bridging moves (the "as K_ssk = H(M_id
/// xor SN_j xor M), combining ..." steps), one per direction.
enum class Rule : std::uint8_t {
  R1,             // message-meaning
  R2,             // nonce-verification
  R3,             // freshness-conjunction
  R4,             // jurisdiction
  SeesParts,      // decomposition through a believed shared key
  KeyBridgePeer,  // belief in a tuple naming both parties -> belief in the session key
  KeyBridgeRelay, // beliefs covering all key ingredients -> peer believes the session key
};

const char* to_string(Rule rule);

/// Declares how the session key is linked to protocol material: its symbol,
/// the two end parties (principal symbol plus the identity atom that stands
/// for them inside payloads), and the atoms the key is derived from.
struct LinkParty {
  Symbol principal;
  Symbol id_atom;
};

struct SessionKeyLink {
  Symbol key;
  LinkParty a;
  LinkParty b;
  std::vector<Symbol> ingredients;
};

struct IdealizedMessage {
  std::string label;
  Symbol sender;
  Symbol receiver;
  FormulaPtr payload;  // an Encrypted formula
};

/// A protocol description: labelled assumptions, idealized messages, goals,
/// and the optional session-key linkage for the bridge rules.
struct ProtocolSpec {
  std::vector<std::pair<std::string, FormulaPtr>> assumptions;
  std::vector<IdealizedMessage> messages;
  std::vector<std::pair<std::string, FormulaPtr>> goals;
  std::optional<SessionKeyLink> link;

  /// Copy of the description with the named assumption removed (ablations).
  ProtocolSpec without_assumption(const std::string& label) const;
};

/// One fact of a derivation: seeds carry no rule; derived facts reference
/// their premise steps by index plus, for R3 and SeesParts, the context term
/// the rule was instantiated against.
struct DerivationStep {
  std::string label;
  FormulaPtr fact;
  std::optional<Rule> rule;
  std::vector<std::size_t> premises;
  FormulaPtr context;  // null unless the rule takes one
};

struct DerivationResult {
  std::vector<DerivationStep> steps;
  bool reached_fixpoint = false;
  unsigned facts_derived = 0;  // chaining steps consumed

  std::vector<bool> goal_derived;
  std::vector<std::optional<std::size_t>> goal_step;  // index into steps

  bool inconclusive() const { return !reached_fixpoint; }
  bool all_goals_derived() const;

  /// Chronological indices of every step the goal's derivation rests on.
  std::vector<std::size_t> trace_for(std::size_t goal_idx) const;
};

class Engine {
 public:
  explicit Engine(std::optional<SessionKeyLink> link = {}) : link_(std::move(link)) {}

  /// Applies one rule to concrete premises; nullopt when the premises do not
  /// unify with the rule's patterns. R3 expects {freshness belief, target
  /// tuple}; SeesParts expects {sees fact, key belief, target member}.
  std::optional<FormulaPtr> apply_rule(Rule rule, const std::vector<FormulaPtr>& premises) const;

  /// Exhaustive forward chaining to a fixed point (or until step_limit new
  /// facts have been derived). Seeds are the assumptions plus one
  /// receiver-side Sees fact per idealized message.
  DerivationResult derive(const ProtocolSpec& spec, unsigned step_limit = 10000) const;

  /// Re-validates every derived step of a trace via apply_rule.
  bool validate(const DerivationResult& result) const;

 private:
  std::optional<SessionKeyLink> link_;
};

/// "From P2 and V1 using R1, we get V5: ..." rendering of one goal's trace.
std::string render_trace(const DerivationResult& result, std::size_t goal_idx);

}  // namespace wban::ban
