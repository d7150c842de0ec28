#pragma once

#include <memory>
#include <string>
#include <vector>

namespace wban::ban {

using Symbol = std::string;

enum class Kind : std::uint8_t {
  Atom,       // opaque term: a principal, key, nonce, timestamp, or hash value
  Tuple,      // (Y1, ..., Yn)
  Encrypted,  // {Y1, ..., Yn}_K
  Believes,   // P |≡ Y
  Sees,       // P ◁ Y
  Said,       // P |~ Y
  Fresh,      // #(Y)
  Controls,   // P ⇒ Y
  SharedKey,  // P ←K→ Q (unordered pair)
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable BAN statement. SharedKey keeps its parties in written order;
/// `shared(A, K, B)` and `shared(B, K, A)` are distinct statements (rules
/// accept the believing principal in either slot).
class Formula {
 public:
  Kind kind;
  Symbol symbol;                    // Atom name; principal of Believes/Sees/Said/Controls
  Symbol key;                       // Encrypted / SharedKey key symbol
  Symbol party_a, party_b;          // SharedKey parties, party_a <= party_b
  std::vector<FormulaPtr> children; // Tuple/Encrypted members; single wrapped formula otherwise

  /// Canonical textual form; doubles as the equality/ordering key and as the
  /// parseable syntax.
  const std::string& text() const { return text_; }

  static FormulaPtr atom(Symbol name);
  static FormulaPtr tuple(std::vector<FormulaPtr> members);
  static FormulaPtr enc(Symbol key, std::vector<FormulaPtr> members);
  static FormulaPtr believes(Symbol principal, FormulaPtr f);
  static FormulaPtr sees(Symbol principal, FormulaPtr f);
  static FormulaPtr said(Symbol principal, FormulaPtr f);
  static FormulaPtr fresh(FormulaPtr f);
  static FormulaPtr controls(Symbol principal, FormulaPtr f);
  static FormulaPtr shared_key(Symbol a, Symbol key, Symbol b);

 private:
  friend struct FormulaFactory;
  std::string text_;
};

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) { return a->text() == b->text(); }

/// True when `member` occurs among the direct members of tuple/encrypted `f`.
bool has_member(const FormulaPtr& f, const FormulaPtr& member);

}  // namespace wban::ban
