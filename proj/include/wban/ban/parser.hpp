#pragma once

#include <stdexcept>
#include <string_view>

#include "wban/ban/engine.hpp"

namespace wban::ban {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses one formula in the engine's textual syntax:
///
///   formula  := believes(P, formula) | sees(P, formula) | said(P, formula)
///             | controls(P, formula) | fresh(formula)
///             | shared(A, K, B) | enc(K, formula {, formula}*)
///             | tuple(formula {, formula}*) | symbol
///
/// Symbols are bare identifiers ([A-Za-z0-9_']+). Formula::text() emits this
/// same syntax, so parse(f->text()) reproduces f.
FormulaPtr parse_formula(std::string_view text);

/// Parses a protocol description, one directive per line:
///
///   assume <label>: <formula>
///   message <label>: <sender> -> <receiver> : enc(K, ...)
///   goal <label>: <formula>
///   sessionkey <K> parties <P>/<id-atom> <Q>/<id-atom> ingredients <atom>...
///
/// Blank lines and lines starting with '#' are skipped.
ProtocolSpec parse_protocol(std::string_view text);

}  // namespace wban::ban
