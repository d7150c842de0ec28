#include "wban/ban/formula.hpp"

#include <algorithm>
#include <sstream>

namespace wban::ban {

namespace {

std::string join_members(const std::vector<FormulaPtr>& members) {
  std::ostringstream out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i > 0) out << ", ";
    out << members[i]->text();
  }
  return out.str();
}

}  // namespace

struct FormulaFactory {
  static FormulaPtr make(Kind kind, Symbol symbol, Symbol key, Symbol pa, Symbol pb,
                         std::vector<FormulaPtr> children, std::string text) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->symbol = std::move(symbol);
    f->key = std::move(key);
    f->party_a = std::move(pa);
    f->party_b = std::move(pb);
    f->children = std::move(children);
    f->text_ = std::move(text);
    return f;
  }
};

FormulaPtr Formula::atom(Symbol name) {
  std::string text = name;
  return FormulaFactory::make(Kind::Atom, std::move(name), {}, {}, {}, {}, std::move(text));
}

FormulaPtr Formula::tuple(std::vector<FormulaPtr> members) {
  if (members.size() == 1) return members.front();  // 1-tuples collapse
  std::string text = "tuple(" + join_members(members) + ")";
  return FormulaFactory::make(Kind::Tuple, {}, {}, {}, {}, std::move(members), std::move(text));
}

FormulaPtr Formula::enc(Symbol key, std::vector<FormulaPtr> members) {
  std::string text = "enc(" + key + ", " + join_members(members) + ")";
  return FormulaFactory::make(Kind::Encrypted, {}, std::move(key), {}, {}, std::move(members),
                              std::move(text));
}

FormulaPtr Formula::believes(Symbol principal, FormulaPtr f) {
  std::string text = "believes(" + principal + ", " + f->text() + ")";
  return FormulaFactory::make(Kind::Believes, std::move(principal), {}, {}, {}, {std::move(f)},
                              std::move(text));
}

FormulaPtr Formula::sees(Symbol principal, FormulaPtr f) {
  std::string text = "sees(" + principal + ", " + f->text() + ")";
  return FormulaFactory::make(Kind::Sees, std::move(principal), {}, {}, {}, {std::move(f)},
                              std::move(text));
}

FormulaPtr Formula::said(Symbol principal, FormulaPtr f) {
  std::string text = "said(" + principal + ", " + f->text() + ")";
  return FormulaFactory::make(Kind::Said, std::move(principal), {}, {}, {}, {std::move(f)},
                              std::move(text));
}

FormulaPtr Formula::fresh(FormulaPtr f) {
  std::string text = "fresh(" + f->text() + ")";
  return FormulaFactory::make(Kind::Fresh, {}, {}, {}, {}, {std::move(f)}, std::move(text));
}

FormulaPtr Formula::controls(Symbol principal, FormulaPtr f) {
  std::string text = "controls(" + principal + ", " + f->text() + ")";
  return FormulaFactory::make(Kind::Controls, std::move(principal), {}, {}, {}, {std::move(f)},
                              std::move(text));
}

FormulaPtr Formula::shared_key(Symbol a, Symbol key, Symbol b) {
  // Party order is kept as written. The bundled case study states some
  // key-sharing beliefs in one orientation and its goals in the other, and
  // its derivation treats them as distinct statements; rules that consume
  // a SharedKey accept the holder in either slot instead.
  std::string text = "shared(" + a + ", " + key + ", " + b + ")";
  return FormulaFactory::make(Kind::SharedKey, {}, std::move(key), std::move(a), std::move(b), {},
                              std::move(text));
}

bool has_member(const FormulaPtr& f, const FormulaPtr& member) {
  if (f->kind != Kind::Tuple && f->kind != Kind::Encrypted) return equal(f, member);
  return std::any_of(f->children.begin(), f->children.end(),
                     [&](const FormulaPtr& m) { return equal(m, member); });
}

}  // namespace wban::ban
