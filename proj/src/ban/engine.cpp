#include "wban/ban/engine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace wban::ban {

namespace {

bool is_party(const SessionKeyLink& link, const Symbol& p) {
  return p == link.a.principal || p == link.b.principal;
}

Symbol other_party(const SessionKeyLink& link, const Symbol& p) {
  return p == link.a.principal ? link.b.principal : link.a.principal;
}

FormulaPtr link_shared(const SessionKeyLink& link) {
  return Formula::shared_key(link.a.principal, link.key, link.b.principal);
}

// believes(R, shared(A, K, B)) with R one of the parties; yields (R, K, other).
struct KeyBelief {
  Symbol holder;
  Symbol key;
  Symbol peer;
};

std::optional<KeyBelief> as_key_belief(const FormulaPtr& f) {
  if (f->kind != Kind::Believes) return std::nullopt;
  const FormulaPtr& inner = f->children.front();
  if (inner->kind != Kind::SharedKey) return std::nullopt;
  if (f->symbol == inner->party_a) return KeyBelief{f->symbol, inner->key, inner->party_b};
  if (f->symbol == inner->party_b) return KeyBelief{f->symbol, inner->key, inner->party_a};
  return std::nullopt;
}

// believes(P, believes(Q, Y)) -> (P, Q, Y)
struct NestedBelief {
  Symbol outer;
  Symbol inner;
  FormulaPtr body;
};

std::optional<NestedBelief> as_nested_belief(const FormulaPtr& f) {
  if (f->kind != Kind::Believes) return std::nullopt;
  const FormulaPtr& inner = f->children.front();
  if (inner->kind != Kind::Believes) return std::nullopt;
  return NestedBelief{f->symbol, inner->symbol, inner->children.front()};
}

void collect_tuples(const FormulaPtr& f, std::map<std::string, FormulaPtr>& out) {
  if (f->kind == Kind::Tuple) out.emplace(f->text(), f);
  if (f->kind == Kind::Encrypted) {
    FormulaPtr payload = Formula::tuple(f->children);
    out.emplace(payload->text(), payload);
  }
  for (const auto& child : f->children) collect_tuples(child, out);
}

bool covers_ingredients(const SessionKeyLink& link, const FormulaPtr& y1, const FormulaPtr& y2) {
  return std::all_of(link.ingredients.begin(), link.ingredients.end(), [&](const Symbol& ing) {
    const FormulaPtr atom = Formula::atom(ing);
    return has_member(y1, atom) || has_member(y2, atom);
  });
}

}  // namespace

const char* to_string(Rule rule) {
  switch (rule) {
    case Rule::R1: return "R1";
    case Rule::R2: return "R2";
    case Rule::R3: return "R3";
    case Rule::R4: return "R4";
    case Rule::SeesParts: return "DEC";
    case Rule::KeyBridgePeer: return "B1";
    case Rule::KeyBridgeRelay: return "B2";
  }
  return "?";
}

ProtocolSpec ProtocolSpec::without_assumption(const std::string& label) const {
  ProtocolSpec copy = *this;
  std::erase_if(copy.assumptions, [&](const auto& a) { return a.first == label; });
  return copy;
}

std::optional<FormulaPtr> Engine::apply_rule(Rule rule, const std::vector<FormulaPtr>& p) const {
  switch (rule) {
    case Rule::R1: {
      // R believes R <-K-> S,  R sees {Y}_K  =>  R believes S said Y
      if (p.size() != 2) return std::nullopt;
      const auto kb = as_key_belief(p[0]);
      if (!kb) return std::nullopt;
      if (p[1]->kind != Kind::Sees || p[1]->symbol != kb->holder) return std::nullopt;
      const FormulaPtr& enc = p[1]->children.front();
      if (enc->kind != Kind::Encrypted || enc->key != kb->key) return std::nullopt;
      return Formula::believes(kb->holder,
                               Formula::said(kb->peer, Formula::tuple(enc->children)));
    }
    case Rule::R2: {
      // R believes #(Y),  R believes S said Y  =>  R believes S believes Y
      if (p.size() != 2) return std::nullopt;
      if (p[0]->kind != Kind::Believes || p[0]->children.front()->kind != Kind::Fresh) {
        return std::nullopt;
      }
      if (p[1]->kind != Kind::Believes || p[1]->children.front()->kind != Kind::Said) {
        return std::nullopt;
      }
      if (p[0]->symbol != p[1]->symbol) return std::nullopt;
      const FormulaPtr& y_fresh = p[0]->children.front()->children.front();
      const FormulaPtr& said = p[1]->children.front();
      if (!equal(y_fresh, said->children.front())) return std::nullopt;
      return Formula::believes(p[0]->symbol,
                               Formula::believes(said->symbol, said->children.front()));
    }
    case Rule::R3: {
      // R believes #(Y)  =>  R believes #(T) for a tuple T containing Y
      if (p.size() != 2) return std::nullopt;
      if (p[0]->kind != Kind::Believes || p[0]->children.front()->kind != Kind::Fresh) {
        return std::nullopt;
      }
      const FormulaPtr& y = p[0]->children.front()->children.front();
      const FormulaPtr& target = p[1];
      if (target->kind != Kind::Tuple || equal(target, y) || !has_member(target, y)) {
        return std::nullopt;
      }
      return Formula::believes(p[0]->symbol, Formula::fresh(target));
    }
    case Rule::R4: {
      // R believes S controls Y,  R believes S believes Y  =>  R believes Y
      if (p.size() != 2) return std::nullopt;
      if (p[0]->kind != Kind::Believes || p[0]->children.front()->kind != Kind::Controls) {
        return std::nullopt;
      }
      const auto nested = as_nested_belief(p[1]);
      if (!nested || nested->outer != p[0]->symbol) return std::nullopt;
      const FormulaPtr& ctrl = p[0]->children.front();
      if (ctrl->symbol != nested->inner) return std::nullopt;
      if (!equal(ctrl->children.front(), nested->body)) return std::nullopt;
      return Formula::believes(nested->outer, nested->body);
    }
    case Rule::SeesParts: {
      // R sees {Y1..Yn}_K,  R believes R <-K-> S  =>  R sees Yi
      if (p.size() != 3) return std::nullopt;
      if (p[0]->kind != Kind::Sees) return std::nullopt;
      const FormulaPtr& enc = p[0]->children.front();
      if (enc->kind != Kind::Encrypted) return std::nullopt;
      const auto kb = as_key_belief(p[1]);
      if (!kb || kb->holder != p[0]->symbol || kb->key != enc->key) return std::nullopt;
      if (!has_member(enc, p[2])) return std::nullopt;
      return Formula::sees(p[0]->symbol, p[2]);
    }
    case Rule::KeyBridgePeer: {
      // P believes Q believes Y, Y names both end parties, P and Q are the
      // end parties  =>  P believes Q believes the session key is shared.
      if (!link_ || p.size() != 1) return std::nullopt;
      const auto nested = as_nested_belief(p[0]);
      if (!nested) return std::nullopt;
      if (!is_party(*link_, nested->outer) || !is_party(*link_, nested->inner) ||
          nested->outer == nested->inner) {
        return std::nullopt;
      }
      if (nested->body->kind != Kind::Tuple) return std::nullopt;
      if (!has_member(nested->body, Formula::atom(link_->a.id_atom)) ||
          !has_member(nested->body, Formula::atom(link_->b.id_atom))) {
        return std::nullopt;
      }
      return Formula::believes(nested->outer,
                               Formula::believes(nested->inner, link_shared(*link_)));
    }
    case Rule::KeyBridgeRelay: {
      // P believes Q1 believes Y1,  P believes Q2 believes Y2,  the bodies
      // jointly carry every key ingredient  =>  P believes the peer believes
      // the session key is shared.
      if (!link_ || p.size() != 2) return std::nullopt;
      const auto n1 = as_nested_belief(p[0]);
      const auto n2 = as_nested_belief(p[1]);
      if (!n1 || !n2 || n1->outer != n2->outer) return std::nullopt;
      if (!is_party(*link_, n1->outer)) return std::nullopt;
      if (n1->body->kind != Kind::Tuple || n2->body->kind != Kind::Tuple) return std::nullopt;
      if (!covers_ingredients(*link_, n1->body, n2->body)) return std::nullopt;
      return Formula::believes(
          n1->outer, Formula::believes(other_party(*link_, n1->outer), link_shared(*link_)));
    }
  }
  return std::nullopt;
}

DerivationResult Engine::derive(const ProtocolSpec& spec, unsigned step_limit) const {
  DerivationResult result;
  std::map<std::string, std::size_t> index;
  bool overflow = false;
  unsigned derived_labels = 0;

  auto add = [&](FormulaPtr fact, std::optional<Rule> rule, std::vector<std::size_t> premises,
                 FormulaPtr context, std::string label = {}) -> bool {
    if (index.contains(fact->text())) return false;
    if (rule) {
      if (result.facts_derived >= step_limit) {
        overflow = true;
        return false;
      }
      ++result.facts_derived;
      label = "V" + std::to_string(++derived_labels);
    } else if (label.empty()) {
      label = "V" + std::to_string(++derived_labels);
    }
    index.emplace(fact->text(), result.steps.size());
    result.steps.push_back(
        DerivationStep{std::move(label), std::move(fact), rule, std::move(premises), context});
    return true;
  };

  for (const auto& [label, f] : spec.assumptions) add(f, std::nullopt, {}, nullptr, label);
  for (const auto& msg : spec.messages) {
    add(Formula::sees(msg.receiver, msg.payload), std::nullopt, {}, nullptr);
  }

  // Tuples eligible as R3 lifting targets: every tuple (and encryption
  // payload) in the subformula closure of the seeds and goals.
  std::map<std::string, FormulaPtr> tuples;
  for (const auto& [label, f] : spec.assumptions) collect_tuples(f, tuples);
  for (const auto& msg : spec.messages) collect_tuples(msg.payload, tuples);
  for (const auto& [label, f] : spec.goals) collect_tuples(f, tuples);

  bool changed = true;
  while (changed && !overflow) {
    changed = false;
    const std::size_t n = result.steps.size();

    for (std::size_t i = 0; i < n; ++i) {
      // copies, not references: add() grows the steps vector
      const FormulaPtr fi = result.steps[i].fact;

      // Unary-driven rules.
      if (auto got = apply_rule(Rule::KeyBridgePeer, {fi})) {
        changed |= add(*got, Rule::KeyBridgePeer, {i}, nullptr);
      }
      for (const auto& [text, tuple] : tuples) {
        if (auto got = apply_rule(Rule::R3, {fi, tuple})) {
          changed |= add(*got, Rule::R3, {i}, tuple);
        }
      }

      for (std::size_t j = 0; j < n; ++j) {
        const FormulaPtr fj = result.steps[j].fact;
        if (auto got = apply_rule(Rule::R1, {fi, fj})) {
          changed |= add(*got, Rule::R1, {i, j}, nullptr);
        }
        if (auto got = apply_rule(Rule::R2, {fi, fj})) {
          changed |= add(*got, Rule::R2, {i, j}, nullptr);
        }
        if (auto got = apply_rule(Rule::R4, {fi, fj})) {
          changed |= add(*got, Rule::R4, {i, j}, nullptr);
        }
        if (auto got = apply_rule(Rule::KeyBridgeRelay, {fi, fj})) {
          changed |= add(*got, Rule::KeyBridgeRelay, {i, j}, nullptr);
        }
        if (fi->kind == Kind::Sees && fi->children.front()->kind == Kind::Encrypted) {
          for (const auto& member : fi->children.front()->children) {
            if (auto got = apply_rule(Rule::SeesParts, {fi, fj, member})) {
              changed |= add(*got, Rule::SeesParts, {i, j}, member);
            }
          }
        }
      }
    }
  }

  result.reached_fixpoint = !overflow;
  for (const auto& [label, goal] : spec.goals) {
    const auto it = index.find(goal->text());
    result.goal_derived.push_back(it != index.end());
    result.goal_step.push_back(it != index.end() ? std::optional(it->second) : std::nullopt);
  }
  return result;
}

bool Engine::validate(const DerivationResult& result) const {
  for (const auto& step : result.steps) {
    if (!step.rule) continue;
    std::vector<FormulaPtr> premises;
    for (std::size_t idx : step.premises) {
      if (idx >= result.steps.size()) return false;
      premises.push_back(result.steps[idx].fact);
    }
    if (step.context) premises.push_back(step.context);
    const auto got = apply_rule(*step.rule, premises);
    if (!got || !equal(*got, step.fact)) return false;
  }
  return true;
}

bool DerivationResult::all_goals_derived() const {
  return !goal_derived.empty() &&
         std::all_of(goal_derived.begin(), goal_derived.end(), [](bool b) { return b; });
}

std::vector<std::size_t> DerivationResult::trace_for(std::size_t goal_idx) const {
  std::vector<std::size_t> order;
  if (goal_idx >= goal_step.size() || !goal_step[goal_idx]) return order;
  std::set<std::size_t> seen;
  std::vector<std::size_t> stack{*goal_step[goal_idx]};
  while (!stack.empty()) {
    const std::size_t idx = stack.back();
    stack.pop_back();
    if (!seen.insert(idx).second) continue;
    for (std::size_t p : steps[idx].premises) stack.push_back(p);
  }
  order.assign(seen.begin(), seen.end());
  return order;  // ascending == chronological; premises precede conclusions
}

std::string render_trace(const DerivationResult& result, std::size_t goal_idx) {
  std::ostringstream out;
  for (std::size_t idx : result.trace_for(goal_idx)) {
    const DerivationStep& step = result.steps[idx];
    if (!step.rule) {
      out << step.label << ": " << step.fact->text() << "\n";
      continue;
    }
    out << "From ";
    for (std::size_t i = 0; i < step.premises.size(); ++i) {
      if (i > 0) out << " and ";
      out << result.steps[step.premises[i]].label;
    }
    out << " using " << to_string(*step.rule) << ", we get " << step.label << ": "
        << step.fact->text() << "\n";
  }
  return out.str();
}

}  // namespace wban::ban
