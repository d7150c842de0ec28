#include "wban/ban/parser.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace wban::ban {

namespace {

bool is_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = formula();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw ParseError("formula parse error at offset " + std::to_string(pos_) + ": " + why +
                     " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  Symbol symbol() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_symbol_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a symbol");
    return Symbol(text_.substr(start, pos_ - start));
  }

  std::vector<FormulaPtr> formula_list() {
    std::vector<FormulaPtr> members;
    members.push_back(formula());
    while (eat(',')) members.push_back(formula());
    return members;
  }

  FormulaPtr formula() {
    const Symbol head = symbol();
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '(') return Formula::atom(head);
    expect('(');

    FormulaPtr result;
    if (head == "believes" || head == "sees" || head == "said" || head == "controls") {
      const Symbol principal = symbol();
      expect(',');
      FormulaPtr body = formula();
      if (head == "believes") result = Formula::believes(principal, body);
      else if (head == "sees") result = Formula::sees(principal, body);
      else if (head == "said") result = Formula::said(principal, body);
      else result = Formula::controls(principal, body);
    } else if (head == "fresh") {
      result = Formula::fresh(formula());
    } else if (head == "shared") {
      const Symbol a = symbol();
      expect(',');
      const Symbol key = symbol();
      expect(',');
      const Symbol b = symbol();
      result = Formula::shared_key(a, key, b);
    } else if (head == "enc") {
      const Symbol key = symbol();
      expect(',');
      result = Formula::enc(key, formula_list());
    } else if (head == "tuple") {
      result = Formula::tuple(formula_list());
    } else {
      fail("unknown constructor '" + head + "'");
    }
    expect(')');
    return result;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

FormulaPtr parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

ProtocolSpec parse_protocol(std::string_view text) {
  ProtocolSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  auto split_label = [&](std::string_view rest) -> std::pair<std::string, std::string> {
    const std::size_t colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected '<label>: ...'");
    }
    return {strip(rest.substr(0, colon)), strip(rest.substr(colon + 1))};
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;

    const std::size_t sp = t.find(' ');
    const std::string directive = t.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : strip(t.substr(sp + 1));

    if (directive == "assume") {
      auto [label, body] = split_label(rest);
      spec.assumptions.emplace_back(label, parse_formula(body));
    } else if (directive == "goal") {
      auto [label, body] = split_label(rest);
      spec.goals.emplace_back(label, parse_formula(body));
    } else if (directive == "message") {
      auto [label, body] = split_label(rest);
      const std::size_t arrow = body.find("->");
      const std::size_t colon = body.find(':', arrow == std::string::npos ? 0 : arrow);
      if (arrow == std::string::npos || colon == std::string::npos) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected 'message <label>: A -> B : <formula>'");
      }
      IdealizedMessage msg;
      msg.label = label;
      msg.sender = strip(body.substr(0, arrow));
      msg.receiver = strip(body.substr(arrow + 2, colon - arrow - 2));
      msg.payload = parse_formula(strip(body.substr(colon + 1)));
      if (msg.payload->kind != Kind::Encrypted) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": idealized message payload must be enc(...)");
      }
      spec.messages.push_back(std::move(msg));
    } else if (directive == "sessionkey") {
      std::istringstream words(rest);
      SessionKeyLink link;
      std::string word;
      words >> link.key >> word;
      if (word != "parties") {
        throw ParseError("line " + std::to_string(line_no) + ": expected 'parties'");
      }
      auto read_party = [&]() -> LinkParty {
        std::string pair;
        words >> pair;
        const std::size_t slash = pair.find('/');
        if (slash == std::string::npos) {
          throw ParseError("line " + std::to_string(line_no) +
                           ": expected '<principal>/<id-atom>'");
        }
        return LinkParty{pair.substr(0, slash), pair.substr(slash + 1)};
      };
      link.a = read_party();
      link.b = read_party();
      words >> word;
      if (word != "ingredients") {
        throw ParseError("line " + std::to_string(line_no) + ": expected 'ingredients'");
      }
      while (words >> word) link.ingredients.push_back(word);
      if (link.ingredients.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": no ingredients listed");
      }
      spec.link = std::move(link);
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown directive '" + directive +
                       "'");
    }
  }
  return spec;
}

}  // namespace wban::ban
