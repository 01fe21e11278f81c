#include "fusionlab/parser.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <optional>

#include "fusionlab/error.hpp"

namespace fusionlab {
namespace {

enum class Tok { Ident, LParen, RParen, LBracket, RBracket, Comma, Colon, Eq, Not, And, Or, Arrow, DArrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    auto one = [&](Tok k) {
      out.push_back({k, std::string(1, c), start});
      ++i;
    };
    switch (c) {
      case '(': one(Tok::LParen); break;
      case ')': one(Tok::RParen); break;
      case '[': one(Tok::LBracket); break;
      case ']': one(Tok::RBracket); break;
      case ',': one(Tok::Comma); break;
      case ':': one(Tok::Colon); break;
      case '=': one(Tok::Eq); break;
      case '!': one(Tok::Not); break;
      case '&': one(Tok::And); break;
      case '|': one(Tok::Or); break;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          out.push_back({Tok::Arrow, "->", start});
          i += 2;
          break;
        }
        throw ParseError("unexpected '-'", start);
      case '<':
        if (s.substr(i, 3) == "<->") {
          out.push_back({Tok::DArrow, "<->", start});
          i += 3;
          break;
        }
        throw ParseError("unexpected '<'", start);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "forall" || s == "exists" || s == "true" || s == "false";
}

bool valid_variable_name(const std::string& s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return !is_keyword(s);
}

constexpr SortId kUnknown = -1;

class Parser {
 public:
  Parser(std::string_view text, const Language& lang) : toks_(lex(text)), lang_(lang) {}

  Formula formula() {
    Formula lhs = implication();
    if (peek().kind == Tok::DArrow) {
      advance();
      Formula rhs = implication();
      return Formula::iff(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Term term() {
    const Token& t = expect(Tok::Ident, "term");
    if (is_keyword(t.text)) throw ParseError("keyword '" + t.text + "' used as a term", t.pos);
    if (peek().kind == Tok::LParen) {
      auto it = lang_.functions().find(t.text);
      if (it == lang_.functions().end()) {
        if (lang_.relations().count(t.text)) {
          throw ParseError("relation '" + t.text + "' used as a term", t.pos);
        }
        throw SortError("undeclared function '" + t.text + "' at offset " + std::to_string(t.pos));
      }
      advance();
      std::vector<Term> args = term_list();
      expect(Tok::RParen, "')'");
      if (args.size() != it->second.args.size()) {
        throw SortError("function '" + t.text + "' expects " + std::to_string(it->second.args.size()) +
                        " arguments, got " + std::to_string(args.size()) + " at offset " +
                        std::to_string(t.pos));
      }
      return Term::apply(t.text, it->second.result, std::move(args));
    }
    if (auto it = lang_.constants().find(t.text); it != lang_.constants().end()) {
      return Term::constant(t.text, it->second);
    }
    if (lang_.has_symbol(t.text)) {
      throw SortError("symbol '" + t.text + "' used as a variable at offset " + std::to_string(t.pos));
    }
    if (!valid_variable_name(t.text)) throw ParseError("invalid variable name '" + t.text + "'", t.pos);
    return Term::var(t.text, annotation());
  }

  void expect_end() {
    if (peek().kind != Tok::End) throw ParseError("trailing input '" + peek().text + "'", peek().pos);
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) {
      throw ParseError(std::string("expected ") + what + ", found '" + peek().text + "'", peek().pos);
    }
    return advance();
  }

  SortId annotation() {
    if (peek().kind != Tok::LBracket) return kUnknown;
    advance();
    const Token& s = expect(Tok::Ident, "sort name");
    auto id = lang_.find_sort(s.text);
    if (!id) throw SortError("undeclared sort '" + s.text + "' at offset " + std::to_string(s.pos));
    expect(Tok::RBracket, "']'");
    return *id;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      advance();
      Formula rhs = implication();
      return Formula::implies(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts;
    parts.push_back(conjunction());
    while (peek().kind == Tok::Or) {
      advance();
      parts.push_back(conjunction());
    }
    if (parts.size() == 1) return std::move(parts[0]);
    return Formula{Formula::Kind::Or, {}, {}, std::move(parts), {}};
  }

  Formula conjunction() {
    std::vector<Formula> parts;
    parts.push_back(unary());
    while (peek().kind == Tok::And) {
      advance();
      parts.push_back(unary());
    }
    if (parts.size() == 1) return std::move(parts[0]);
    return Formula{Formula::Kind::And, {}, {}, std::move(parts), {}};
  }

  Formula unary() {
    if (peek().kind == Tok::Not) {
      advance();
      return Formula::negate(unary());
    }
    if (peek().kind == Tok::Ident && (peek().text == "forall" || peek().text == "exists")) {
      bool universal = advance().text == "forall";
      std::vector<Variable> vars;
      do {
        const Token& v = expect(Tok::Ident, "variable");
        if (!valid_variable_name(v.text) || lang_.has_symbol(v.text)) {
          throw ParseError("invalid bound variable '" + v.text + "'", v.pos);
        }
        vars.push_back(Variable{v.text, annotation()});
      } while (peek().kind == Tok::Comma && (advance(), true));
      expect(Tok::Colon, "':'");
      Formula body = formula();
      return universal ? Formula::forall(vars, std::move(body)) : Formula::exists(vars, std::move(body));
    }
    return primary();
  }

  Formula primary() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      advance();
      Formula f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind == Tok::Ident && t.text == "true") {
      advance();
      return Formula::truth();
    }
    if (t.kind == Tok::Ident && t.text == "false") {
      advance();
      return Formula::falsity();
    }
    if (t.kind == Tok::Ident && toks_[pos_ + 1].kind == Tok::LParen) {
      auto it = lang_.relations().find(t.text);
      if (it != lang_.relations().end()) {
        advance();
        advance();
        std::vector<Term> args;
        if (peek().kind != Tok::RParen) args = term_list();
        expect(Tok::RParen, "')'");
        if (args.size() != it->second.profile.size()) {
          throw SortError("relation '" + t.text + "' expects " +
                          std::to_string(it->second.profile.size()) + " arguments, got " +
                          std::to_string(args.size()) + " at offset " + std::to_string(t.pos));
        }
        return Formula::rel(t.text, std::move(args));
      }
      if (!lang_.functions().count(t.text)) {
        throw SortError("undeclared symbol '" + t.text + "' at offset " + std::to_string(t.pos));
      }
    }
    if (t.kind != Tok::Ident) throw ParseError("expected formula, found '" + t.text + "'", t.pos);
    Term lhs = term();
    expect(Tok::Eq, "'='");
    Term rhs = term();
    return Formula::eq(std::move(lhs), std::move(rhs));
  }

  std::vector<Term> term_list() {
    std::vector<Term> out;
    out.push_back(term());
    while (peek().kind == Tok::Comma) {
      advance();
      out.push_back(term());
    }
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Language& lang_;
};

// Sort inference over variable slots. Each binder opens a new slot;
// free occurrences share one slot per name.
class SortInference {
 public:
  explicit SortInference(const Language& lang) : lang_(lang) {}

  void run(Formula& f) {
    std::vector<std::pair<std::string, int>> scope;
    collect(f, scope);
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& [a, b] : var_equalities_) {
        SortId sa = slots_[a], sb = slots_[b];
        if (sa == kUnknown && sb != kUnknown) {
          slots_[a] = sb;
          changed = true;
        } else if (sb == kUnknown && sa != kUnknown) {
          slots_[b] = sa;
          changed = true;
        } else if (sa != sb) {
          throw SortError("variables '" + names_[a] + "' and '" + names_[b] + "' have different sorts");
        }
      }
    }
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      if (slots_[s] != kUnknown) continue;
      if (lang_.sort_count() == 1) {
        slots_[s] = 0;
      } else {
        throw SortError("cannot infer the sort of variable '" + names_[s] + "'; annotate it as " +
                        names_[s] + "[Sort]");
      }
    }
    for (auto& [term, slot] : term_slots_) term->sort = slots_[static_cast<std::size_t>(slot)];
    for (auto& [var, slot] : binder_slots_) var->sort = slots_[static_cast<std::size_t>(slot)];
  }

 private:
  int new_slot(const std::string& name, SortId sort) {
    slots_.push_back(sort);
    names_.push_back(name);
    return static_cast<int>(slots_.size()) - 1;
  }

  void constrain(int slot, SortId sort) {
    if (sort == kUnknown) return;
    SortId& cur = slots_[static_cast<std::size_t>(slot)];
    if (cur == kUnknown) {
      cur = sort;
    } else if (cur != sort) {
      throw SortError("variable '" + names_[static_cast<std::size_t>(slot)] + "' used at sorts " +
                      lang_.sort_name(cur) + " and " + lang_.sort_name(sort));
    }
  }

  int lookup(const std::string& name, std::vector<std::pair<std::string, int>>& scope) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    auto it = free_.find(name);
    if (it != free_.end()) return it->second;
    int s = new_slot(name, kUnknown);
    free_[name] = s;
    return s;
  }

  // Returns the slot of a bare variable term, -1 otherwise.
  int visit_term(Term& t, SortId expected, std::vector<std::pair<std::string, int>>& scope) {
    if (t.kind == Term::Kind::Var) {
      int slot = lookup(t.name, scope);
      constrain(slot, t.sort);
      constrain(slot, expected);
      term_slots_.emplace_back(&t, slot);
      return slot;
    }
    if (expected != kUnknown && t.sort != expected) {
      throw SortError("term '" + t.name + "' has sort " + lang_.sort_name(t.sort) + ", expected " +
                      lang_.sort_name(expected));
    }
    if (t.kind == Term::Kind::Apply) {
      const auto& fs = lang_.functions().at(t.name);
      for (std::size_t i = 0; i < t.args.size(); ++i) visit_term(t.args[i], fs.args[i], scope);
    }
    return -1;
  }

  void collect(Formula& f, std::vector<std::pair<std::string, int>>& scope) {
    switch (f.kind) {
      case Formula::Kind::Eq: {
        int a = visit_term(f.terms[0], kUnknown, scope);
        int b = visit_term(f.terms[1], kUnknown, scope);
        if (a >= 0 && b >= 0) {
          var_equalities_.emplace_back(a, b);
        } else if (a >= 0) {
          constrain(a, f.terms[1].sort);
        } else if (b >= 0) {
          constrain(b, f.terms[0].sort);
        }
        return;
      }
      case Formula::Kind::Rel: {
        const auto& prof = lang_.relations().at(f.symbol).profile;
        for (std::size_t i = 0; i < f.terms.size(); ++i) visit_term(f.terms[i], prof[i], scope);
        return;
      }
      case Formula::Kind::Exists:
      case Formula::Kind::Forall: {
        int slot = new_slot(f.bound.name, f.bound.sort);
        binder_slots_.emplace_back(&f.bound, slot);
        scope.emplace_back(f.bound.name, slot);
        collect(f.children[0], scope);
        scope.pop_back();
        return;
      }
      default:
        for (auto& c : f.children) collect(c, scope);
    }
  }

  const Language& lang_;
  std::vector<SortId> slots_;
  std::vector<std::string> names_;
  std::map<std::string, int> free_;
  std::vector<std::pair<int, int>> var_equalities_;
  std::vector<std::pair<Term*, int>> term_slots_;
  std::vector<std::pair<Variable*, int>> binder_slots_;
};

}  // namespace

Formula parse_formula(std::string_view text, const Language& lang) {
  Parser p(text, lang);
  Formula f = p.formula();
  p.expect_end();
  SortInference(lang).run(f);
  check_well_sorted(f, lang);
  return f;
}

Term parse_term(std::string_view text, const Language& lang) {
  Parser p(text, lang);
  Term t = p.term();
  p.expect_end();
  Formula wrapper = Formula::eq(t, t);
  SortInference(lang).run(wrapper);
  check_well_sorted(wrapper.terms[0], lang);
  return wrapper.terms[0];
}

}  // namespace fusionlab
