#include "fusionlab/formula.hpp"

#include <algorithm>
#include <sstream>

#include "fusionlab/error.hpp"

namespace fusionlab {

int Term::depth() const {
  int d = 0;
  for (const auto& a : args) d = std::max(d, a.depth());
  return kind == Kind::Apply ? d + 1 : 0;
}

Formula Formula::eq(Term a, Term b) {
  Formula f{Kind::Eq, {}, {}, {}, {}};
  f.terms = {std::move(a), std::move(b)};
  return f;
}

Formula Formula::rel(std::string symbol, std::vector<Term> args) {
  return Formula{Kind::Rel, std::move(symbol), std::move(args), {}, {}};
}

Formula Formula::negate(Formula f) {
  Formula out{Kind::Not, {}, {}, {}, {}};
  out.children.push_back(std::move(f));
  return out;
}

Formula Formula::conj(std::vector<Formula> parts) {
  if (parts.empty()) return truth();
  if (parts.size() == 1) return std::move(parts.front());
  return Formula{Kind::And, {}, {}, std::move(parts), {}};
}

Formula Formula::disj(std::vector<Formula> parts) {
  if (parts.empty()) return falsity();
  if (parts.size() == 1) return std::move(parts.front());
  return Formula{Kind::Or, {}, {}, std::move(parts), {}};
}

Formula Formula::implies(Formula a, Formula b) {
  Formula out{Kind::Implies, {}, {}, {}, {}};
  out.children = {std::move(a), std::move(b)};
  return out;
}

Formula Formula::iff(Formula a, Formula b) {
  Formula out{Kind::Iff, {}, {}, {}, {}};
  out.children = {std::move(a), std::move(b)};
  return out;
}

Formula Formula::exists(Variable v, Formula body) {
  Formula out{Kind::Exists, {}, {}, {}, std::move(v)};
  out.children.push_back(std::move(body));
  return out;
}

Formula Formula::forall(Variable v, Formula body) {
  Formula out{Kind::Forall, {}, {}, {}, std::move(v)};
  out.children.push_back(std::move(body));
  return out;
}

Formula Formula::exists(const std::vector<Variable>& vs, Formula body) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = exists(*it, std::move(body));
  return body;
}

Formula Formula::forall(const std::vector<Variable>& vs, Formula body) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = forall(*it, std::move(body));
  return body;
}

bool Formula::is_quantifier_free() const {
  if (kind == Kind::Exists || kind == Kind::Forall) return false;
  return std::all_of(children.begin(), children.end(),
                     [](const Formula& c) { return c.is_quantifier_free(); });
}

bool Formula::is_universal() const {
  const Formula* f = this;
  while (f->kind == Kind::Forall) f = &f->children[0];
  return f->is_quantifier_free();
}

int Formula::depth() const {
  int d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  for (const auto& t : terms) d = std::max(d, t.depth());
  return is_atomic() || kind == Kind::True || kind == Kind::False ? d : d + 1;
}

namespace {

void collect_term_vars(const Term& t, std::vector<Variable>& out, const std::vector<Variable>& bound) {
  if (t.kind == Term::Kind::Var) {
    Variable v = t.as_variable();
    if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return;
  }
  for (const auto& a : t.args) collect_term_vars(a, out, bound);
}

void collect_free(const Formula& f, std::vector<Variable>& out, std::vector<Variable>& bound) {
  for (const auto& t : f.terms) collect_term_vars(t, out, bound);
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall) {
    bound.push_back(f.bound);
    collect_free(f.children[0], out, bound);
    bound.pop_back();
    return;
  }
  for (const auto& c : f.children) collect_free(c, out, bound);
}

void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) out.insert(t.name);
  for (const auto& a : t.args) collect_names(a, out);
}

void collect_term_symbols(const Term& t, std::set<std::string>& out) {
  if (t.kind != Term::Kind::Var) out.insert(t.name);
  for (const auto& a : t.args) collect_term_symbols(a, out);
}

}  // namespace

std::vector<Variable> free_variables(const Formula& f) {
  std::vector<Variable> out, bound;
  collect_free(f, out, bound);
  return out;
}

std::vector<Variable> term_variables(const Term& t) {
  std::vector<Variable> out;
  collect_term_vars(t, out, {});
  return out;
}

std::set<std::string> all_variable_names(const Formula& f) {
  std::set<std::string> out;
  for (const auto& t : f.terms) collect_names(t, out);
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall) out.insert(f.bound.name);
  for (const auto& c : f.children) {
    auto sub = all_variable_names(c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::set<std::string> symbols_of(const Formula& f) {
  std::set<std::string> out;
  if (f.kind == Formula::Kind::Rel) out.insert(f.symbol);
  for (const auto& t : f.terms) collect_term_symbols(t, out);
  for (const auto& c : f.children) {
    auto sub = symbols_of(c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

Term substitute(const Term& t, const std::map<Variable, Term>& sub) {
  if (t.kind == Term::Kind::Var) {
    auto it = sub.find(t.as_variable());
    return it == sub.end() ? t : it->second;
  }
  Term out = t;
  for (auto& a : out.args) a = substitute(a, sub);
  return out;
}

Formula substitute(const Formula& f, const std::map<Variable, Term>& sub) {
  if (sub.empty()) return f;
  Formula out = f;
  for (auto& t : out.terms) t = substitute(t, sub);
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall) {
    std::map<Variable, Term> inner = sub;
    inner.erase(f.bound);
    // rename the binder if it would capture a substituted variable
    std::set<std::string> incoming;
    for (const auto& [v, t] : inner) {
      for (const auto& w : term_variables(t)) incoming.insert(w.name);
    }
    if (incoming.count(f.bound.name)) {
      std::set<std::string> taken = all_variable_names(f);
      taken.insert(incoming.begin(), incoming.end());
      FreshNames fresh(taken);
      Variable nb = fresh.next(f.bound.sort);
      inner[f.bound] = Term::var(nb);
      out.bound = nb;
    }
    out.children[0] = substitute(f.children[0], inner);
    return out;
  }
  for (auto& c : out.children) c = substitute(c, sub);
  return out;
}

std::pair<std::vector<Variable>, Formula> split_universal(const Formula& f) {
  std::vector<Variable> vars;
  const Formula* cur = &f;
  while (cur->kind == Formula::Kind::Forall) {
    vars.push_back(cur->bound);
    cur = &cur->children[0];
  }
  return {vars, *cur};
}

FreshNames::FreshNames(const std::set<std::string>& taken) {
  const std::string prefix = kFreshPrefix;
  for (const auto& n : taken) {
    if (n.rfind(prefix, 0) != 0) continue;
    try {
      int k = std::stoi(n.substr(prefix.size()));
      counter_ = std::max(counter_, k + 1);
    } catch (...) {
    }
  }
}

Variable FreshNames::next(SortId sort) {
  return Variable{std::string(kFreshPrefix) + std::to_string(counter_++), sort};
}

void check_well_sorted(const Term& t, const Language& lang) {
  if (t.sort < 0 || t.sort >= lang.sort_count()) {
    throw SortError("term '" + t.name + "' has undeclared sort");
  }
  switch (t.kind) {
    case Term::Kind::Var:
      return;
    case Term::Kind::Const: {
      auto it = lang.constants().find(t.name);
      if (it == lang.constants().end()) throw SortError("undeclared constant '" + t.name + "'");
      if (it->second != t.sort) throw SortError("constant '" + t.name + "' has wrong sort");
      return;
    }
    case Term::Kind::Apply: {
      auto it = lang.functions().find(t.name);
      if (it == lang.functions().end()) throw SortError("undeclared function '" + t.name + "'");
      const auto& fs = it->second;
      if (fs.args.size() != t.args.size()) {
        throw SortError("function '" + t.name + "' expects " + std::to_string(fs.args.size()) +
                        " arguments, got " + std::to_string(t.args.size()));
      }
      if (fs.result != t.sort) throw SortError("function '" + t.name + "' result sort mismatch");
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        check_well_sorted(t.args[i], lang);
        if (t.args[i].sort != fs.args[i]) {
          throw SortError("argument " + std::to_string(i + 1) + " of '" + t.name + "' has sort " +
                          lang.sort_name(t.args[i].sort) + ", expected " +
                          lang.sort_name(fs.args[i]));
        }
      }
      return;
    }
  }
}

void check_well_sorted(const Formula& f, const Language& lang) {
  switch (f.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return;
    case Formula::Kind::Eq:
      check_well_sorted(f.terms.at(0), lang);
      check_well_sorted(f.terms.at(1), lang);
      if (f.terms[0].sort != f.terms[1].sort) throw SortError("equality between different sorts");
      return;
    case Formula::Kind::Rel: {
      auto it = lang.relations().find(f.symbol);
      if (it == lang.relations().end()) throw SortError("undeclared relation '" + f.symbol + "'");
      const auto& prof = it->second.profile;
      if (prof.size() != f.terms.size()) {
        throw SortError("relation '" + f.symbol + "' expects " + std::to_string(prof.size()) +
                        " arguments, got " + std::to_string(f.terms.size()));
      }
      for (std::size_t i = 0; i < prof.size(); ++i) {
        check_well_sorted(f.terms[i], lang);
        if (f.terms[i].sort != prof[i]) {
          throw SortError("argument " + std::to_string(i + 1) + " of '" + f.symbol +
                          "' has the wrong sort");
        }
      }
      return;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (f.bound.sort < 0 || f.bound.sort >= lang.sort_count()) {
        throw SortError("bound variable '" + f.bound.name + "' has undeclared sort");
      }
      check_well_sorted(f.children.at(0), lang);
      return;
    default:
      for (const auto& c : f.children) check_well_sorted(c, lang);
  }
}

namespace {

int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return 0;
    case Formula::Kind::Iff:
      return 1;
    case Formula::Kind::Implies:
      return 2;
    case Formula::Kind::Or:
      return 3;
    case Formula::Kind::And:
      return 4;
    case Formula::Kind::Not:
      return 5;
    default:
      return 6;
  }
}

void print_var(std::ostream& os, const std::string& name, SortId sort, const Language& lang) {
  os << name;
  if (lang.sort_count() > 1) os << '[' << lang.sort_name(sort) << ']';
}

void print_term(std::ostream& os, const Term& t, const Language& lang) {
  switch (t.kind) {
    case Term::Kind::Var:
      print_var(os, t.name, t.sort, lang);
      return;
    case Term::Kind::Const:
      os << t.name;
      return;
    case Term::Kind::Apply:
      os << t.name << '(';
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << ',';
        print_term(os, t.args[i], lang);
      }
      os << ')';
  }
}

void print(std::ostream& os, const Formula& f, const Language& lang, int parent) {
  int p = precedence(f.kind);
  bool paren = p <= parent;
  if (paren) os << '(';
  switch (f.kind) {
    case Formula::Kind::True:
      os << "true";
      break;
    case Formula::Kind::False:
      os << "false";
      break;
    case Formula::Kind::Eq:
      print_term(os, f.terms[0], lang);
      os << '=';
      print_term(os, f.terms[1], lang);
      break;
    case Formula::Kind::Rel:
      os << f.symbol << '(';
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        if (i) os << ',';
        print_term(os, f.terms[i], lang);
      }
      os << ')';
      break;
    case Formula::Kind::Not:
      os << '!';
      print(os, f.children[0], lang, p);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff: {
      const char* op = f.kind == Formula::Kind::And       ? " & "
                       : f.kind == Formula::Kind::Or      ? " | "
                       : f.kind == Formula::Kind::Implies ? " -> "
                                                          : " <-> ";
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) os << op;
        print(os, f.children[i], lang, p);
      }
      break;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      os << (f.kind == Formula::Kind::Exists ? "exists " : "forall ");
      print_var(os, f.bound.name, f.bound.sort, lang);
      os << ": ";
      print(os, f.children[0], lang, -1);
      break;
  }
  if (paren) os << ')';
}

}  // namespace

std::string to_string(const Formula& f, const Language& lang) {
  std::ostringstream os;
  print(os, f, lang, -1);
  return os.str();
}

std::string to_string(const Term& t, const Language& lang) {
  std::ostringstream os;
  print_term(os, t, lang);
  return os.str();
}

std::set<int> classify_formula(const Formula& f, const LanguageFamily& family) {
  std::set<int> out;
  auto syms = symbols_of(f);
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    bool all = std::all_of(syms.begin(), syms.end(),
                           [&](const std::string& s) { return family.members[i].has_symbol(s); });
    if (all) out.insert(static_cast<int>(i));
  }
  return out;
}

}  // namespace fusionlab
