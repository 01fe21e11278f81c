#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fusionlab/language.hpp"

namespace fusionlab {

/// Fresh variables carry this prefix; the formula grammar cannot produce it.
inline constexpr const char* kFreshPrefix = "_w";

struct Variable {
  std::string name;
  SortId sort = 0;
  auto operator<=>(const Variable&) const = default;
};

struct Term {
  enum class Kind { Var, Const, Apply };

  Kind kind = Kind::Var;
  std::string name;
  SortId sort = 0;
  std::vector<Term> args;

  static Term var(Variable v) { return Term{Kind::Var, std::move(v.name), v.sort, {}}; }
  static Term var(std::string name, SortId sort = 0) { return Term{Kind::Var, std::move(name), sort, {}}; }
  static Term constant(std::string name, SortId sort) { return Term{Kind::Const, std::move(name), sort, {}}; }
  static Term apply(std::string fn, SortId result, std::vector<Term> args) {
    return Term{Kind::Apply, std::move(fn), result, std::move(args)};
  }

  bool is_var() const { return kind == Kind::Var; }
  Variable as_variable() const { return Variable{name, sort}; }
  int depth() const;

  bool operator==(const Term&) const = default;
  auto operator<=>(const Term& o) const {
    if (auto c = kind <=> o.kind; c != 0) return c;
    if (auto c = name <=> o.name; c != 0) return c;
    if (auto c = sort <=> o.sort; c != 0) return c;
    return args <=> o.args;
  }
};

/// First-order formula AST. Connectives And/Or are n-ary.
struct Formula {
  enum class Kind { True, False, Eq, Rel, Not, And, Or, Implies, Iff, Exists, Forall };

  Kind kind = Kind::True;
  std::string symbol;           // Rel
  std::vector<Term> terms;      // Eq (2), Rel (arity)
  std::vector<Formula> children;
  Variable bound;               // Exists/Forall

  static Formula truth() { return Formula{Kind::True, {}, {}, {}, {}}; }
  static Formula falsity() { return Formula{Kind::False, {}, {}, {}, {}}; }
  static Formula eq(Term a, Term b);
  static Formula rel(std::string symbol, std::vector<Term> args);
  static Formula negate(Formula f);
  /// n-ary conjunction; collapses 0 children to True and 1 child to itself.
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula exists(Variable v, Formula body);
  static Formula forall(Variable v, Formula body);
  static Formula exists(const std::vector<Variable>& vs, Formula body);
  static Formula forall(const std::vector<Variable>& vs, Formula body);

  bool is_atomic() const { return kind == Kind::Eq || kind == Kind::Rel; }
  bool is_quantifier_free() const;
  /// A block of universal quantifiers over a quantifier-free matrix.
  bool is_universal() const;
  int depth() const;

  bool operator==(const Formula&) const = default;
  auto operator<=>(const Formula& o) const {
    if (auto c = kind <=> o.kind; c != 0) return c;
    if (auto c = symbol <=> o.symbol; c != 0) return c;
    if (auto c = terms <=> o.terms; c != 0) return c;
    if (auto c = bound <=> o.bound; c != 0) return c;
    return children <=> o.children;
  }
};

/// Free variables ordered by first occurrence.
std::vector<Variable> free_variables(const Formula& f);
std::vector<Variable> term_variables(const Term& t);
/// Every variable name occurring anywhere (free or bound).
std::set<std::string> all_variable_names(const Formula& f);
/// Relation, function and constant symbols used.
std::set<std::string> symbols_of(const Formula& f);

/// Capture-free substitution of terms for free variables.
Formula substitute(const Formula& f, const std::map<Variable, Term>& sub);
Term substitute(const Term& t, const std::map<Variable, Term>& sub);

/// Strips the leading universal block: returns (variables, matrix).
std::pair<std::vector<Variable>, Formula> split_universal(const Formula& f);

/// Generates `_w<k>` names above any such name already present.
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(const std::set<std::string>& taken);
  Variable next(SortId sort);

 private:
  int counter_ = 0;
};

/// Checks sorts and arities against the language; throws SortError.
void check_well_sorted(const Formula& f, const Language& lang);
void check_well_sorted(const Term& t, const Language& lang);

/// Concrete syntax accepted by parse_formula. Multi-sorted languages get
/// `x[S]` annotations on every variable occurrence.
std::string to_string(const Formula& f, const Language& lang);
std::string to_string(const Term& t, const Language& lang);

/// Members i whose language contains every symbol of the formula.
std::set<int> classify_formula(const Formula& f, const LanguageFamily& family);

}  // namespace fusionlab
