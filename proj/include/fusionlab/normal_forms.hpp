#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusionlab/class_spec.hpp"
#include "fusionlab/formula.hpp"
#include "fusionlab/structure.hpp"

namespace fusionlab {

/// x=y, R(x..), f(x..)=y (constants are 0-ary f), each possibly negated.
struct FlatLiteral {
  enum class Kind { Eq, Rel, Fun };

  Kind kind = Kind::Eq;
  bool positive = true;
  std::string symbol;           // Rel/Fun
  std::vector<Variable> args;   // Eq: the two sides
  Variable result;              // Fun

  Formula to_formula(const Language& lang) const;
  std::vector<Variable> variables() const;
  bool operator==(const FlatLiteral&) const = default;
  auto operator<=>(const FlatLiteral&) const = default;
};

/// Recognizes a (negated) flat atom; nullopt otherwise.
std::optional<FlatLiteral> as_flat_literal(const Formula& f);

/// exists y: conjunction of flat literals.
struct EFlatFormula {
  std::vector<Variable> witnesses;
  std::vector<FlatLiteral> body;

  Formula to_formula(const Language& lang) const;
  /// Free variables (body variables minus witnesses), first occurrence order.
  std::vector<Variable> free_vars() const;
  /// Number of witness tuples satisfying the body, stopping at `limit`.
  /// `values` follow free_vars().
  std::size_t count_witnesses(const FiniteStructure& m, const std::vector<int>& values,
                              std::size_t limit = SIZE_MAX) const;
  bool holds(const FiniteStructure& m, const std::vector<int>& values) const {
    return count_witnesses(m, values, 1) > 0;
  }
};

inline constexpr std::size_t kDefaultLiteralBudget = 512;

/// Quantifier-free formula -> equivalent disjunction of E-flat formulas.
/// Throws BudgetError when the DNF exceeds `literal_budget` literals.
std::vector<EFlatFormula> flatten_to_eflat(const Formula& f, const Language& lang,
                                           std::size_t literal_budget = kDefaultLiteralBudget);

struct UniqueWitnessFailure {
  FiniteStructure structure;
  std::vector<int> values;
  std::size_t witnesses = 0;
};

/// Exhaustive at-most-one-witness check over every structure with total size
/// <= max_size. The check runs on the reduct to the symbols of positive
/// function literals; extra literals only remove witnesses, so a pass there
/// is a pass everywhere.
std::optional<UniqueWitnessFailure> check_unique_witness(const EFlatFormula& e, const Language& lang,
                                                         int max_size);

/// Literals grouped by member language, ties to the least index.
std::map<int, std::vector<FlatLiteral>> split_flat_by_language(const std::vector<FlatLiteral>& conj,
                                                               const LanguageFamily& family);

/// A flat literal sentence about named elements.
struct DiagramLiteral {
  FlatLiteral::Kind kind = FlatLiteral::Kind::Eq;
  bool positive = true;
  std::string symbol;
  std::vector<Elem> args;
  Elem result;
  bool operator==(const DiagramLiteral&) const = default;
  auto operator<=>(const DiagramLiteral&) const = default;
};

std::vector<DiagramLiteral> flat_diagram(const FiniteStructure& m);
std::string to_string(const DiagramLiteral& l, const FiniteStructure& m);
/// Whether `host` satisfies the diagram when element e is named by h(e).
bool diagram_satisfied(const std::vector<DiagramLiteral>& diagram, const FiniteStructure& host, const Embedding& h);

struct MorleyizationResult {
  Language language;                 // L plus one relation per formula
  std::vector<Formula> formulas;     // inputs, in order
  std::vector<std::string> symbols;  // new relation per formula
  std::vector<std::vector<Variable>> arguments;
  std::vector<Formula> axioms;       // forall x: Phi(x) <-> phi(x)

  /// Canonical expansion: each new relation interpreted by its formula.
  FiniteStructure expand(const FiniteStructure& m) const;
};

/// New symbols are Phi0, Phi1, ... skipping names in the language or `reserved`.
MorleyizationResult morleyize(const Language& lang, const std::vector<Formula>& formulas,
                              const std::set<std::string>& reserved = {});

struct BoundRecord {
  bool declared = false;  // supplied by a theory rather than checked
  int verified_size = 0;  // checked on all class members up to this size
  std::string note;
};

struct BoundedFormula {
  Formula formula;
  std::vector<Variable> x, y;
  int bound = 1;
  BoundRecord record;
};

struct BoundedVerdict {
  bool verified = false;
  int size_limit = 0;
  std::optional<FiniteStructure> witness;
  std::vector<int> x_values;
  std::size_t count = 0;  // y-witnesses at the refuting x
  std::string note;       // size qualification
};

/// Size-bounded check that every x has at most k satisfying y.
BoundedVerdict check_bounded(const Formula& f, const std::vector<Variable>& x, const std::vector<Variable>& y,
                             const ClassSpec& spec, int k, int size_limit);
/// Wraps a verified verdict into a library entry.
BoundedFormula make_bounded(const Formula& f, const std::vector<Variable>& x, const std::vector<Variable>& y,
                            int k, const BoundedVerdict& verdict);
/// Conjunction with bound k1*k2; f2's witnesses are renamed away from f1.
BoundedFormula conjoin_bounded(const BoundedFormula& f1, const BoundedFormula& f2);

}  // namespace fusionlab
