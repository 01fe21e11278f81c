#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusionlab/formula.hpp"
#include "fusionlab/structure.hpp"

namespace fusionlab {

/// A class of finite structures cut out by axioms and forbidden
/// configurations. Axioms are normally universal; non-universal axioms are
/// accepted (codec targets need them) but disable the fast local checks.
class ClassSpec {
 public:
  ClassSpec() = default;
  ClassSpec(std::string name, Language lang);

  const std::string& name() const { return name_; }
  const Language& language() const { return *lang_; }
  const std::shared_ptr<const Language>& language_ptr() const { return lang_; }

  ClassSpec& add_axiom(const Formula& f);
  ClassSpec& add_axiom(const std::string& text);
  /// R invariant under permuting its arguments (all of one sort).
  ClassSpec& declare_symmetric(const std::string& rel);
  /// R false on every tuple with a repeated entry.
  ClassSpec& declare_irreflexive(const std::string& rel);
  ClassSpec& forbid(FiniteStructure m);
  ClassSpec& set_free_amalgamation(bool v) {
    free_amalgamation_ = v;
    return *this;
  }

  const std::vector<Formula>& axioms() const { return axioms_; }
  const std::vector<FiniteStructure>& forbidden() const { return forbidden_; }
  const std::set<std::string>& symmetric() const { return symmetric_; }
  const std::set<std::string>& irreflexive() const { return irreflexive_; }
  bool free_amalgamation() const { return free_amalgamation_; }
  bool universal() const;

  /// First violated axiom / forbidden configuration of a complete structure.
  std::optional<std::string> violation(const FiniteStructure& m) const;
  bool contains(const FiniteStructure& m) const { return !violation(m); }

  /// Three-valued refutation of a partial structure: true when no
  /// completion on the same carriers can be a member.
  bool refutes(const FiniteStructure& partial) const;
  /// Same, restricted to axiom instances whose assigned values include every
  /// element of `touched` (sound for relational languages after changing a
  /// cell whose tuple is `touched`).
  bool refutes_at(const FiniteStructure& partial, const std::vector<Elem>& touched) const;

 private:
  struct Compiled {
    std::vector<Variable> vars;
    std::shared_ptr<CompiledFormula> matrix;  // over vars
    std::shared_ptr<CompiledFormula> whole;   // closed sentence
    bool universal = false;
  };

  std::string name_;
  std::shared_ptr<const Language> lang_;
  std::vector<Formula> axioms_;
  std::vector<Compiled> compiled_;
  std::vector<FiniteStructure> forbidden_;
  std::set<std::string> symmetric_, irreflexive_;
  bool free_amalgamation_ = false;
};

/// One undecided cell: relation cell (fn < 0) or function entry.
struct CellRef {
  int rel = -1;
  int fn = -1;
  Tuple tuple;
};

/// Undecided cells, one per symmetry orbit for declared-symmetric relations.
std::vector<CellRef> open_cells(const ClassSpec& spec, const FiniteStructure& m);
/// Sets a relation cell and its orbit under declared symmetry.
void set_cell_orbit(const ClassSpec& spec, FiniteStructure& m, int rel, const Tuple& t, std::uint8_t v);
/// Fixes every unknown cell a declared-irreflexive relation forces false.
void apply_irreflexive(const ClassSpec& spec, FiniteStructure& m);
/// Elements occurring in a cell (for refutes_at).
std::vector<Elem> cell_elements(const FiniteStructure& m, const CellRef& c);

struct CompletionOptions {
  /// Randomizes value order per cell when set; otherwise false/smallest first.
  std::optional<std::uint64_t> seed;
  /// Search nodes before BudgetError; 0 means enumeration_budget().
  std::size_t node_budget = 0;
  /// Extra constraint checked on complete candidates.
  std::function<bool(const FiniteStructure&)> accept;
};

/// First member completing `partial` (unknown cells, undefined entries).
std::optional<FiniteStructure> complete_in_class(const ClassSpec& spec, FiniteStructure partial,
                                                 const CompletionOptions& opts = {});
/// Visits every member completion; stop by returning false.
void for_each_completion(const ClassSpec& spec, FiniteStructure partial,
                         const std::function<bool(const FiniteStructure&)>& visit,
                         std::size_t node_budget = 0);

/// One representative per isomorphism class, ordered by (total tuple count,
/// canonical code). BudgetError when the labeled space exceeds the budget.
std::vector<FiniteStructure> enumerate_models(const ClassSpec& spec, const std::vector<int>& sizes);
/// Representatives for every size vector with total size <= max_total,
/// ordered by total size first.
std::vector<FiniteStructure> enumerate_up_to(const ClassSpec& spec, int max_total, int min_total = 0);
/// Size vectors with the given total, lexicographic.
std::vector<std::vector<int>> size_vectors(int sorts, int total);

}  // namespace fusionlab
