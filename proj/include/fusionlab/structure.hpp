#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusionlab/formula.hpp"
#include "fusionlab/language.hpp"

namespace fusionlab {

/// An element of a multi-sorted carrier: (sort, position in that carrier).
struct Elem {
  SortId sort = 0;
  int index = 0;
  auto operator<=>(const Elem&) const = default;
};

using ElemSet = std::set<Elem>;
using Tuple = std::vector<int>;

/// Cell values of relation tables. `kUnknown` marks a cell a completion
/// search has not decided yet; complete structures never contain it.
enum : std::uint8_t { kFalseCell = 0, kTrueCell = 1, kUnknownCell = 2 };
inline constexpr int kUndefined = -1;

/// Finite multi-sorted structure with dense relation/function tables.
/// Relation `R` with profile (s1..sn) stores one cell per tuple in
/// mixed-radix order over the carrier sizes.
class FiniteStructure {
 public:
  FiniteStructure() = default;
  FiniteStructure(std::shared_ptr<const Language> lang, std::vector<int> sizes);
  FiniteStructure(const Language& lang, std::vector<int> sizes);

  const Language& language() const { return *lang_; }
  const std::shared_ptr<const Language>& language_ptr() const { return lang_; }

  int size(SortId s) const { return sizes_.at(static_cast<std::size_t>(s)); }
  const std::vector<int>& sizes() const { return sizes_; }
  int total_size() const;
  std::vector<Elem> elements() const;
  ElemSet element_set() const;

  const std::string& name(Elem e) const;
  void set_name(Elem e, std::string name);
  std::optional<Elem> find(SortId s, const std::string& name) const;
  /// Appends one element to a sort; tables grow with unknown/undefined cells
  /// for tuples that mention it.
  Elem add_element(SortId s, std::string name = {});

  // Relations, addressed by dense index (Language::relation_index) or name.
  std::uint8_t cell(int rel, const Tuple& t) const { return rel_[static_cast<std::size_t>(rel)][offset_rel(rel, t)]; }
  bool holds(int rel, const Tuple& t) const { return cell(rel, t) == kTrueCell; }
  bool holds(const std::string& rel, const Tuple& t) const { return holds(lang_->relation_index(rel), t); }
  void set_cell(int rel, const Tuple& t, std::uint8_t v) { rel_[static_cast<std::size_t>(rel)][offset_rel(rel, t)] = v; }
  void set(const std::string& rel, const Tuple& t, bool v = true) {
    set_cell(lang_->relation_index(rel), t, v ? kTrueCell : kFalseCell);
  }
  std::vector<Tuple> tuples(int rel) const;
  std::vector<Tuple> tuples(const std::string& rel) const { return tuples(lang_->relation_index(rel)); }
  std::size_t tuple_count(int rel) const;
  const std::vector<SortId>& relation_profile(int rel) const { return rel_prof_[static_cast<std::size_t>(rel)]; }
  const std::vector<SortId>& function_profile(int fn) const { return fun_prof_[static_cast<std::size_t>(fn)]; }
  const std::vector<std::uint8_t>& table(int rel) const { return rel_[static_cast<std::size_t>(rel)]; }
  std::vector<std::uint8_t>& table(int rel) { return rel_[static_cast<std::size_t>(rel)]; }

  // Functions (kUndefined for unset entries).
  int value(int fn, const Tuple& args) const { return fun_[static_cast<std::size_t>(fn)][offset_fun(fn, args)]; }
  int value(const std::string& fn, const Tuple& args) const { return value(lang_->function_index(fn), args); }
  void set_value(int fn, const Tuple& args, int v) { fun_[static_cast<std::size_t>(fn)][offset_fun(fn, args)] = v; }
  void set_value(const std::string& fn, const Tuple& args, int v) { set_value(lang_->function_index(fn), args, v); }
  const std::vector<int>& function_table(int fn) const { return fun_[static_cast<std::size_t>(fn)]; }
  std::vector<int>& function_table(int fn) { return fun_[static_cast<std::size_t>(fn)]; }

  int constant(int c) const { return const_[static_cast<std::size_t>(c)]; }
  int constant(const std::string& c) const { return constant(lang_->constant_index(c)); }
  void set_constant(int c, int v) { const_[static_cast<std::size_t>(c)] = v; }
  void set_constant(const std::string& c, int v) { set_constant(lang_->constant_index(c), v); }

  /// No unknown relation cells, no undefined function entries or constants.
  bool is_complete() const;
  /// Sets every unknown cell to false.
  void close_unknown_false();

  /// All tuples over the carriers of `profile`, in table order.
  std::vector<Tuple> all_tuples(const std::vector<SortId>& profile) const;
  std::size_t tuple_space(const std::vector<SortId>& profile) const;
  Tuple decode(const std::vector<SortId>& profile, std::size_t offset) const;
  std::size_t encode(const std::vector<SortId>& profile, const Tuple& t) const;

  /// Substructure induced on `keep` (elements renumbered in order). The caller
  /// guarantees closure under functions/constants; unclosed entries throw.
  FiniteStructure induced(const ElemSet& keep) const;
  /// Same carriers, symbols of `lang` only (lang must be contained in ours).
  FiniteStructure reduct(const Language& lang) const;
  /// Same carriers over a larger language; new symbols start unknown/undefined.
  FiniteStructure expand(const Language& bigger) const;

  bool operator==(const FiniteStructure& o) const;

 private:
  std::size_t offset_rel(int rel, const Tuple& t) const;
  std::size_t offset_fun(int fn, const Tuple& t) const;

  std::shared_ptr<const Language> lang_;
  std::vector<int> sizes_;
  std::vector<std::vector<std::string>> names_;
  std::vector<std::vector<SortId>> rel_prof_, fun_prof_;
  std::vector<std::vector<std::uint8_t>> rel_;
  std::vector<std::vector<int>> fun_;
  std::vector<int> const_;
};

/// Per-sort element maps source -> target.
struct Embedding {
  std::vector<std::vector<int>> map;

  int operator()(Elem e) const { return map[static_cast<std::size_t>(e.sort)][static_cast<std::size_t>(e.index)]; }
  Elem apply(Elem e) const { return Elem{e.sort, (*this)(e)}; }
  ElemSet image(const ElemSet& s) const;
  static Embedding identity(const std::vector<int>& sizes);
  Embedding compose(const Embedding& then) const;  // then ∘ this
  Embedding inverse(const std::vector<int>& target_sizes) const;
  bool is_identity() const;
  bool operator==(const Embedding&) const = default;
  auto operator<=>(const Embedding&) const = default;
};

/// Assignment of elements (indices within their sort) to variables.
using Assignment = std::map<Variable, int>;

/// Tarski satisfaction; quantifiers range over the bound variable's sort.
/// The assignment must cover exactly the free variables.
bool evaluate(const FiniteStructure& m, const Formula& f, const Assignment& a);

/// Three-valued evaluation over partial structures (unknown cells / undefined
/// function entries). Returns kTrueCell, kFalseCell or kUnknownCell.
std::uint8_t evaluate3(const FiniteStructure& m, const Formula& f, const Assignment& a);

/// A formula compiled against a language for repeated evaluation; variables
/// become slots in `vars` order.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const Language& lang, std::vector<Variable> vars);
  bool operator()(const FiniteStructure& m, const std::vector<int>& values) const;
  std::uint8_t eval3(const FiniteStructure& m, const std::vector<int>& values) const;
  const std::vector<Variable>& variables() const { return vars_; }

  struct Node;

 private:
  std::vector<Variable> vars_;
  std::shared_ptr<const Node> root_;
  int slot_count_ = 0;
};

}  // namespace fusionlab
