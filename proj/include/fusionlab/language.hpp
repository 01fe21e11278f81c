#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fusionlab {

using SortId = int;

struct RelationSymbol {
  std::vector<SortId> profile;
  bool operator==(const RelationSymbol&) const = default;
};

struct FunctionSymbol {
  std::vector<SortId> args;
  SortId result = 0;
  bool operator==(const FunctionSymbol&) const = default;
};

enum class SymbolKind { Relation, Function, Constant };

/// A multi-sorted signature. Symbol names are unique across the three kinds;
/// equality is built in per sort and never declared.
class Language {
 public:
  static constexpr const char* kDefaultSort = "V";

  Language() = default;
  explicit Language(std::vector<std::string> sorts);

  /// One sort named "V".
  static Language single_sorted();

  Language& add_relation(const std::string& name, std::vector<SortId> profile);
  Language& add_function(const std::string& name, std::vector<SortId> args, SortId result);
  Language& add_constant(const std::string& name, SortId sort);
  /// Single-sorted convenience: arity over sort 0.
  Language& add_relation(const std::string& name, int arity);

  const std::vector<std::string>& sorts() const { return sorts_; }
  int sort_count() const { return static_cast<int>(sorts_.size()); }
  std::optional<SortId> find_sort(std::string_view name) const;
  SortId sort_id(std::string_view name) const;
  const std::string& sort_name(SortId s) const { return sorts_.at(static_cast<std::size_t>(s)); }

  const std::map<std::string, RelationSymbol>& relations() const { return relations_; }
  const std::map<std::string, FunctionSymbol>& functions() const { return functions_; }
  const std::map<std::string, SortId>& constants() const { return constants_; }

  std::optional<SymbolKind> kind_of(std::string_view name) const;
  bool has_symbol(std::string_view name) const { return kind_of(name).has_value(); }
  std::set<std::string> symbol_names() const;

  /// Dense index of a relation/function symbol in name order.
  int relation_index(std::string_view name) const;
  int function_index(std::string_view name) const;
  int constant_index(std::string_view name) const;
  const std::vector<std::string>& relation_names() const { return relation_names_; }
  const std::vector<std::string>& function_names() const { return function_names_; }
  const std::vector<std::string>& constant_names() const { return constant_names_; }

  bool is_relational() const { return functions_.empty() && constants_.empty(); }

  /// True when every sort and symbol of `other` occurs here with the same profile.
  bool contains(const Language& other) const;

  /// Sub-language keeping only the named symbols (sorts unchanged).
  Language restrict_to(const std::set<std::string>& symbols) const;

  bool operator==(const Language& o) const {
    return sorts_ == o.sorts_ && relations_ == o.relations_ && functions_ == o.functions_ &&
           constants_ == o.constants_;
  }

 private:
  void check_fresh(const std::string& name) const;
  void check_sort(SortId s) const;
  void reindex();

  std::vector<std::string> sorts_;
  std::map<std::string, RelationSymbol> relations_;
  std::map<std::string, FunctionSymbol> functions_;
  std::map<std::string, SortId> constants_;
  std::vector<std::string> relation_names_, function_names_, constant_names_;
};

/// Symbol-wise intersection / union of two languages with identical sort lists.
Language intersect(const Language& a, const Language& b);
Language unite(const Language& a, const Language& b);

/// Languages L_i with common pairwise intersection L_cap and union L_cup.
struct LanguageFamily {
  std::vector<Language> members;
  Language intersection;
  Language union_language;
};

/// Fails unless members share their sort list and all pairwise intersections coincide.
LanguageFamily make_language_family(std::vector<Language> members);

}  // namespace fusionlab
