#include "fusionlab/language.hpp"

#include <algorithm>

#include "fusionlab/error.hpp"

namespace fusionlab {

Language::Language(std::vector<std::string> sorts) : sorts_(std::move(sorts)) {
  std::set<std::string> seen;
  for (const auto& s : sorts_) {
    if (!seen.insert(s).second) throw SortError("duplicate sort '" + s + "'");
  }
}

Language Language::single_sorted() { return Language({kDefaultSort}); }

void Language::check_fresh(const std::string& name) const {
  if (name.empty()) throw SortError("empty symbol name");
  if (has_symbol(name)) throw SortError("symbol '" + name + "' declared twice");
}

void Language::check_sort(SortId s) const {
  if (s < 0 || s >= sort_count()) throw SortError("undeclared sort id " + std::to_string(s));
}

void Language::reindex() {
  relation_names_.clear();
  function_names_.clear();
  constant_names_.clear();
  for (const auto& [n, _] : relations_) relation_names_.push_back(n);
  for (const auto& [n, _] : functions_) function_names_.push_back(n);
  for (const auto& [n, _] : constants_) constant_names_.push_back(n);
}

Language& Language::add_relation(const std::string& name, std::vector<SortId> profile) {
  check_fresh(name);
  for (SortId s : profile) check_sort(s);
  relations_[name] = RelationSymbol{std::move(profile)};
  reindex();
  return *this;
}

Language& Language::add_relation(const std::string& name, int arity) {
  return add_relation(name, std::vector<SortId>(static_cast<std::size_t>(arity), 0));
}

Language& Language::add_function(const std::string& name, std::vector<SortId> args, SortId result) {
  check_fresh(name);
  for (SortId s : args) check_sort(s);
  check_sort(result);
  functions_[name] = FunctionSymbol{std::move(args), result};
  reindex();
  return *this;
}

Language& Language::add_constant(const std::string& name, SortId sort) {
  check_fresh(name);
  check_sort(sort);
  constants_[name] = sort;
  reindex();
  return *this;
}

std::optional<SortId> Language::find_sort(std::string_view name) const {
  for (std::size_t i = 0; i < sorts_.size(); ++i) {
    if (sorts_[i] == name) return static_cast<SortId>(i);
  }
  return std::nullopt;
}

SortId Language::sort_id(std::string_view name) const {
  auto s = find_sort(name);
  if (!s) throw SortError("undeclared sort '" + std::string(name) + "'");
  return *s;
}

std::optional<SymbolKind> Language::kind_of(std::string_view name) const {
  std::string key(name);
  if (relations_.count(key)) return SymbolKind::Relation;
  if (functions_.count(key)) return SymbolKind::Function;
  if (constants_.count(key)) return SymbolKind::Constant;
  return std::nullopt;
}

std::set<std::string> Language::symbol_names() const {
  std::set<std::string> out;
  for (const auto& [n, _] : relations_) out.insert(n);
  for (const auto& [n, _] : functions_) out.insert(n);
  for (const auto& [n, _] : constants_) out.insert(n);
  return out;
}

namespace {
int index_in(const std::vector<std::string>& names, std::string_view name, const char* what) {
  auto it = std::lower_bound(names.begin(), names.end(), name);
  if (it == names.end() || *it != name) {
    throw SortError(std::string("undeclared ") + what + " '" + std::string(name) + "'");
  }
  return static_cast<int>(it - names.begin());
}
}  // namespace

int Language::relation_index(std::string_view name) const {
  return index_in(relation_names_, name, "relation");
}
int Language::function_index(std::string_view name) const {
  return index_in(function_names_, name, "function");
}
int Language::constant_index(std::string_view name) const {
  return index_in(constant_names_, name, "constant");
}

bool Language::contains(const Language& other) const {
  if (other.sorts_.size() > sorts_.size()) return false;
  for (std::size_t i = 0; i < other.sorts_.size(); ++i) {
    if (other.sorts_[i] != sorts_[i]) return false;
  }
  for (const auto& [n, r] : other.relations_) {
    auto it = relations_.find(n);
    if (it == relations_.end() || it->second != r) return false;
  }
  for (const auto& [n, f] : other.functions_) {
    auto it = functions_.find(n);
    if (it == functions_.end() || it->second != f) return false;
  }
  for (const auto& [n, c] : other.constants_) {
    auto it = constants_.find(n);
    if (it == constants_.end() || it->second != c) return false;
  }
  return true;
}

Language Language::restrict_to(const std::set<std::string>& symbols) const {
  Language out(sorts_);
  for (const auto& [n, r] : relations_) {
    if (symbols.count(n)) out.add_relation(n, r.profile);
  }
  for (const auto& [n, f] : functions_) {
    if (symbols.count(n)) out.add_function(n, f.args, f.result);
  }
  for (const auto& [n, c] : constants_) {
    if (symbols.count(n)) out.add_constant(n, c);
  }
  return out;
}

namespace {
void require_same_sorts(const Language& a, const Language& b) {
  if (a.sorts() != b.sorts()) throw SortError("languages have different sort lists");
}
}  // namespace

Language intersect(const Language& a, const Language& b) {
  require_same_sorts(a, b);
  std::set<std::string> common;
  for (const auto& n : a.symbol_names()) {
    if (!b.has_symbol(n)) continue;
    bool same = false;
    if (a.relations().count(n) && b.relations().count(n)) {
      same = a.relations().at(n) == b.relations().at(n);
    } else if (a.functions().count(n) && b.functions().count(n)) {
      same = a.functions().at(n) == b.functions().at(n);
    } else if (a.constants().count(n) && b.constants().count(n)) {
      same = a.constants().at(n) == b.constants().at(n);
    }
    if (!same) throw SortError("symbol '" + n + "' has conflicting declarations");
    common.insert(n);
  }
  return a.restrict_to(common);
}

Language unite(const Language& a, const Language& b) {
  Language out = a;
  intersect(a, b);  // validates shared symbols agree
  for (const auto& [n, r] : b.relations()) {
    if (!out.has_symbol(n)) out.add_relation(n, r.profile);
  }
  for (const auto& [n, f] : b.functions()) {
    if (!out.has_symbol(n)) out.add_function(n, f.args, f.result);
  }
  for (const auto& [n, c] : b.constants()) {
    if (!out.has_symbol(n)) out.add_constant(n, c);
  }
  return out;
}

LanguageFamily make_language_family(std::vector<Language> members) {
  if (members.empty()) throw SortError("language family needs at least one member");
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].sorts() != members[0].sorts()) {
      throw SortError("member " + std::to_string(i) + " has a different sort list than member 0");
    }
  }
  LanguageFamily fam;
  if (members.size() == 1) {
    fam.intersection = members[0];
  } else {
    fam.intersection = intersect(members[0], members[1]);
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (!(intersect(members[i], members[j]) == fam.intersection)) {
          throw SortError("non-uniform pairwise intersection: members " + std::to_string(i) +
                          " and " + std::to_string(j) + " differ from members 0 and 1");
        }
      }
    }
  }
  fam.union_language = members[0];
  for (std::size_t i = 1; i < members.size(); ++i) {
    fam.union_language = unite(fam.union_language, members[i]);
  }
  fam.members = std::move(members);
  return fam;
}

}  // namespace fusionlab
