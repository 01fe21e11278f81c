#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fusionlab/structure.hpp"

namespace fusionlab {

/// Labeled-search budget: FUSIONLAB_BUDGET if set, else 4'000'000.
std::size_t enumeration_budget();

/// Visits every complete labeled structure with the given carrier sizes
/// (relations, function tables, constants); stop by returning false.
void for_each_labeled(const Language& lang, const std::vector<int>& sizes,
                      const std::function<bool(const FiniteStructure&)>& visit);

/// Partial element map; -1 marks unmapped entries.
Embedding empty_partial(const std::vector<int>& source_sizes);

enum class MapKind { Embedding, Isomorphism };

/// Visits every embedding (or isomorphism) source -> target extending
/// `partial`, in lexicographic order of the map (sorts in order, elements in
/// index order). Stops early when `visit` returns false. Unknown source cells
/// are not checked.
void for_each_embedding(const FiniteStructure& source, const FiniteStructure& target,
                        const std::optional<Embedding>& partial, MapKind kind,
                        const std::function<bool(const Embedding&)>& visit);

std::vector<Embedding> find_embeddings(const FiniteStructure& source, const FiniteStructure& target,
                                       const std::optional<Embedding>& partial = std::nullopt);
std::optional<Embedding> first_embedding(const FiniteStructure& source, const FiniteStructure& target,
                                         const std::optional<Embedding>& partial = std::nullopt);
std::optional<Embedding> find_isomorphism(const FiniteStructure& a, const FiniteStructure& b,
                                          const std::optional<Embedding>& partial = std::nullopt);
bool is_embedding(const FiniteStructure& source, const FiniteStructure& target, const Embedding& e);

struct AutomorphismSet {
  ElemSet fixed;
  std::vector<Embedding> list;  // identity first

  /// Orbits of the group on tuples of elements of length `arity`, each orbit
  /// sorted, orbits ordered by their least tuple.
  std::vector<std::vector<std::vector<Elem>>> orbits(const FiniteStructure& m, int arity) const;
};

/// All automorphisms fixing `fixed` pointwise; BudgetError beyond the budget.
AutomorphismSet automorphisms(const FiniteStructure& m, const ElemSet& fixed = {});

/// Least set containing the seed and all constants, closed under functions.
ElemSet generated_closure(const FiniteStructure& m, const ElemSet& seed);

struct Generated {
  FiniteStructure structure;
  Embedding inclusion;  // generated -> m
};
Generated generated_substructure(const FiniteStructure& m, const ElemSet& seed);

/// Copy of m with element e renamed to old_to_new(e) (a per-sort bijection).
FiniteStructure relabel(const FiniteStructure& m, const Embedding& old_to_new);

/// Minimal table code over all per-sort relabelings. Elements in `pinned`
/// keep their labels (they come first in their sort and are not permuted).
/// Two structures get equal codes iff isomorphic (over the pinned prefix).
std::vector<int> canonical_code(const FiniteStructure& m, const std::vector<int>& pinned = {});

/// The relabeled structure realizing canonical_code (pinned as above).
FiniteStructure canonical_form(const FiniteStructure& m, const std::vector<int>& pinned = {});

}  // namespace fusionlab
