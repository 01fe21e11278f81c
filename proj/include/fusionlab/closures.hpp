#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fusionlab/class_spec.hpp"
#include "fusionlab/error.hpp"
#include "fusionlab/normal_forms.hpp"
#include "fusionlab/structure.hpp"

namespace fusionlab {

struct ClosureOperator {
  std::string name;
  std::function<ElemSet(const FiniteStructure&, const ElemSet&)> apply;
  std::string provenance;  // which language or theory it stands for
};

/// An operator broke a closure law during a run.
class ClosureDefect : public Error {
 public:
  ClosureDefect(const std::string& op, const std::string& law)
      : Error("closure operator " + op + " is not " + law), op_(op), law_(law) {}
  const std::string& op() const { return op_; }
  const std::string& law() const { return law_; }

 private:
  std::string op_, law_;
};

ClosureOperator identity_closure();
/// Closure under the named functions and constants (all of them when empty).
ClosureOperator function_closure(std::vector<std::string> functions = {});
/// Adds every b with R(a, b) for a already present, until stable.
ClosureOperator partner_closure(const std::string& rel);
/// Generated substructure followed by the library's bounded witnesses.
ClosureOperator bcl_operator(std::vector<BoundedFormula> library);

/// Extensive / monotone / idempotent on the given sample of subsets; one
/// line per violation.
std::vector<std::string> closure_law_defects(const ClosureOperator& op, const FiniteStructure& m,
                                             const std::vector<ElemSet>& sample);
/// Every subset of a structure with at most 10 elements, otherwise a seeded
/// sample of `count` subsets.
std::vector<ElemSet> subset_sample(const FiniteStructure& m, std::size_t count = 256, std::uint64_t seed = 0);

enum class FixpointStrategy { RoundRobin, Worklist };

/// Least superset of `seed` closed under every operator. Throws
/// ClosureDefect when an operator shrinks its input.
ElemSet ccl_fixpoint(const FiniteStructure& m, const ElemSet& seed, const std::vector<ClosureOperator>& ops,
                     FixpointStrategy strategy = FixpointStrategy::RoundRobin);

/// Closure of `seed` under generated substructure and, for each library
/// formula phi(x; y), every y-component of a tuple b with phi(a, b) for a
/// from the current set. Library entries must carry a verified bound.
ElemSet bcl_closure(const FiniteStructure& m, const ElemSet& seed, const std::vector<BoundedFormula>& library);

struct AclVerdict {
  bool non_algebraic = false;
  std::optional<FiniteStructure> witness;  // the host itself or host plus the duplicate
  Elem duplicate;
  int budget = 0;
  std::string note;
};

/// Looks for a class extension of `host` (at most `budget` elements) with a
/// second point of the same quantifier-free type over `base` as `point`.
AclVerdict acl_test_duplication(const ClassSpec& spec, const FiniteStructure& host, const ElemSet& base, Elem point,
                                int budget);
/// base plus every point outside it that admits no duplicate.
ElemSet acl_by_duplication(const ClassSpec& spec, const FiniteStructure& host, const ElemSet& base, int budget);

}  // namespace fusionlab
