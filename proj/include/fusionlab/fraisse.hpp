#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fusionlab/class_spec.hpp"
#include "fusionlab/structure.hpp"

namespace fusionlab {

/// Base A with embeddings f1: A -> B1, f2: A -> B2.
struct AmalgamProblem {
  FiniteStructure base, b1, b2;
  Embedding f1, f2;
};

/// C with g1: B1 -> C, g2: B2 -> C agreeing on A.
struct Amalgam {
  FiniteStructure structure;
  Embedding g1, g2;
};

/// Searches for an amalgam in the class (images meeting exactly in A when
/// `disjoint`). Identifications are tried before adding cross relations;
/// complete for relational classes.
std::optional<Amalgam> find_amalgam(const ClassSpec& spec, const AmalgamProblem& p, bool disjoint);

/// B1 ⊔_A B2 with exactly the relation tuples of the two sides. Throws
/// ClassViolation naming the axiom when `spec` is given and rejects it.
Amalgam free_amalgam(const AmalgamProblem& p, const ClassSpec* spec = nullptr);

enum class Property { JEP, AP, DAP };
std::string property_name(Property p);

struct PropertyReport {
  Property property = Property::AP;
  bool holds = false;
  int size_limit = 0;
  std::size_t problems = 0;  // problems examined
  std::optional<AmalgamProblem> witness;  // JEP witnesses have an empty base
};

/// Exhaustive check over class members of size <= size_limit; problems are
/// taken up to isomorphism over the base. `jobs` 0 = hardware concurrency.
std::vector<PropertyReport> check_class_properties(const ClassSpec& spec, int size_limit,
                                                   const std::set<Property>& properties, unsigned jobs = 0);

/// One-point extensions of `base` in the class (the new point is the last
/// element of sort `sort`), in completion order.
std::vector<FiniteStructure> one_point_extensions(const ClassSpec& spec, const FiniteStructure& base, SortId sort);

struct BuildStep {
  std::vector<Elem> subset;  // elements of the model at that time
  std::string type;          // cells of the extension at the new point
  Elem added;
};

struct GenericModel {
  FiniteStructure structure;
  std::string class_name;
  std::vector<BuildStep> log;
  std::uint64_t seed = 0;
  std::size_t pending = 0;  // unrealized requirements when the budget ran out
  bool quiescent = false;
};

struct BuildOptions {
  bool verify_steps = false;  // re-check class membership after each step
  bool skip_precheck = false;
};

/// Saturates one-point extension requirements over subsets of size <=
/// ext_size in FIFO order until `budget` elements or quiescence. Cells
/// between the new point and elements outside the subset are completed by a
/// seeded random search.
GenericModel build_generic(const ClassSpec& spec, int budget, int ext_size, std::uint64_t seed,
                           const BuildOptions& opts = {});

struct MissingExtension {
  std::vector<Elem> subset;
  FiniteStructure extension;  // subset (in order) plus the new point last
};

struct ExtensionReport {
  bool satisfied = true;
  std::size_t requirements = 0;
  std::vector<MissingExtension> missing;
};

/// Every one-point class extension of every subset of size <= ext_size
/// must be realized in the model by a point outside the subset.
ExtensionReport check_extension_axioms(const FiniteStructure& model, const ClassSpec& spec, int ext_size,
                                       std::size_t max_missing = SIZE_MAX);

struct ExpansionVerdict {
  bool verified = false;
  int size_limit = 0;
  std::string failure;  // empty when verified
  std::optional<FiniteStructure> witness;
  std::size_t members_checked = 0;
  std::size_t extensions_lifted = 0;
};

ExpansionVerdict check_fraisse_expansion(const ClassSpec& base, const ClassSpec& expansion, int size_limit);

/// A literal about the new point c and base elements; nullopt marks c.
struct PointLiteral {
  bool positive = true;
  std::string symbol;
  std::vector<std::optional<Elem>> args;
  bool operator==(const PointLiteral&) const = default;
  auto operator<=>(const PointLiteral&) const = default;
};

struct QfType {
  std::vector<Elem> base;
  std::vector<PointLiteral> literals;
};

/// Member classes of a language family (each must declare free amalgamation).
struct FusionSpec {
  LanguageFamily family;
  std::vector<ClassSpec> members;
};

std::string to_string(const PointLiteral& l, const FiniteStructure& m);

struct Realization {
  FiniteStructure structure;
  Elem point;
};

/// Adjoins one point realizing types[i] in the i-th reduct. Unforced cells
/// stay false. Throws Error naming the clashing literal when two types
/// disagree on an intersection literal, ClassViolation when a reduct leaves
/// its class.
Realization realize_joint_type(const FiniteStructure& model, const std::vector<QfType>& types, const FusionSpec& fusion);

/// First index in [0, n) where pred holds, evaluated by up to `jobs` threads;
/// the answer is the same as a sequential scan.
std::optional<std::size_t> parallel_find_first(std::size_t n, unsigned jobs,
                                               const std::function<bool(std::size_t)>& pred);

}  // namespace fusionlab
