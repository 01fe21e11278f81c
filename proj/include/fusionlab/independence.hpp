#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fusionlab/class_spec.hpp"
#include "fusionlab/structure.hpp"

namespace fusionlab {

enum class IndepKind { FreeAmalgam, Edge, NonEdge };
std::string indep_name(IndepKind k);
/// "free-amalgam", "edge", "non-edge"; Error otherwise.
IndepKind parse_indep(const std::string& name);

struct TripleConfig {
  FiniteStructure host;
  ElemSet a, b, c;
};

/// A ⫝_C B. Edge and non-edge read the binary relation E.
bool indep_eval(IndepKind k, const FiniteStructure& host, const ElemSet& a, const ElemSet& b, const ElemSet& c);
inline bool indep_eval(IndepKind k, const TripleConfig& t) { return indep_eval(k, t.host, t.a, t.b, t.c); }

enum class IndepAxiom { Invariance, AlgebraicIndependence, Stationarity, FullExistence };
std::string axiom_name(IndepAxiom a);
IndepAxiom parse_axiom(const std::string& name);

struct IndepReport {
  IndepAxiom axiom = IndepAxiom::Invariance;
  bool holds = false;
  int size_limit = 0;
  std::size_t configs_checked = 0;
  std::optional<TripleConfig> witness;
  std::optional<TripleConfig> second;  // stationarity: the other extension
  std::optional<FiniteStructure> attempt;  // full existence: the failed extension shape
  std::vector<Elem> a_star;
  std::string detail;
  std::string header;  // scope of the finite restatement
};

/// Exhaustive finite restatement of one axiom over class members of size
/// <= size_limit. Full existence needs `expansion`, verified as a Fraisse
/// expansion at the same size before the check runs.
IndepReport check_indep_axiom(IndepKind k, const ClassSpec& spec, IndepAxiom axiom, const ClassSpec* expansion,
                              int size_limit, unsigned jobs = 0);

}  // namespace fusionlab
