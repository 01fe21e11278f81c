#pragma once

#include <string>
#include <vector>

#include "fusionlab/class_spec.hpp"
#include "fusionlab/fraisse.hpp"
#include "fusionlab/language.hpp"

namespace fusionlab {

ClassSpec graphs_class();
ClassSpec triangle_free_class();
ClassSpec hypergraph3_class();
ClassSpec tournament_class();
/// 3-hypergraph R plus graph E1 whose triangles are R-hyperedges.
ClassSpec k1_class();
/// 3-hypergraph R plus graph E2 whose triangles are R-non-edges.
ClassSpec k2_class();
/// Both of the above on one carrier (language {R, E1, E2}).
ClassSpec fusion_class();
/// Equivalence relation E with classes of size at most 2.
ClassSpec bounded_equivalence_class();
/// Graphs with a unary P naming a clique.
ClassSpec clique_predicate_class();
/// One unary function, no axioms.
ClassSpec unary_function_class();

/// Family {R,E1}, {R,E2} with intersection {R}.
LanguageFamily hypergraph_fusion_family();
/// The family with member classes K1, K2.
FusionSpec hypergraph_fusion();

std::vector<std::string> builtin_class_names();
/// Throws Error for unknown names.
ClassSpec builtin_class(const std::string& name);

}  // namespace fusionlab
