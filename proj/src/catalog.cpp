#include "fusionlab/catalog.hpp"

#include <functional>
#include <map>

#include "fusionlab/error.hpp"

namespace fusionlab {

namespace {
Language relational(std::initializer_list<std::pair<const char*, int>> rels) {
  Language l = Language::single_sorted();
  for (const auto& [n, a] : rels) l.add_relation(n, a);
  return l;
}

ClassSpec& graph_relation(ClassSpec& c, const std::string& rel) {
  return c.declare_symmetric(rel).declare_irreflexive(rel);
}
}  // namespace

ClassSpec graphs_class() {
  ClassSpec c("graphs", relational({{"E", 2}}));
  graph_relation(c, "E").set_free_amalgamation(true);
  return c;
}

ClassSpec triangle_free_class() {
  ClassSpec c("triangle-free", relational({{"E", 2}}));
  graph_relation(c, "E").set_free_amalgamation(true);
  c.add_axiom("forall x, y, z: !(E(x,y) & E(y,z) & E(z,x))");
  return c;
}

ClassSpec hypergraph3_class() {
  ClassSpec c("hypergraphs3", relational({{"R", 3}}));
  graph_relation(c, "R").set_free_amalgamation(true);
  return c;
}

ClassSpec tournament_class() {
  ClassSpec c("tournaments", relational({{"E", 2}}));
  c.declare_irreflexive("E");
  c.add_axiom("forall x, y: x = y | (E(x,y) <-> !E(y,x))");
  return c;
}

ClassSpec k1_class() {
  ClassSpec c("K1", relational({{"R", 3}, {"E1", 2}}));
  graph_relation(c, "R");
  graph_relation(c, "E1").set_free_amalgamation(true);
  c.add_axiom("forall x, y, z: E1(x,y) & E1(y,z) & E1(z,x) -> R(x,y,z)");
  return c;
}

ClassSpec k2_class() {
  ClassSpec c("K2", relational({{"R", 3}, {"E2", 2}}));
  graph_relation(c, "R");
  graph_relation(c, "E2").set_free_amalgamation(true);
  c.add_axiom("forall x, y, z: E2(x,y) & E2(y,z) & E2(z,x) -> !R(x,y,z)");
  return c;
}

ClassSpec fusion_class() {
  ClassSpec c("fusion", relational({{"R", 3}, {"E1", 2}, {"E2", 2}}));
  graph_relation(c, "R");
  graph_relation(c, "E1");
  graph_relation(c, "E2").set_free_amalgamation(true);
  c.add_axiom("forall x, y, z: E1(x,y) & E1(y,z) & E1(z,x) -> R(x,y,z)");
  c.add_axiom("forall x, y, z: E2(x,y) & E2(y,z) & E2(z,x) -> !R(x,y,z)");
  return c;
}

ClassSpec bounded_equivalence_class() {
  ClassSpec c("bounded-equivalence", relational({{"E", 2}}));
  c.declare_symmetric("E");
  c.add_axiom("forall x: E(x,x)");
  c.add_axiom("forall x, y, z: E(x,y) & E(y,z) -> E(x,z)");
  c.add_axiom("forall x, y, z: E(x,y) & E(x,z) -> x = y | x = z | y = z");
  return c;
}

ClassSpec clique_predicate_class() {
  ClassSpec c("clique-predicate", relational({{"E", 2}, {"P", 1}}));
  graph_relation(c, "E");
  c.add_axiom("forall x, y: P(x) & P(y) & !(x = y) -> E(x,y)");
  return c;
}

ClassSpec unary_function_class() {
  Language l = Language::single_sorted();
  l.add_function("f", {0}, 0);
  return ClassSpec("unary-function", l);
}

LanguageFamily hypergraph_fusion_family() {
  return make_language_family({k1_class().language(), k2_class().language()});
}

FusionSpec hypergraph_fusion() { return FusionSpec{hypergraph_fusion_family(), {k1_class(), k2_class()}}; }

namespace {
const std::map<std::string, std::function<ClassSpec()>>& registry() {
  static const std::map<std::string, std::function<ClassSpec()>> r = {
      {"graphs", graphs_class},
      {"triangle-free", triangle_free_class},
      {"hypergraphs3", hypergraph3_class},
      {"tournaments", tournament_class},
      {"K1", k1_class},
      {"K2", k2_class},
      {"fusion", fusion_class},
      {"bounded-equivalence", bounded_equivalence_class},
      {"clique-predicate", clique_predicate_class},
      {"unary-function", unary_function_class},
  };
  return r;
}
}  // namespace

std::vector<std::string> builtin_class_names() {
  std::vector<std::string> out;
  for (const auto& [n, f] : registry()) out.push_back(n);
  return out;
}

ClassSpec builtin_class(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw Error("unknown built-in class '" + name + "'");
  return it->second();
}

}  // namespace fusionlab
