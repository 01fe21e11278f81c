#include <random>

#include "doctest.h"
#include "fusionlab/error.hpp"
#include "fusionlab/parser.hpp"
#include "fusionlab/search.hpp"
#include "support.hpp"

using namespace fusionlab;
using testsupport::graph;

TEST_CASE("evaluate: spec examples") {
  auto k3 = graph(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(evaluate(k3, parse_formula("forall x: exists y: E(x,y)", k3.language()), {}));
  auto one = graph(1, {});
  CHECK_FALSE(evaluate(one, parse_formula("exists y: E(x,y)", one.language()), {{Variable{"x", 0}, 0}}));
  auto p3 = graph(3, {{0, 1}, {1, 2}});
  CHECK_FALSE(evaluate(p3, parse_formula("E(x,z)", p3.language()), {{Variable{"x", 0}, 0}, {Variable{"z", 0}, 2}}));
  CHECK_THROWS_AS(evaluate(p3, parse_formula("E(x,z)", p3.language()), {{Variable{"x", 0}, 0}}), Error);
}

TEST_CASE("evaluate agrees with the naive evaluator") {
  std::mt19937_64 rng(11);
  int checked = 0;
  auto langs = testsupport::formula_languages();
  langs.push_back(testsupport::two_sorted_language());
  for (int i = 0; i < 500; ++i) {
    const Language& lang = langs[static_cast<std::size_t>(i) % langs.size()];
    std::vector<int> sizes;
    for (int s = 0; s < lang.sort_count(); ++s) sizes.push_back(1 + static_cast<int>(rng() % 4));
    FiniteStructure m = testsupport::random_structure(lang, sizes, rng);
    Formula f = testsupport::random_formula(lang, rng, 4, true);
    testsupport::for_each_assignment(m, free_variables(f), [&](const Assignment& a) {
      CHECK(evaluate(m, f, a) == testsupport::naive_eval(m, f, testsupport::naive_env(a)));
      ++checked;
    });
  }
  CHECK(checked >= 500);
}

TEST_CASE("generated substructure") {
  auto g = graph(4, {{0, 1}});
  auto gen = generated_substructure(g, {Elem{0, 1}, Elem{0, 3}});
  CHECK(gen.structure.size(0) == 2);

  Language l = Language::single_sorted();
  l.add_function("f", {0}, 0).add_constant("c", 0);
  FiniteStructure m(l, {4});
  m.set_value("f", {0}, 1);
  m.set_value("f", {1}, 1);
  m.set_value("f", {2}, 3);
  m.set_value("f", {3}, 3);
  m.set_constant("c", 2);
  CHECK(generated_closure(m, {Elem{0, 0}}) == ElemSet{{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  auto none = generated_substructure(m, {});
  CHECK(none.structure.size(0) == 2);
  CHECK(none.inclusion.map[0] == std::vector<int>{2, 3});
  CHECK(is_embedding(none.structure, m, none.inclusion));
}

TEST_CASE("find_embeddings: spec examples") {
  auto edge = graph(2, {{0, 1}});
  auto k3 = graph(3, {{0, 1}, {1, 2}, {2, 0}});
  auto p3 = graph(3, {{0, 1}, {1, 2}});
  CHECK(find_embeddings(edge, k3).size() == 6);
  CHECK(find_embeddings(k3, p3).empty());
  Embedding id = Embedding::identity({3});
  auto only = find_embeddings(p3, p3, id);
  REQUIRE(only.size() == 1);
  CHECK(only[0].is_identity());
  // Embeddings reflect non-edges: an independent pair does not embed as an edge.
  auto two = graph(2, {});
  CHECK(find_embeddings(two, k3).empty());
  CHECK(find_embeddings(two, p3).size() == 2);
}

TEST_CASE("automorphisms: spec examples and group laws") {
  auto k3 = graph(3, {{0, 1}, {1, 2}, {2, 0}});
  auto p3 = graph(3, {{0, 1}, {1, 2}});  // 0-1-2, middle 1
  CHECK(automorphisms(k3).list.size() == 6);
  CHECK(automorphisms(p3).list.size() == 2);
  CHECK(automorphisms(p3, {Elem{0, 0}}).list.size() == 1);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    auto m = testsupport::random_structure(testsupport::formula_languages()[4], {4}, rng);
    auto aut = automorphisms(m);
    REQUIRE(!aut.list.empty());
    CHECK(aut.list.front().is_identity());
    std::set<Embedding> all(aut.list.begin(), aut.list.end());
    for (const auto& g : aut.list) {
      CHECK(all.count(g.inverse(m.sizes())));
      for (const auto& h : aut.list) CHECK(all.count(g.compose(h)));
    }
  }
}

TEST_CASE("orbits refine formula equivalence") {
  std::mt19937_64 rng(9);
  Language lang = testsupport::formula_languages()[4];
  for (int i = 0; i < 30; ++i) {
    auto m = testsupport::random_structure(lang, {4}, rng, 35);
    auto aut = automorphisms(m);
    auto orbits = aut.orbits(m, 2);
    std::vector<Formula> probes;
    for (int j = 0; j < 6; ++j) {
      Formula f = testsupport::random_formula(lang, rng, 3, true);
      // Close every free variable but x, y.
      for (const auto& v : free_variables(f)) {
        if (v.name != "x" && v.name != "y") f = Formula::exists(v, f);
      }
      probes.push_back(f);
    }
    for (const auto& orbit : orbits) {
      for (const auto& f : probes) {
        auto value = [&](const std::vector<Elem>& t) {
          Assignment a;
          for (const auto& v : free_variables(f)) a[v] = v.name == "x" ? t[0].index : t[1].index;
          return evaluate(m, f, a);
        };
        bool first = value(orbit.front());
        for (const auto& t : orbit) CHECK(value(t) == first);
      }
    }
  }
}

TEST_CASE("canonical code is an isomorphism invariant") {
  std::mt19937_64 rng(2);
  Language lang = testsupport::formula_languages()[0];
  for (int i = 0; i < 60; ++i) {
    auto m = testsupport::random_structure(lang, {4}, rng);
    // Random relabeling.
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    FiniteStructure n(lang, {4});
    for (const auto& t : m.tuples("E")) n.set("E", {perm[static_cast<std::size_t>(t[0])], perm[static_cast<std::size_t>(t[1])]});
    for (int x = 0; x < 4; ++x) n.set_value("f", {perm[static_cast<std::size_t>(x)]}, perm[static_cast<std::size_t>(m.value("f", {x}))]);
    CHECK(canonical_code(m) == canonical_code(n));
    CHECK(find_isomorphism(m, n).has_value());
    auto c = canonical_form(m);
    CHECK(canonical_code(c) == canonical_code(m));
    CHECK(find_isomorphism(c, m).has_value());
  }
}

TEST_CASE("add_element grows tables with unknown cells") {
  auto g = graph(2, {{0, 1}});
  Elem e = g.add_element(0, "n");
  CHECK(e.index == 2);
  CHECK(g.holds("E", {0, 1}));
  CHECK(g.cell(0, {2, 0}) == kUnknownCell);
  CHECK(g.name(e) == "n");
  CHECK_FALSE(g.is_complete());
}
