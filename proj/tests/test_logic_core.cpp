#include <random>

#include "doctest.h"
#include "fusionlab/error.hpp"
#include "fusionlab/formula.hpp"
#include "fusionlab/parser.hpp"
#include "support.hpp"

using namespace fusionlab;

namespace {
Language graph_lang() {
  Language l = Language::single_sorted();
  l.add_relation("E", 2);
  return l;
}
}  // namespace

TEST_CASE("parse universal negated atom") {
  Language g = graph_lang();
  Formula f = parse_formula("forall x: !E(x,x)", g);
  CHECK(f.kind == Formula::Kind::Forall);
  CHECK(f.bound.name == "x");
  REQUIRE(f.children.size() == 1);
  CHECK(f.children[0].kind == Formula::Kind::Not);
  CHECK(f.children[0].children[0].kind == Formula::Kind::Rel);
  CHECK(f.is_universal());
}

TEST_CASE("parse existential over flat functional atom") {
  Language l = Language::single_sorted();
  l.add_function("f", {0}, 0);
  Formula f = parse_formula("exists y: f(x)=y", l);
  CHECK(f.kind == Formula::Kind::Exists);
  CHECK(f.children[0].kind == Formula::Kind::Eq);
  CHECK(f.children[0].terms[0].kind == Term::Kind::Apply);
  auto fv = free_variables(f);
  REQUIRE(fv.size() == 1);
  CHECK(fv[0].name == "x");
}

TEST_CASE("arity violation is a sort error") {
  Language l = graph_lang();
  l.add_function("f", {0}, 0);
  CHECK_THROWS_AS(parse_formula("E(x,f(y,z))", l), SortError);
  CHECK_THROWS_AS(parse_formula("Q(x)", l), SortError);
  CHECK_THROWS_AS(parse_formula("forall x E(x,x)", l), ParseError);
  CHECK_THROWS_AS(parse_formula("E(_w0,x)", l), ParseError);
}

TEST_CASE("syntax errors carry a position") {
  Language g = graph_lang();
  try {
    parse_formula("E(x,y) & ", g);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 9);
  }
}

TEST_CASE("multi-sorted inference and annotations") {
  Language l({"M", "N"});
  l.add_relation("P", {0, 1});
  l.add_function("g", {1}, 0);
  Formula f = parse_formula("forall y: P(g(y), y) | x = g(y)", l);
  auto fv = free_variables(f);
  REQUIRE(fv.size() == 1);
  CHECK(fv[0].sort == 0);
  CHECK(f.bound.sort == 1);
  std::string printed = to_string(f, l);
  CHECK(printed.find("[N]") != std::string::npos);
  CHECK(parse_formula(printed, l) == f);
  CHECK_THROWS_AS(parse_formula("P(x, x)", l), SortError);
  CHECK_THROWS_AS(parse_formula("forall z: z = z", l), SortError);
}

TEST_CASE("language family of the hypergraph expansions") {
  Language l1 = Language::single_sorted();
  l1.add_relation("R", 3).add_relation("E1", 2);
  Language l2 = Language::single_sorted();
  l2.add_relation("R", 3).add_relation("E2", 2);
  LanguageFamily fam = make_language_family({l1, l2});
  CHECK(fam.intersection.relation_names() == std::vector<std::string>{"R"});
  CHECK(fam.union_language.relation_names() == std::vector<std::string>{"E1", "E2", "R"});
  CHECK(l1.contains(fam.intersection));

  Language lu = fam.union_language;
  CHECK(classify_formula(parse_formula("E1(x,y)", lu), fam) == std::set<int>{0});
  CHECK(classify_formula(parse_formula("R(x,y,z)", lu), fam) == std::set<int>{0, 1});
  CHECK(classify_formula(parse_formula("E1(x,y) & E2(y,z)", lu), fam).empty());
  CHECK(classify_formula(parse_formula("x = y", lu), fam) == std::set<int>{0, 1});

  Language l3 = Language::single_sorted();
  l3.add_relation("E1", 2).add_relation("E3", 2);
  try {
    make_language_family({l1, l2, l3});
    FAIL("expected non-uniform intersection error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("0") != std::string::npos);
  }
}

TEST_CASE("singleton family and sort mismatch") {
  Language g = graph_lang();
  auto fam = make_language_family({g});
  CHECK(fam.intersection == g);
  CHECK(fam.union_language == g);
  CHECK_THROWS_AS(make_language_family({}), Error);
  CHECK_THROWS_AS(make_language_family({g, Language({"M", "N"})}), Error);
}

TEST_CASE("symbol names are unique across kinds") {
  Language l = Language::single_sorted();
  l.add_relation("E", 2);
  CHECK_THROWS_AS(l.add_function("E", {0}, 0), SortError);
  CHECK_THROWS_AS(l.add_constant("E", 0), SortError);
  CHECK_THROWS_AS(l.add_relation("Q", std::vector<SortId>{3}), SortError);
}

TEST_CASE("substitution avoids capture") {
  Language g = graph_lang();
  Formula f = parse_formula("exists y: E(x,y)", g);
  Formula g2 = substitute(f, {{Variable{"x", 0}, Term::var("y", 0)}});
  auto fv = free_variables(g2);
  REQUIRE(fv.size() == 1);
  CHECK(fv[0].name == "y");
  CHECK(g2.bound.name != "y");
}

TEST_CASE("print/parse round trip on random formulas") {
  std::mt19937_64 rng(7);
  for (const Language& lang : testsupport::formula_languages()) {
    for (int i = 0; i < 150; ++i) {
      Formula f = testsupport::random_formula(lang, rng, 4, true);
      std::string text = to_string(f, lang);
      INFO(text);
      CHECK(parse_formula(text, lang) == f);
    }
  }
}

TEST_CASE("classification is antitone in the symbol set") {
  Language l1 = Language::single_sorted();
  l1.add_relation("R", 3).add_relation("E1", 2);
  Language l2 = Language::single_sorted();
  l2.add_relation("R", 3).add_relation("E2", 2);
  auto fam = make_language_family({l1, l2});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Formula a = testsupport::random_formula(fam.union_language, rng, 3, true);
    Formula b = testsupport::random_formula(fam.union_language, rng, 3, true);
    Formula both = Formula::conj({a, b});
    auto ca = classify_formula(a, fam);
    for (int m : classify_formula(both, fam)) CHECK(ca.count(m));
  }
}
