#include <random>

#include "doctest.h"
#include "fusionlab/catalog.hpp"
#include "fusionlab/error.hpp"
#include "fusionlab/normal_forms.hpp"
#include "fusionlab/parser.hpp"
#include "fusionlab/search.hpp"
#include "support.hpp"

using namespace fusionlab;
using testsupport::graph;

namespace {

// Input and disjunction agree under the naive evaluator on every structure
// with 1..max_size elements.
bool equivalent_upto(const Formula& f, const std::vector<EFlatFormula>& dnf, const Language& lang, int max_size) {
  bool ok = true;
  auto vars = free_variables(f);
  std::vector<Formula> parts;
  for (const auto& e : dnf) parts.push_back(e.to_formula(lang));
  for (int n = 1; n <= max_size && ok; ++n) {
    testsupport::for_each_structure(lang, {n}, [&](const FiniteStructure& m) {
      if (!ok) return;
      testsupport::for_each_assignment(m, vars, [&](const Assignment& a) {
        auto env = testsupport::naive_env(a);
        bool lhs = testsupport::naive_eval(m, f, env);
        bool rhs = false;
        for (const auto& p : parts) rhs = rhs || testsupport::naive_eval(m, p, env);
        if (lhs != rhs) ok = false;
      });
    });
  }
  return ok;
}

Language fun_lang() {
  Language l = Language::single_sorted();
  l.add_relation("R", 1).add_function("f", {0}, 0);
  return l;
}

}  // namespace

TEST_CASE("flatten R(f(x))") {
  Language l = fun_lang();
  Formula f = parse_formula("R(f(x))", l);
  auto out = flatten_to_eflat(f, l);
  REQUIRE(out.size() == 1);
  REQUIRE(out[0].witnesses.size() == 1);
  REQUIRE(out[0].body.size() == 2);
  CHECK(out[0].body[0].kind == FlatLiteral::Kind::Fun);
  CHECK(out[0].body[1].kind == FlatLiteral::Kind::Rel);
  CHECK(to_string(out[0].to_formula(l), l) == "exists _w0: f(x)=_w0 & R(_w0)");
  CHECK(equivalent_upto(f, out, l, 3));
}

TEST_CASE("flatten trivial cases") {
  Language g = graph(1, {}).language();
  auto eq = flatten_to_eflat(parse_formula("x = y", g), g);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0].witnesses.empty());
  CHECK(eq[0].body.size() == 1);
  auto taut = flatten_to_eflat(parse_formula("E(x,y) | !E(x,y)", g), g);
  REQUIRE(taut.size() == 2);
  for (const auto& d : taut) {
    CHECK(d.witnesses.empty());
    CHECK(d.body.size() == 1);
  }
  CHECK_THROWS_AS(flatten_to_eflat(parse_formula("exists y: E(x,y)", g), g), Error);
}

TEST_CASE("atomic and negated atomic inputs give one disjunct") {
  Language l = Language::single_sorted();
  l.add_relation("E", 2).add_function("f", {0}, 0).add_function("g", {0, 0}, 0).add_constant("c", 0);
  for (const char* text : {"E(f(x), g(c, f(y)))", "!E(f(f(x)), c)", "f(x) = g(x, y)", "!(c = f(c))"}) {
    auto out = flatten_to_eflat(parse_formula(text, l), l);
    CHECK(out.size() == 1);
    CHECK_FALSE(check_unique_witness(out[0], l, 2).has_value());
  }
}

TEST_CASE("literal budget") {
  Language g = graph(1, {}).language();
  std::string text;
  for (int i = 0; i < 6; ++i) {
    std::string x = "x" + std::to_string(i), y = "y" + std::to_string(i);
    text += std::string(i ? " & " : "") + "(E(" + x + "," + y + ") | E(" + y + "," + x + ") | " + x + " = " + y + ")";
  }
  CHECK_THROWS_AS(flatten_to_eflat(parse_formula(text, g), g), BudgetError);
  CHECK(flatten_to_eflat(parse_formula(text, g), g, 100000).size() == 729);
}

TEST_CASE("unique witness check detects genuinely ambiguous witnesses") {
  Language g = graph(1, {}).language();
  EFlatFormula e;
  e.witnesses = {Variable{"_w0", 0}};
  FlatLiteral lit;
  lit.kind = FlatLiteral::Kind::Rel;
  lit.symbol = "E";
  lit.args = {Variable{"x", 0}, Variable{"_w0", 0}};
  e.body = {lit};
  auto fail = check_unique_witness(e, g, 3);
  REQUIRE(fail.has_value());
  CHECK(fail->witnesses >= 2);
}

TEST_CASE("random quantifier-free formulas flatten to equivalent E-flat disjunctions") {
  std::mt19937_64 rng(17);
  auto langs = testsupport::formula_languages();
  for (int i = 0; i < 40; ++i) {
    const Language& lang = langs[static_cast<std::size_t>(i) % langs.size()];
    Formula f = testsupport::random_formula(lang, rng, 3, false);
    INFO(to_string(f, lang));
    auto out = flatten_to_eflat(f, lang);
    CHECK(equivalent_upto(f, out, lang, 2));
    for (const auto& d : out) {
      for (const auto& l : d.body) CHECK(as_flat_literal(l.to_formula(lang)).has_value());
      CHECK_FALSE(check_unique_witness(d, lang, 3).has_value());
    }
  }
}

TEST_CASE("split by language") {
  LanguageFamily fam = hypergraph_fusion_family();
  const Language& lu = fam.union_language;
  Formula f = parse_formula("E1(x,y) & E2(y,z) & R(x,y,z)", lu);
  auto dnf = flatten_to_eflat(f, lu);
  REQUIRE(dnf.size() == 1);
  auto parts = split_flat_by_language(dnf[0].body, fam);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].size() == 2);
  CHECK(parts[1].size() == 1);
  CHECK(parts[0][1].symbol == "R");
  CHECK(parts[1][0].symbol == "E2");

  auto only_cap = split_flat_by_language(flatten_to_eflat(parse_formula("R(x,y,z) & x = y", lu), lu)[0].body, fam);
  REQUIRE(only_cap.size() == 1);
  CHECK(only_cap.begin()->first == 0);
  CHECK(split_flat_by_language({}, fam).empty());

  // Re-conjoining is a permutation of the input, and the conjunctions agree.
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    Formula g = testsupport::random_formula(lu, rng, 3, false);
    for (const auto& d : flatten_to_eflat(g, lu)) {
      auto split = split_flat_by_language(d.body, fam);
      std::vector<FlatLiteral> back;
      for (const auto& [k, v] : split) back.insert(back.end(), v.begin(), v.end());
      auto a = d.body;
      std::sort(a.begin(), a.end());
      std::sort(back.begin(), back.end());
      CHECK(a == back);
      for (const auto& [k, v] : split) {
        for (const auto& l : v) CHECK(classify_formula(l.to_formula(lu), fam).count(k));
      }
    }
  }
}

TEST_CASE("flat diagram of K3") {
  auto k3 = graph(3, {{0, 1}, {1, 2}, {2, 0}});
  auto diag = flat_diagram(k3);
  // Oracle: every candidate flat sentence, kept with the sign that is true.
  int expected = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      expected += 2;  // a=b or its negation; E(a,b) or its negation
    }
  }
  CHECK(diag.size() == 18);
  CHECK(static_cast<int>(diag.size()) == expected);
  int eq_pos = 0, eq_neg = 0, rel_pos = 0, rel_neg = 0;
  for (const auto& l : diag) {
    if (l.kind == FlatLiteral::Kind::Eq) (l.positive ? eq_pos : eq_neg)++;
    if (l.kind == FlatLiteral::Kind::Rel) (l.positive ? rel_pos : rel_neg)++;
  }
  CHECK(eq_pos == 3);
  CHECK(eq_neg == 6);
  CHECK(rel_pos == 6);
  CHECK(rel_neg == 3);

  Language empty = Language::single_sorted();
  FiniteStructure one(empty, {1});
  auto d1 = flat_diagram(one);
  REQUIRE(d1.size() == 1);
  CHECK(to_string(d1[0], one) == "0=0");

  auto k4 = graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  Embedding inc{{{0, 1, 2}}};
  CHECK(diagram_satisfied(diag, k4, inc));
}

TEST_CASE("diagram satisfaction coincides with embeddings") {
  Language l = Language::single_sorted();
  l.add_relation("E", 2).add_relation("P", 1);
  ClassSpec cls("graphs-with-predicate", l);
  cls.declare_symmetric("E").declare_irreflexive("E");
  auto small = enumerate_up_to(cls, 3, 1);
  auto large = enumerate_up_to(cls, 4, 1);
  int pairs = 0;
  for (const auto& a : small) {
    auto diag = flat_diagram(a);
    for (const auto& b : large) {
      auto embs = find_embeddings(a, b);
      std::set<Embedding> set(embs.begin(), embs.end());
      std::size_t satisfied = 0;
      // Every naming map A -> B, injective or not.
      Embedding h = empty_partial(a.sizes());
      std::function<void(int)> rec = [&](int i) {
        if (i == a.size(0)) {
          bool sat = diagram_satisfied(diag, b, h);
          CHECK(sat == (set.count(h) > 0));
          satisfied += sat;
          return;
        }
        for (int v = 0; v < b.size(0); ++v) {
          h.map[0][static_cast<std::size_t>(i)] = v;
          rec(i + 1);
        }
      };
      rec(0);
      CHECK(satisfied == embs.size());
      ++pairs;
    }
  }
  CHECK(pairs > 100);
}

TEST_CASE("morleyization") {
  auto k3 = graph(3, {{0, 1}, {1, 2}, {2, 0}});
  const Language& g = k3.language();
  Formula phi = parse_formula("exists y: E(x,y)", g);
  auto res = morleyize(g, {phi});
  CHECK(res.language.relation_names() == std::vector<std::string>{"E", "Phi0"});
  CHECK(res.language.relations().at("Phi0").profile == std::vector<SortId>{0});
  REQUIRE(res.axioms.size() == 1);
  CHECK(to_string(res.axioms[0], res.language) == "forall x: Phi0(x) <-> (exists y: E(x,y))");
  auto ex = res.expand(k3);
  CHECK(ex.tuple_count(ex.language().relation_index("Phi0")) == 3);
  for (const auto& ax : res.axioms) CHECK(evaluate(ex, ax, {}));

  auto none = morleyize(g, {});
  CHECK(none.language == g);
  CHECK(none.axioms.empty());
  CHECK_THROWS_AS(morleyize(g, {phi, phi}), Error);

  // Quantifier-free input: identical truth tables on all graphs-language
  // structures of size <= 3.
  Formula qf = parse_formula("E(x,y) & !E(y,x) | x = y", g);
  auto r2 = morleyize(g, {qf}, {"Phi0"});
  CHECK(r2.symbols[0] == "Phi1");
  for (int n = 1; n <= 3; ++n) {
    testsupport::for_each_structure(g, {n}, [&](const FiniteStructure& m) {
      auto e = r2.expand(m);
      testsupport::for_each_assignment(m, r2.arguments[0], [&](const Assignment& a) {
        Tuple t;
        for (const auto& v : r2.arguments[0]) t.push_back(a.at(v));
        CHECK(e.holds("Phi1", t) == testsupport::naive_eval(m, qf, testsupport::naive_env(a)));
      });
    });
  }
}

TEST_CASE("check_bounded") {
  ClassSpec fun = unary_function_class();
  Variable x{"x", 0}, y{"y", 0};
  auto v1 = check_bounded(parse_formula("f(x) = y", fun.language()), {x}, {y}, fun, 1, 3);
  CHECK(v1.verified);
  CHECK(v1.note.find("3") != std::string::npos);

  ClassSpec g = graphs_class();
  auto v2 = check_bounded(parse_formula("E(x,y)", g.language()), {x}, {y}, g, 2, 4);
  REQUIRE_FALSE(v2.verified);
  REQUIRE(v2.witness.has_value());
  auto star = graph(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(find_isomorphism(*v2.witness, star).has_value());
  CHECK(v2.count == 3);

  auto v3 = check_bounded(parse_formula("x = y", g.language()), {x}, {y}, g, 1, 4);
  CHECK(v3.verified);

  Language other = Language::single_sorted();
  other.add_relation("Q", 1);
  CHECK_THROWS_AS(check_bounded(parse_formula("Q(x)", other), {x}, {}, g, 1, 2), SortError);
}

TEST_CASE("conjoin_bounded") {
  Variable x{"x", 0}, y{"y", 0}, z{"z", 0};
  ClassSpec g = graphs_class();
  BoundedFormula a{parse_formula("E(x,y)", g.language()), {x}, {y}, 2, {true, 0, "declared"}};
  BoundedFormula b{parse_formula("E(y,x) & !(y = x)", g.language()), {x}, {y}, 3, {true, 0, "declared"}};
  auto c = conjoin_bounded(a, b);
  CHECK(c.bound == 6);
  REQUIRE(c.y.size() == 2);
  CHECK(c.y[0] == y);
  CHECK(c.y[1] != y);

  BoundedFormula one{parse_formula("E(x,y)", g.language()), {x}, {y}, 1, {true, 0, ""}};
  CHECK(conjoin_bounded(one, one).bound == 1);
  BoundedFormula plain{parse_formula("E(x,z)", g.language()), {x, z}, {}, 1, {true, 0, ""}};
  CHECK(conjoin_bounded(plain, b).bound == 3);

  // Verified conjuncts give a product bound that verifies too.
  Formula fa = parse_formula("E(x,y)", g.language());
  Formula fb = parse_formula("x = y | E(x,y)", g.language());
  auto ba = make_bounded(fa, {x}, {y}, 3, check_bounded(fa, {x}, {y}, g, 3, 4));
  auto bb = make_bounded(fb, {x}, {y}, 4, check_bounded(fb, {x}, {y}, g, 4, 4));
  auto prod = conjoin_bounded(ba, bb);
  CHECK(prod.bound == 12);
  CHECK(prod.record.verified_size == 4);
  CHECK(check_bounded(prod.formula, prod.x, prod.y, g, prod.bound, 4).verified);
  CHECK_FALSE(check_bounded(prod.formula, prod.x, prod.y, g, 8, 4).verified);
  CHECK_THROWS_AS(make_bounded(fa, {x}, {y}, 2, check_bounded(fa, {x}, {y}, g, 2, 4)), Error);
}
