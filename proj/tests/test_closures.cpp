#include <random>

#include "doctest.h"
#include "fusionlab/catalog.hpp"
#include "fusionlab/closures.hpp"
#include "fusionlab/parser.hpp"
#include "fusionlab/search.hpp"
#include "support.hpp"

using namespace fusionlab;

namespace {

Language op_language() {
  Language l = Language::single_sorted();
  l.add_function("f", {0}, 0);
  l.add_function("g", {0}, 0);
  l.add_relation("P", 2);
  l.add_relation("Q", 2);
  return l;
}

// One naive step of each operator kind, iterated by the caller.
ElemSet naive_step(const FiniteStructure& m, const ElemSet& s, int kind) {
  ElemSet out = s;
  for (const Elem& e : s) {
    switch (kind) {
      case 1:
        out.insert(Elem{0, m.value("f", {e.index})});
        break;
      case 2:
        out.insert(Elem{0, m.value("g", {e.index})});
        break;
      case 3:
      case 4:
        for (int b = 0; b < m.size(0); ++b) {
          if (m.holds(kind == 3 ? "P" : "Q", {e.index, b})) out.insert(Elem{0, b});
        }
        break;
      default:
        break;
    }
  }
  return out;
}

ClosureOperator op_of_kind(int kind) {
  switch (kind) {
    case 1:
      return function_closure({"f"});
    case 2:
      return function_closure({"g"});
    case 3:
      return partner_closure("P");
    case 4:
      return partner_closure("Q");
    default:
      return identity_closure();
  }
}

// Least fixpoint by brute force: the smallest superset closed under both
// naive steps.
ElemSet brute_least_fixpoint(const FiniteStructure& m, const ElemSet& seed, int k1, int k2) {
  int n = m.size(0);
  std::optional<ElemSet> best;
  for (int mask = 0; mask < (1 << n); ++mask) {
    ElemSet s;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) s.insert(Elem{0, i});
    }
    if (!std::includes(s.begin(), s.end(), seed.begin(), seed.end())) continue;
    if (naive_step(m, s, k1) != s || naive_step(m, s, k2) != s) continue;
    if (!best || s.size() < best->size()) best = s;
  }
  return *best;
}

ElemSet random_subset(const FiniteStructure& m, std::mt19937_64& rng) {
  ElemSet s;
  for (const Elem& e : m.elements()) {
    if (rng() % 3 == 0) s.insert(e);
  }
  return s;
}

}  // namespace

TEST_CASE("ccl_fixpoint: identity operators return the seed") {
  std::mt19937_64 rng(1);
  auto m = testsupport::random_structure(op_language(), {5}, rng);
  ElemSet seed{{0, 1}, {0, 3}};
  CHECK(ccl_fixpoint(m, seed, {identity_closure(), identity_closure()}) == seed);
}

TEST_CASE("ccl_fixpoint: function closure alone") {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 20; ++round) {
    auto m = testsupport::random_structure(op_language(), {6}, rng);
    ElemSet seed = random_subset(m, rng);
    ElemSet naive = seed;
    for (ElemSet next = naive_step(m, naive, 1); next != naive; next = naive_step(m, naive, 1)) naive = next;
    CHECK(ccl_fixpoint(m, seed, {function_closure({"f"}), identity_closure()}) == naive);
  }
}

TEST_CASE("ccl_fixpoint needs alternation between partner and function steps") {
  // 0 -P-> 1, f(1) = 2, 2 -P-> 3, everything else fixed by f
  FiniteStructure m(op_language(), {5});
  for (int i = 0; i < 5; ++i) {
    m.set_value("f", {i}, i);
    m.set_value("g", {i}, i);
  }
  m.set("P", {0, 1});
  m.set_value("f", {1}, 2);
  m.set("P", {2, 3});
  ElemSet seed{{0, 0}};
  ElemSet want{{0, 0}, {0, 1}, {0, 2}, {0, 3}};
  CHECK(ccl_fixpoint(m, seed, {partner_closure("P"), function_closure({"f"})}) == want);
  CHECK(brute_least_fixpoint(m, seed, 3, 1) == want);
  CHECK(partner_closure("P").apply(m, seed) != want);
}

TEST_CASE("ccl_fixpoint: both strategies agree with the brute-force least fixpoint") {
  std::mt19937_64 rng(3);
  auto lang = op_language();
  for (int round = 0; round < 200; ++round) {
    int n = 1 + static_cast<int>(rng() % 6);
    auto m = testsupport::random_structure(lang, {n}, rng, 20);
    int k1 = static_cast<int>(rng() % 5), k2 = static_cast<int>(rng() % 5);
    std::vector<ClosureOperator> ops{op_of_kind(k1), op_of_kind(k2)};
    ElemSet seed = random_subset(m, rng);
    ElemSet rr = ccl_fixpoint(m, seed, ops, FixpointStrategy::RoundRobin);
    CHECK(rr == ccl_fixpoint(m, seed, ops, FixpointStrategy::Worklist));
    CHECK(rr == brute_least_fixpoint(m, seed, k1, k2));
    CHECK(ccl_fixpoint(m, rr, ops) == rr);
    ElemSet bigger = seed;
    bigger.insert(Elem{0, static_cast<int>(rng() % static_cast<std::size_t>(n))});
    ElemSet rb = ccl_fixpoint(m, bigger, ops);
    CHECK(std::includes(rb.begin(), rb.end(), rr.begin(), rr.end()));
  }
}

TEST_CASE("ccl_fixpoint reports a shrinking operator") {
  FiniteStructure m(op_language(), {3});
  ClosureOperator shrink{"shrink", [](const FiniteStructure&, const ElemSet&) { return ElemSet{}; }, "broken"};
  try {
    ccl_fixpoint(m, {{0, 1}}, {identity_closure(), shrink});
    FAIL("expected a defect");
  } catch (const ClosureDefect& d) {
    CHECK(d.op() == "shrink");
    CHECK(d.law() == "extensive");
  }
}

TEST_CASE("closure_law_defects") {
  FiniteStructure m(op_language(), {3});
  for (int i = 0; i < 3; ++i) {
    m.set_value("f", {i}, i);
    m.set_value("g", {i}, i);
  }
  m.set("P", {0, 1});
  m.set("P", {1, 2});
  auto sample = subset_sample(m);
  CHECK(sample.size() == 8);
  CHECK(closure_law_defects(partner_closure("P"), m, sample).empty());
  CHECK(closure_law_defects(function_closure(), m, sample).empty());
  ClosureOperator one_step{"one-step", [](const FiniteStructure& s, const ElemSet& a) { return naive_step(s, a, 3); }, ""};
  auto defects = closure_law_defects(one_step, m, sample);
  REQUIRE_FALSE(defects.empty());
  CHECK(defects.front().find("idempotent") != std::string::npos);
}

namespace {

Language bcl_language() {
  Language l = Language::single_sorted();
  l.add_function("f", {0}, 0);
  l.add_relation("E", 2);
  return l;
}

BoundedFormula declared(const std::string& text, const Language& lang, std::vector<Variable> x, std::vector<Variable> y) {
  BoundedFormula b{parse_formula(text, lang), std::move(x), std::move(y), 1, {}};
  b.record.declared = true;
  return b;
}

ElemSet naive_bcl(const FiniteStructure& m, const ElemSet& seed, const std::vector<BoundedFormula>& lib) {
  ElemSet cur = seed;
  for (;;) {
    ElemSet next = generated_closure(m, cur);
    for (const auto& bf : lib) {
      std::vector<Variable> vars = bf.x;
      vars.insert(vars.end(), bf.y.begin(), bf.y.end());
      testsupport::for_each_assignment(m, vars, [&](const Assignment& a) {
        for (const auto& x : bf.x) {
          if (!cur.count(Elem{x.sort, a.at(x)})) return;
        }
        if (evaluate(m, bf.formula, a)) {
          for (const auto& y : bf.y) next.insert(Elem{y.sort, a.at(y)});
        }
      });
    }
    if (next == cur) return cur;
    cur = next;
  }
}

}  // namespace

TEST_CASE("bcl_closure: empty library and the graph of f") {
  std::mt19937_64 rng(4);
  auto lang = bcl_language();
  Variable x{"x", 0}, y{"y", 0};
  auto graph_of_f = check_bounded(parse_formula("f(x) = y", lang), {x}, {y}, ClassSpec("any", lang), 1, 3);
  REQUIRE(graph_of_f.verified);
  auto lib = make_bounded(parse_formula("f(x) = y", lang), {x}, {y}, 1, graph_of_f);
  for (int round = 0; round < 20; ++round) {
    auto m = testsupport::random_structure(lang, {5}, rng);
    ElemSet seed = random_subset(m, rng);
    CHECK(bcl_closure(m, seed, {}) == generated_closure(m, seed));
    CHECK(bcl_closure(m, seed, {lib}) == generated_closure(m, seed));
  }
}

TEST_CASE("bcl_closure: two-step library reaches the transitive closure") {
  auto lang = bcl_language();
  Variable x{"x", 0}, y{"y", 0};
  FiniteStructure m(lang, {5});
  for (int i = 0; i < 5; ++i) m.set_value("f", {i}, i);
  // 0 -> 1 one way, 1 <-> 3 both ways: 3 needs 1 first
  m.set("E", {0, 1});
  m.set("E", {1, 3});
  m.set("E", {3, 1});
  std::vector<BoundedFormula> lib{declared("E(x,y) & !E(y,x)", lang, {x}, {y}),
                                  declared("E(x,y) & E(y,x)", lang, {x}, {y})};
  ElemSet want{{0, 0}, {0, 1}, {0, 3}};
  CHECK(bcl_closure(m, {{0, 0}}, lib) == want);
  CHECK(naive_bcl(m, {{0, 0}}, lib) == want);
  CHECK(bcl_closure(m, {{0, 0}}, {lib[0]}) == ElemSet{{0, 0}, {0, 1}});
}

TEST_CASE("bcl_closure matches the naive oracle, is idempotent and contains the generated set") {
  std::mt19937_64 rng(5);
  auto lang = bcl_language();
  Variable x{"x", 0}, y{"y", 0}, z{"z", 0};
  std::vector<BoundedFormula> pool{
      declared("f(x) = y", lang, {x}, {y}),
      declared("E(x,y) & f(y) = x", lang, {x}, {y}),
      declared("E(x,y) & E(y,x) & !(x = y)", lang, {x}, {y}),
      declared("exists z: E(x,z) & f(z) = y", lang, {x}, {y}),
      declared("E(x,z) & E(z,y)", lang, {x, z}, {y}),
  };
  for (int round = 0; round < 200; ++round) {
    int n = 1 + static_cast<int>(rng() % 5);
    auto m = testsupport::random_structure(lang, {n}, rng, 25);
    std::vector<BoundedFormula> lib;
    for (const auto& b : pool) {
      if (rng() % 2) lib.push_back(b);
    }
    ElemSet seed = random_subset(m, rng);
    ElemSet c = bcl_closure(m, seed, lib);
    CHECK(c == naive_bcl(m, seed, lib));
    CHECK(bcl_closure(m, c, lib) == c);
    ElemSet gen = generated_closure(m, seed);
    CHECK(std::includes(c.begin(), c.end(), gen.begin(), gen.end()));
  }
}

TEST_CASE("bcl_closure rejects unverified entries") {
  auto lang = bcl_language();
  FiniteStructure m(lang, {2});
  BoundedFormula raw{parse_formula("E(x,y)", lang), {Variable{"x", 0}}, {Variable{"y", 0}}, 1, {}};
  CHECK_THROWS_AS(bcl_closure(m, {}, {raw}), Error);
}

namespace {

// Exhaustive: some member of size <= budget containing host has a second
// realization of the point's type over the base.
bool brute_duplicate(const ClassSpec& spec, const FiniteStructure& host, const ElemSet& base, Elem point, int budget) {
  for (int n = host.size(0); n <= budget; ++n) {
    for (const auto& d : enumerate_models(spec, {n})) {
      for (const auto& e : find_embeddings(host, d)) {
        for (int q = 0; q < n; ++q) {
          if (q == e(point)) continue;
          bool in_base = false;
          for (const Elem& b : base) in_base = in_base || e(b) == q;
          if (in_base) continue;
          bool same = d.holds("E", {q, q}) == host.holds("E", {point.index, point.index});
          for (const Elem& b : base) {
            same = same && d.holds("E", {q, e(b)}) == host.holds("E", {point.index, b.index}) &&
                   d.holds("E", {e(b), q}) == host.holds("E", {b.index, point.index});
          }
          if (same) return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

TEST_CASE("acl_test_duplication: graphs have trivial acl") {
  auto spec = graphs_class();
  std::mt19937_64 rng(6);
  for (const auto& m : enumerate_up_to(spec, 4, 1)) {
    for (const Elem& p : m.elements()) {
      ElemSet base = random_subset(m, rng);
      base.erase(p);
      auto v = acl_test_duplication(spec, m, base, p, m.total_size() + 1);
      CHECK(v.non_algebraic);
      REQUIRE(v.witness);
      CHECK(spec.contains(*v.witness));
    }
  }
}

TEST_CASE("acl_test_duplication: partners in bounded equivalence are algebraic") {
  auto spec = bounded_equivalence_class();
  FiniteStructure host(spec.language(), {2});
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) host.set("E", {x, y});
  }
  ElemSet base{{0, 0}};
  auto v = acl_test_duplication(spec, host, base, Elem{0, 1}, 6);
  CHECK_FALSE(v.non_algebraic);
  CHECK_FALSE(brute_duplicate(spec, host, base, Elem{0, 1}, 6));
  // over the empty base the partner is not algebraic
  CHECK(acl_test_duplication(spec, host, {}, Elem{0, 1}, 6).non_algebraic);
  CHECK(brute_duplicate(spec, host, {}, Elem{0, 1}, 6));
  CHECK(acl_by_duplication(spec, host, base, 6) == ElemSet{{0, 0}, {0, 1}});
}

TEST_CASE("acl_test_duplication agrees with exhaustive extension search") {
  auto spec = bounded_equivalence_class();
  for (const auto& host : enumerate_up_to(spec, 3, 1)) {
    for (const Elem& p : host.elements()) {
      for (int mask = 0; mask < (1 << host.size(0)); ++mask) {
        ElemSet base;
        for (int i = 0; i < host.size(0); ++i) {
          if (mask >> i & 1) base.insert(Elem{0, i});
        }
        if (base.count(p)) continue;
        CHECK(acl_test_duplication(spec, host, base, p, 5).non_algebraic == brute_duplicate(spec, host, base, p, 5));
      }
    }
  }
}

TEST_CASE("acl_test_duplication preconditions") {
  auto spec = graphs_class();
  auto m = testsupport::graph(2, {{0, 1}});
  CHECK_THROWS_AS(acl_test_duplication(spec, m, {{0, 0}}, Elem{0, 0}, 4), Error);
  CHECK_THROWS_AS(acl_test_duplication(spec, m, {}, Elem{0, 0}, 0), Error);
}
