#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "fusionlab/catalog.hpp"
#include "fusionlab/error.hpp"
#include "fusionlab/interpretations.hpp"
#include "support.hpp"

using namespace fusionlab;
using testsupport::graph;

namespace {

FiniteStructure random_graph(int n, std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (rng() % 2) edges.emplace_back(x, y);
    }
  }
  return graph(n, edges);
}

// Isomorphism classes of single-sorted structures in the given list of
// labeled members, by brute-force minimum over permutations of a flat key.
template <typename Key>
std::size_t count_classes(const std::vector<FiniteStructure>& labeled, Key key) {
  std::set<std::vector<int>> seen;
  for (const auto& m : labeled) {
    const int n = m.size(0);
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<int> best;
    do {
      auto k = key(m, p);
      if (best.empty() || k < best) best = k;
    } while (std::next_permutation(p.begin(), p.end()));
    best.insert(best.begin(), n);
    seen.insert(best);
  }
  return seen.size();
}

std::vector<FiniteStructure> all_tournaments(int n) {
  std::vector<FiniteStructure> out;
  std::vector<std::pair<int, int>> pairs;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) pairs.emplace_back(x, y);
  }
  for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
    FiniteStructure t(tournament_class().language_ptr(), {n});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto [x, y] = pairs[i];
      if (mask >> i & 1) {
        t.set("E", {x, y});
      } else {
        t.set("E", {y, x});
      }
    }
    out.push_back(t);
  }
  return out;
}

std::vector<FiniteStructure> all_unary_functions(int n) {
  std::vector<FiniteStructure> out;
  std::vector<int> f(static_cast<std::size_t>(n), 0);
  for (;;) {
    FiniteStructure m(unary_function_class().language_ptr(), {n});
    for (int x = 0; x < n; ++x) m.set_value("f", {x}, f[static_cast<std::size_t>(x)]);
    out.push_back(m);
    int i = 0;
    while (i < n && ++f[static_cast<std::size_t>(i)] == n) f[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return out;
}

// Elements of sort 1 related to the tuple t by the (k+1)-ary relation rel.
std::vector<int> partners(const FiniteStructure& m, const std::string& rel, const Tuple& t) {
  std::vector<int> out;
  for (int s = 0; s < m.size(1); ++s) {
    Tuple u = t;
    u.push_back(s);
    if (m.holds(rel, u)) out.push_back(s);
  }
  return out;
}

// Direct check of the triangle-free extension axioms for |A| <= 2.
bool extension_complete(const FiniteStructure& g) {
  const int n = g.size(0);
  auto adj = [&](int a, int b) { return g.holds("E", {a, b}); };
  for (int a = -1; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      std::vector<int> base;
      if (a >= 0) base.push_back(a);
      if (b >= 0 && b != a) base.push_back(b);
      if (a < 0) base = {b};
      for (unsigned want = 0; want < (1u << base.size()); ++want) {
        if (base.size() == 2 && want == 3 && adj(base[0], base[1])) continue;
        bool found = false;
        for (int c = 0; c < n && !found; ++c) {
          if (std::find(base.begin(), base.end(), c) != base.end()) continue;
          bool ok = true;
          for (std::size_t i = 0; i < base.size(); ++i) ok = ok && adj(c, base[i]) == bool(want >> i & 1);
          found = ok;
        }
        if (!found) return false;
      }
    }
  }
  return n > 0;
}

std::size_t triangles_direct(const FiniteStructure& g) {
  std::size_t out = 0;
  const int n = g.size(0);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (g.holds("E", {x, y}) && g.holds("E", {y, z}) && g.holds("E", {z, x})) ++out;
  return out / 6;
}

}  // namespace

TEST_CASE("hypergraph-pi on the path P3") {
  Codec c = builtin_codec("hypergraph-pi");
  FiniteStructure p3 = graph(3, {{0, 1}, {1, 2}});
  FiniteStructure enc = encode(c, p3);
  std::size_t edges = 0;
  for (int x = 0; x < 3; ++x)
    for (int y = x + 1; y < 3; ++y) edges += p3.holds("E", {x, y}) ? 1 : 0;
  CHECK(enc.size(1) == 3 * 2 / 2);
  CHECK(enc.tuple_count(enc.language().relation_index("P")) == edges);
  CHECK(edges == 2);
  CHECK(enc.name(Elem{1, 0}) == "{0,1}");
  CHECK(c.target.contains(enc));
  CHECK(decode(c, enc) == p3);
}

TEST_CASE("hypergraph-pi fibers are the unordered classes") {
  Codec c = hypergraph_pi_codec(2);
  std::mt19937_64 rng(3);
  for (int round = 0; round < 20; ++round) {
    FiniteStructure g = random_graph(5, rng);
    FiniteStructure enc = encode(c, g);
    std::set<int> hit;
    for (int x = 0; x < 5; ++x) {
      for (int y = 0; y < 5; ++y) {
        auto img = partners(enc, "pi", {x, y});
        if (x == y) {
          CHECK(img.empty());
          continue;
        }
        REQUIRE(img.size() == 1);
        CHECK(img == partners(enc, "pi", {y, x}));
        hit.insert(img[0]);
        for (int u = 0; u < 5; ++u) {
          for (int v = 0; v < 5; ++v) {
            if (u == v) continue;
            bool same = std::set<int>{x, y} == std::set<int>{u, v};
            CHECK((partners(enc, "pi", {u, v}) == img) == same);
          }
        }
      }
    }
    CHECK(hit.size() == static_cast<std::size_t>(enc.size(1)));
    CHECK(decode(c, enc) == g);
  }
}

TEST_CASE("hypergraph-pi over 3-hypergraphs") {
  Codec c = hypergraph_pi_codec(3);
  auto rep = roundtrip_check(c, 4, 1);
  CHECK(rep.checked > 0);
  CHECK(rep.all_passed());
}

TEST_CASE("hypergraph-dis encodings have two witnesses per tuple") {
  Codec c = builtin_codec("hypergraph-dis");
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    FiniteStructure g = random_graph(2 + static_cast<int>(rng() % 4), rng);
    FiniteStructure enc = encode(c, g);
    const int n = g.size(0);
    CHECK(enc.size(1) == n * (n - 1));
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        if (x == y) {
          CHECK(partners(enc, "D", {x, y}).empty());
          continue;
        }
        auto d = partners(enc, "D", {x, y});
        CHECK(d.size() == 2);
        auto g1 = partners(enc, "g1", {x, y}), g2 = partners(enc, "g2", {x, y});
        REQUIRE(g1.size() == 1);
        REQUIRE(g2.size() == 1);
        CHECK(std::count(d.begin(), d.end(), g1[0]) == 1);
        CHECK(std::count(d.begin(), d.end(), g2[0]) == 1);
        CHECK((g1 == g2) == g.holds("E", {x, y}));
      }
    }
    CHECK(decode(c, enc) == g);
  }
}

TEST_CASE("hypergraph-dis rejects inputs below two elements") {
  Codec c = builtin_codec("hypergraph-dis");
  CHECK_THROWS_AS(encode(c, graph(1, {})), ClassViolation);
  CHECK_THROWS_AS(encode(c, graph(0, {})), ClassViolation);
  CHECK_NOTHROW(encode(c, graph(2, {})));
}

TEST_CASE("tournament codec on the 3-cycle") {
  Codec c = builtin_codec("tournament");
  FiniteStructure cyc(tournament_class().language_ptr(), {3});
  cyc.set("E", {0, 1});
  cyc.set("E", {1, 2});
  cyc.set("E", {2, 0});
  FiniteStructure enc = encode(c, cyc);
  CHECK(enc.size(1) == 6);
  CHECK(enc.size(2) == 3);
  std::set<Tuple> chosen;
  std::set<int> classes;
  for (int u = 0; u < enc.size(1); ++u) {
    if (!enc.holds("P", {u})) continue;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (enc.holds("pi", {a, b, u})) chosen.insert({a, b});
    classes.insert(enc.value("rho", {u}));
  }
  CHECK(chosen == std::set<Tuple>{{0, 1}, {1, 2}, {2, 0}});
  CHECK(classes.size() == 3);

  FiniteStructure back = decode(c, enc);
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      if (x != y) CHECK(back.holds("E", {x, y}) != back.holds("E", {y, x}));
    }
  }
  CHECK(back == cyc);
}

TEST_CASE("function codec selects the graph of f") {
  Codec c = builtin_codec("function");
  FiniteStructure id(unary_function_class().language_ptr(), {2});
  id.set_value("f", {0}, 0);
  id.set_value("f", {1}, 1);
  FiniteStructure enc = encode(c, id);
  std::set<Tuple> chosen;
  for (int u = 0; u < enc.size(1); ++u) {
    if (!enc.holds("P", {u})) continue;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (enc.holds("pi", {a, b, u})) chosen.insert({a, b});
  }
  CHECK(chosen == std::set<Tuple>{{0, 0}, {1, 1}});
  CHECK(decode(c, enc) == id);
}

TEST_CASE("automorphism decode of (M, M; id, sigma)") {
  Codec c = builtin_codec("automorphism");
  // 4-cycle 0-1-2-3 with the rotation x -> x+1.
  FiniteStructure t(c.target.language_ptr(), {4, 4});
  for (int x = 0; x < 4; ++x) {
    int y = (x + 1) % 4;
    for (const char* r : {"E_M", "E_N"}) {
      t.set(r, {x, y});
      t.set(r, {y, x});
    }
    t.set_value("tau0", {x}, x);
    t.set_value("tau1", {x}, y);
    t.set_name(Elem{1, x}, std::to_string(x) + "'");
  }
  FiniteStructure m = decode(c, t);
  for (int x = 0; x < 4; ++x) CHECK(m.value("sigma1", {x}) == (x + 1) % 4);
  CHECK(encode(c, m) == t);

  // A non-automorphism is rejected with the failing axiom.
  FiniteStructure bad = m;
  bad.set_value("sigma1", {0}, 0);
  CHECK_THROWS_AS(encode(c, bad), ClassViolation);
}

TEST_CASE("variation slices are graphs") {
  Codec c = builtin_codec("variation");
  auto rep = roundtrip_check(c, 3, 1);
  REQUIRE(rep.all_passed());
  for (const auto& e : rep.entries) {
    const FiniteStructure& enc = *e.encoded;
    const int n = enc.size(0);
    for (int a = 0; a < n; ++a) {
      std::vector<int> fiber;
      for (int u = 0; u < enc.size(1); ++u)
        if (enc.value("pi1", {u}) == a) fiber.push_back(u);
      CHECK(fiber.size() == static_cast<std::size_t>(n));
      for (int u : fiber) {
        CHECK_FALSE(enc.holds("E_2", {a, u, u}));
        for (int v : fiber) CHECK(enc.holds("E_2", {a, u, v}) == enc.holds("E_2", {a, v, u}));
      }
      for (int u = 0; u < enc.size(1); ++u)
        for (int v = 0; v < enc.size(1); ++v)
          if (enc.holds("E_2", {a, u, v})) CHECK((enc.value("pi1", {u}) == a && enc.value("pi1", {v}) == a));
    }
  }
}

TEST_CASE("roundtrip counts match brute-force isomorphism classes") {
  std::vector<FiniteStructure> tours;
  for (int n = 0; n <= 4; ++n) {
    auto part = all_tournaments(n);
    tours.insert(tours.end(), part.begin(), part.end());
  }
  auto tour_key = [](const FiniteStructure& m, const std::vector<int>& p) {
    std::vector<int> k;
    const int n = m.size(0);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) k.push_back(m.holds("E", {p[static_cast<std::size_t>(x)], p[static_cast<std::size_t>(y)]}));
    return k;
  };
  auto rt = roundtrip_check(builtin_codec("tournament"), 4, 1);
  CHECK(rt.all_passed());
  CHECK(rt.checked == count_classes(tours, tour_key));

  std::vector<FiniteStructure> funs;
  for (int n = 0; n <= 4; ++n) {
    auto part = all_unary_functions(n);
    funs.insert(funs.end(), part.begin(), part.end());
  }
  auto fun_key = [](const FiniteStructure& m, const std::vector<int>& p) {
    // p maps new labels to old ones; read f in the new labels.
    const int n = m.size(0);
    std::vector<int> inv(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] = i;
    std::vector<int> k;
    for (int x = 0; x < n; ++x) k.push_back(inv[static_cast<std::size_t>(m.value("f", {p[static_cast<std::size_t>(x)]}))]);
    return k;
  };
  auto rf = roundtrip_check(builtin_codec("function"), 4, 1);
  CHECK(rf.all_passed());
  CHECK(rf.checked == count_classes(funs, fun_key));
}

TEST_CASE("every registered codec round-trips at its default size") {
  for (const auto& name : codec_names()) {
    CAPTURE(name);
    Codec c = builtin_codec(name);
    auto rep = roundtrip_check(c, c.default_limit, 0);
    CHECK(rep.checked > 0);
    CHECK(rep.all_passed());
    for (const auto& e : rep.entries) {
      REQUIRE(e.isomorphism.has_value());
      CHECK(e.isomorphism->is_identity());
    }
  }
}

TEST_CASE("targets reject corrupted encodings") {
  std::mt19937_64 rng(11);
  for (const char* name : {"hypergraph-pi", "hypergraph-dis", "tournament", "function"}) {
    CAPTURE(name);
    Codec c = builtin_codec(name);
    const std::string rel = std::string(name).rfind("hypergraph-dis", 0) == 0 ? "D" : "pi";
    for (int round = 0; round < 10; ++round) {
      FiniteStructure src;
      if (std::string(name) == "tournament") {
        src = all_tournaments(4)[rng() % 64];
      } else if (std::string(name) == "function") {
        src = all_unary_functions(3)[rng() % 27];
      } else {
        src = random_graph(4, rng);
      }
      FiniteStructure enc = encode(c, src);
      const int r = enc.language().relation_index(rel);
      auto& table = enc.table(r);
      std::size_t cell = rng() % table.size();
      table[cell] = table[cell] == kTrueCell ? kFalseCell : kTrueCell;
      CHECK(c.target.violation(enc).has_value());
      CHECK_THROWS_AS(decode(c, enc), ClassViolation);
    }
  }
}

TEST_CASE("encode reports the violated source axiom") {
  Codec c = builtin_codec("tournament");
  FiniteStructure sym(tournament_class().language_ptr(), {2});
  sym.set("E", {0, 1});
  sym.set("E", {1, 0});
  try {
    encode(c, sym);
    FAIL("expected ClassViolation");
  } catch (const ClassViolation& e) {
    CHECK(std::string(e.what()).find("tournaments") != std::string::npos);
    CHECK(std::string(e.what()).find("E(") != std::string::npos);
  }
  CHECK_THROWS_AS(builtin_codec("nope"), Error);
  CHECK_THROWS_AS(encode(c, FiniteStructure(unary_function_class().language_ptr(), {2})), SortError);
}

TEST_CASE("henson_reduct examples") {
  FiniteStructure f(fusion_class().language_ptr(), {2});
  for (const char* r : {"E1", "E2"}) {
    f.set(r, {0, 1});
    f.set(r, {1, 0});
  }
  FiniteStructure g = henson_reduct(f);
  CHECK(g == graph(2, {{0, 1}}));

  FiniteStructure only1(fusion_class().language_ptr(), {2});
  only1.set("E1", {0, 1});
  only1.set("E1", {1, 0});
  CHECK(henson_reduct(only1) == graph(2, {}));

  // An E2-triangle carrying an R-hyperedge leaves K2.
  FiniteStructure bad(fusion_class().language_ptr(), {3});
  std::vector<int> p{0, 1, 2};
  do {
    bad.set("R", {p[0], p[1], p[2]});
  } while (std::next_permutation(p.begin(), p.end()));
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      if (x != y) bad.set("E2", {x, y});
  CHECK_THROWS_AS(henson_reduct(bad), ClassViolation);
}

TEST_CASE("henson construction is triangle-free and saturated") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CAPTURE(seed);
    HensonRun run = henson_construction(40, seed);
    CHECK(run.graph.size(0) <= 40);
    CHECK(triangles_direct(run.graph) == 0);
    CHECK(run.triangles == 0);
    CHECK(run.coverage.satisfied);
    CHECK(extension_complete(run.graph));
    CHECK(fusion_class().contains(run.fusion));
    CHECK(run.graph.size(0) == run.built_size + static_cast<int>(run.saturation_steps));
  }
}

TEST_CASE("henson saturation stops at the budget") {
  GenericModel gm = build_generic(fusion_class(), 40, 1, 7);
  const int cap = gm.structure.size(0) + 2;
  HensonRun run = henson_saturate(gm.structure, cap, 2, 7);
  CHECK(run.graph.size(0) <= cap);
  CHECK(triangles_direct(run.graph) == 0);
  CHECK(run.coverage.satisfied == extension_complete(run.graph));
}
