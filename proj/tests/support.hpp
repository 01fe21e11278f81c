#pragma once
// Shared test helpers: random generators and independent oracles that do not
// go through the library's compiled evaluator.

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fusionlab/class_spec.hpp"
#include "fusionlab/formula.hpp"
#include "fusionlab/fraisse.hpp"
#include "fusionlab/language.hpp"
#include "fusionlab/structure.hpp"

namespace testsupport {

using namespace fusionlab;

inline std::vector<Language> formula_languages() {
  std::vector<Language> out;
  Language a = Language::single_sorted();
  a.add_relation("E", 2).add_function("f", {0}, 0);
  Language b = Language::single_sorted();
  b.add_relation("P", 1).add_function("f", {0}, 0);
  Language c = Language::single_sorted();
  c.add_relation("E", 2).add_constant("c", 0);
  Language d = Language::single_sorted();
  d.add_function("f", {0}, 0).add_constant("c", 0);
  Language e = Language::single_sorted();
  e.add_relation("R", 2).add_relation("P", 1);
  for (auto* l : {&a, &b, &c, &d, &e}) out.push_back(*l);
  return out;
}

inline Language two_sorted_language() {
  Language l({"M", "N"});
  l.add_relation("P", {0, 1}).add_function("g", {1}, 0).add_constant("k", 1);
  return l;
}

inline std::string var_name(SortId s, int i) {
  static const char* names[] = {"x", "y", "z", "u", "v", "w"};
  return std::string(names[i % 3 + 3 * (s % 2)]) + (s >= 2 ? std::to_string(s) : "");
}

inline Term random_term(const Language& lang, std::mt19937_64& rng, SortId sort, int depth) {
  std::vector<std::string> fns, consts;
  for (const auto& [n, f] : lang.functions()) if (f.result == sort) fns.push_back(n);
  for (const auto& [n, s] : lang.constants()) if (s == sort) consts.push_back(n);
  auto pick = rng() % 6;
  if (depth > 0 && !fns.empty() && pick < 2) {
    const auto& n = fns[rng() % fns.size()];
    std::vector<Term> args;
    for (SortId a : lang.functions().at(n).args) args.push_back(random_term(lang, rng, a, depth - 1));
    return Term::apply(n, sort, std::move(args));
  }
  if (!consts.empty() && pick == 2) return Term::constant(consts[rng() % consts.size()], sort);
  return Term::var(var_name(sort, static_cast<int>(rng() % 3)), sort);
}

inline Formula random_atom(const Language& lang, std::mt19937_64& rng, int term_depth) {
  std::vector<std::string> rels = lang.relation_names();
  if (!rels.empty() && rng() % 3 != 0) {
    const auto& n = rels[rng() % rels.size()];
    std::vector<Term> args;
    for (SortId s : lang.relations().at(n).profile) args.push_back(random_term(lang, rng, s, term_depth));
    return Formula::rel(n, std::move(args));
  }
  SortId s = static_cast<SortId>(rng() % static_cast<std::size_t>(lang.sort_count()));
  return Formula::eq(random_term(lang, rng, s, term_depth), random_term(lang, rng, s, term_depth));
}

/// Random formula of connective depth <= depth; quantifiers only if allowed.
inline Formula random_formula(const Language& lang, std::mt19937_64& rng, int depth, bool quantifiers) {
  if (depth == 0) return random_atom(lang, rng, 2);
  switch (rng() % (quantifiers ? 8 : 6)) {
    case 0:
      return random_atom(lang, rng, 2);
    case 1:
      return Formula::negate(random_formula(lang, rng, depth - 1, quantifiers));
    case 2:
      return Formula::conj({random_formula(lang, rng, depth - 1, quantifiers),
                            random_formula(lang, rng, depth - 1, quantifiers)});
    case 3:
      return Formula::disj({random_formula(lang, rng, depth - 1, quantifiers),
                            random_formula(lang, rng, depth - 1, quantifiers)});
    case 4:
      return Formula::implies(random_formula(lang, rng, depth - 1, quantifiers),
                              random_formula(lang, rng, depth - 1, quantifiers));
    case 5:
      return Formula::iff(random_formula(lang, rng, depth - 1, quantifiers),
                          random_formula(lang, rng, depth - 1, quantifiers));
    default: {
      SortId s = static_cast<SortId>(rng() % static_cast<std::size_t>(lang.sort_count()));
      Variable v{var_name(s, static_cast<int>(rng() % 3)), s};
      Formula body = random_formula(lang, rng, depth - 1, quantifiers);
      return rng() % 2 ? Formula::exists(v, body) : Formula::forall(v, body);
    }
  }
}

/// Complete structure with uniformly random tables.
inline FiniteStructure random_structure(const Language& lang, const std::vector<int>& sizes, std::mt19937_64& rng,
                                        int edge_percent = 50) {
  FiniteStructure m(lang, sizes);
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    for (auto& cell : m.table(static_cast<int>(r))) {
      cell = static_cast<int>(rng() % 100) < edge_percent ? kTrueCell : kFalseCell;
    }
  }
  for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
    SortId res = lang.functions().at(lang.function_names()[f]).result;
    for (auto& v : m.function_table(static_cast<int>(f))) v = static_cast<int>(rng() % static_cast<std::size_t>(m.size(res)));
  }
  for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
    SortId s = lang.constants().at(lang.constant_names()[c]);
    m.set_constant(static_cast<int>(c), static_cast<int>(rng() % static_cast<std::size_t>(m.size(s))));
  }
  return m;
}

/// Every complete labeled structure of the given sizes (carriers nonempty
/// where constants/functions need values).
inline void for_each_structure(const Language& lang, const std::vector<int>& sizes,
                               const std::function<void(const FiniteStructure&)>& visit) {
  FiniteStructure m(lang, sizes);
  struct Slot {
    int kind;  // 0 relation cell, 1 function entry, 2 constant
    int sym;
    std::size_t off;
    int range;
  };
  std::vector<Slot> slots;
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    for (std::size_t o = 0; o < m.table(static_cast<int>(r)).size(); ++o) slots.push_back({0, static_cast<int>(r), o, 2});
  }
  for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
    int range = m.size(lang.functions().at(lang.function_names()[f]).result);
    for (std::size_t o = 0; o < m.function_table(static_cast<int>(f)).size(); ++o) slots.push_back({1, static_cast<int>(f), o, range});
  }
  for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
    slots.push_back({2, static_cast<int>(c), 0, m.size(lang.constants().at(lang.constant_names()[c]))});
  }
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == slots.size()) {
      visit(m);
      return;
    }
    const Slot& s = slots[i];
    for (int v = 0; v < s.range; ++v) {
      if (s.kind == 0) m.table(s.sym)[s.off] = static_cast<std::uint8_t>(v);
      if (s.kind == 1) m.function_table(s.sym)[s.off] = v;
      if (s.kind == 2) m.set_constant(s.sym, v);
      rec(i + 1);
    }
  };
  rec(0);
}

// Naive Tarski evaluator: string-keyed environment, no compilation.
using Env = std::map<std::string, int>;

inline int naive_term(const FiniteStructure& m, const Term& t, const Env& env) {
  switch (t.kind) {
    case Term::Kind::Var:
      return env.at(t.name + "#" + std::to_string(t.sort));
    case Term::Kind::Const:
      return m.constant(t.name);
    case Term::Kind::Apply: {
      Tuple args;
      for (const auto& a : t.args) args.push_back(naive_term(m, a, env));
      return m.value(t.name, args);
    }
  }
  return -1;
}

inline bool naive_eval(const FiniteStructure& m, const Formula& f, Env env) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Eq:
      return naive_term(m, f.terms[0], env) == naive_term(m, f.terms[1], env);
    case K::Rel: {
      Tuple t;
      for (const auto& a : f.terms) t.push_back(naive_term(m, a, env));
      return m.holds(f.symbol, t);
    }
    case K::Not:
      return !naive_eval(m, f.children[0], env);
    case K::And:
      for (const auto& c : f.children) if (!naive_eval(m, c, env)) return false;
      return true;
    case K::Or:
      for (const auto& c : f.children) if (naive_eval(m, c, env)) return true;
      return false;
    case K::Implies:
      return !naive_eval(m, f.children[0], env) || naive_eval(m, f.children[1], env);
    case K::Iff:
      return naive_eval(m, f.children[0], env) == naive_eval(m, f.children[1], env);
    case K::Exists:
    case K::Forall: {
      bool ex = f.kind == K::Exists;
      for (int i = 0; i < m.size(f.bound.sort); ++i) {
        env[f.bound.name + "#" + std::to_string(f.bound.sort)] = i;
        if (naive_eval(m, f.children[0], env) == ex) return ex;
      }
      return !ex;
    }
  }
  return false;
}

inline Env naive_env(const Assignment& a) {
  Env env;
  for (const auto& [v, val] : a) env[v.name + "#" + std::to_string(v.sort)] = val;
  return env;
}

/// All assignments of `vars` into m.
inline void for_each_assignment(const FiniteStructure& m, const std::vector<Variable>& vars,
                                const std::function<void(const Assignment&)>& visit) {
  Assignment a;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == vars.size()) {
      visit(a);
      return;
    }
    for (int v = 0; v < m.size(vars[i].sort); ++v) {
      a[vars[i]] = v;
      rec(i + 1);
    }
    a.erase(vars[i]);
  };
  rec(0);
}

/// Simple undirected graph on n vertices from an edge list.
inline FiniteStructure graph(int n, const std::vector<std::pair<int, int>>& edges) {
  Language l = Language::single_sorted();
  l.add_relation("E", 2);
  FiniteStructure m(l, {n});
  for (auto [a, b] : edges) {
    m.set("E", {a, b});
    m.set("E", {b, a});
  }
  return m;
}

// Equivalence relation with classes of size <= 2, checked directly.
inline bool small_equivalence(const FiniteStructure& m) {
  int n = m.size(0);
  for (int x = 0; x < n; ++x) {
    if (!m.holds("E", {x, x})) return false;
    int partners = 0;
    for (int y = 0; y < n; ++y) {
      if (m.holds("E", {x, y}) != m.holds("E", {y, x})) return false;
      if (y != x && m.holds("E", {x, y})) ++partners;
      for (int z = 0; z < n; ++z) {
        if (m.holds("E", {x, y}) && m.holds("E", {y, z}) && !m.holds("E", {x, z})) return false;
      }
    }
    if (partners > 1) return false;
  }
  return true;
}

// Every labeled structure on the disjoint union of the two sides, checked
// for class membership and for agreeing with both sides.
inline bool brute_force_disjoint_amalgam(const AmalgamProblem& p, const std::function<bool(const FiniteStructure&)>& member) {
  int n1 = p.b1.size(0), n2 = p.b2.size(0), a = p.base.size(0);
  int n = n1 + n2 - a;
  std::vector<int> g2(static_cast<std::size_t>(n2), -1);
  for (int i = 0; i < a; ++i) g2[static_cast<std::size_t>(p.f2.map[0][static_cast<std::size_t>(i)])] = p.f1.map[0][static_cast<std::size_t>(i)];
  int next = n1;
  for (auto& v : g2) {
    if (v < 0) v = next++;
  }
  std::size_t cells = static_cast<std::size_t>(n * n);
  for (std::uint64_t bits = 0; bits < (1ULL << cells); ++bits) {
    FiniteStructure c(p.b1.language(), {n});
    for (std::size_t k = 0; k < cells; ++k) c.set("E", {static_cast<int>(k) / n, static_cast<int>(k) % n}, (bits >> k) & 1);
    if (!member(c)) continue;
    bool ok = true;
    for (int x = 0; x < n1 && ok; ++x) {
      for (int y = 0; y < n1 && ok; ++y) ok = c.holds("E", {x, y}) == p.b1.holds("E", {x, y});
    }
    for (int x = 0; x < n2 && ok; ++x) {
      for (int y = 0; y < n2 && ok; ++y) {
        ok = c.holds("E", {g2[static_cast<std::size_t>(x)], g2[static_cast<std::size_t>(y)]}) == p.b2.holds("E", {x, y});
      }
    }
    if (ok) return true;
  }
  return false;
}

// Every axiom holds under the naive evaluator and no forbidden structure embeds.
inline bool naive_member(const ClassSpec& spec, const FiniteStructure& m) {
  for (const auto& ax : spec.axioms()) {
    if (!naive_eval(m, ax, {})) return false;
  }
  return spec.forbidden().empty() || spec.contains(m);
}

}  // namespace testsupport
