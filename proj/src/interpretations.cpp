#include "fusionlab/interpretations.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "fusionlab/catalog.hpp"
#include "fusionlab/error.hpp"
#include "fusionlab/search.hpp"

namespace fusionlab {

namespace {

// Injective k-tuples over [0, n) in lexicographic order.
std::vector<Tuple> injective_tuples(int n, int k) {
  std::vector<Tuple> out;
  Tuple t(static_cast<std::size_t>(k), 0);
  std::function<void(int)> go = [&](int i) {
    if (i == k) {
      out.push_back(t);
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (std::find(t.begin(), t.begin() + i, v) != t.begin() + i) continue;
      t[static_cast<std::size_t>(i)] = v;
      go(i + 1);
    }
  };
  go(0);
  return out;
}

// All k-tuples over [0, n), table order (first position most significant).
std::vector<Tuple> all_tuples_of(int n, int k) {
  std::vector<Tuple> out;
  Tuple t(static_cast<std::size_t>(k), 0);
  std::function<void(int)> go = [&](int i) {
    if (i == k) {
      out.push_back(t);
      return;
    }
    for (int v = 0; v < n; ++v) {
      t[static_cast<std::size_t>(i)] = v;
      go(i + 1);
    }
  };
  go(0);
  return out;
}

Tuple sorted(Tuple t) {
  std::sort(t.begin(), t.end());
  return t;
}

Tuple concat(Tuple a, const Tuple& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string tuple_name(const FiniteStructure& m, SortId s, const Tuple& t, const char* open, const char* close) {
  std::string out = open;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ",";
    out += m.name(Elem{s, t[i]});
  }
  return out + close;
}

void copy_names(const FiniteStructure& from, SortId fs, FiniteStructure& to, SortId ts) {
  for (int i = 0; i < from.size(fs); ++i) to.set_name(Elem{ts, i}, from.name(Elem{fs, i}));
}

// Axiom text helpers over variables prefix0..prefix{n-1}.
std::string vars(const std::string& p, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? ", " : "") + p + std::to_string(i);
  return out;
}

std::string distinct(const std::string& p, int n) {
  std::vector<std::string> parts;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) parts.push_back("!(" + p + std::to_string(i) + " = " + p + std::to_string(j) + ")");
  }
  if (parts.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " & " : "") + parts[i];
  return "(" + out + ")";
}

// {x0..} = {y0..} as sets, for injective tuples of equal length.
std::string same_set(const std::string& x, const std::string& y, int n) {
  std::string out = "(";
  for (int j = 0; j < n; ++j) {
    out += j ? " & (" : "(";
    for (int i = 0; i < n; ++i) out += (i ? " | " : "") + y + std::to_string(j) + " = " + x + std::to_string(i);
    out += ")";
  }
  return out + ")";
}

std::string atom(const std::string& rel, const std::string& args, const std::string& last) {
  return rel + "(" + args + ", " + last + ")";
}

// The source hypergraph class of arity n and its relation name.
ClassSpec hypergraph_source(int n) {
  if (n < 2) throw Error("hypergraph codecs need arity at least 2");
  if (n == 2) return graphs_class();
  if (n == 3) return hypergraph3_class();
  Language l = Language::single_sorted();
  l.add_relation("R", n);
  ClassSpec c("hypergraphs" + std::to_string(n), l);
  c.declare_symmetric("R").declare_irreflexive("R").set_free_amalgamation(true);
  return c;
}

std::string only_relation(const ClassSpec& c) { return c.language().relation_names().at(0); }

// Quotient of injective n-tuples by "same underlying set": classes keyed by
// their sorted (lexicographically least) representative, in lex order.
struct Quotient {
  std::vector<Tuple> delta;
  std::vector<Tuple> reps;
  std::map<Tuple, int> index;

  Quotient(int size, int n) : delta(injective_tuples(size, n)) {
    for (const auto& t : delta) {
      Tuple r = sorted(t);
      if (index.emplace(r, 0).second) reps.push_back(r);
    }
    std::sort(reps.begin(), reps.end());
    for (std::size_t i = 0; i < reps.size(); ++i) index[reps[i]] = static_cast<int>(i);
  }
  int of(const Tuple& t) const { return index.at(sorted(t)); }
};

}  // namespace

FiniteStructure encode(const Codec& codec, const FiniteStructure& input) {
  if (!(input.language() == codec.source.language())) {
    throw SortError("codec " + codec.name + " expects the language of " + codec.source.name());
  }
  if (auto v = codec.source.violation(input)) {
    throw ClassViolation("input is not in " + codec.source.name() + ": " + *v);
  }
  if (input.total_size() < codec.min_size) {
    throw ClassViolation("codec " + codec.name + " needs at least " + std::to_string(codec.min_size) + " elements");
  }
  return codec.encode_fn(input);
}

FiniteStructure decode(const Codec& codec, const FiniteStructure& input) {
  if (!(input.language() == codec.target.language())) {
    throw SortError("codec " + codec.name + " expects the language of " + codec.target.name());
  }
  if (auto v = codec.target.violation(input)) {
    throw ClassViolation("input is not in " + codec.target.name() + ": " + *v);
  }
  return codec.decode_fn(input);
}

Codec hypergraph_pi_codec(int n) {
  Codec c;
  c.name = "hypergraph-pi";
  c.source = hypergraph_source(n);
  const std::string rel = only_relation(c.source);

  Language tl({"V", "S"});
  std::vector<SortId> prof(static_cast<std::size_t>(n), 0);
  prof.push_back(1);
  tl.add_relation("pi", prof).add_relation("P", std::vector<SortId>{1});
  ClassSpec t("hypergraph-pi-target", tl);
  const std::string xs = vars("x", n), ys = vars("y", n);
  t.add_axiom("forall " + xs + ", s: " + atom("pi", xs, "s") + " -> " + distinct("x", n));
  t.add_axiom("forall " + xs + ": " + distinct("x", n) + " -> (exists s: " + atom("pi", xs, "s") + ")");
  t.add_axiom("forall " + xs + ", " + ys + ", s, t: " + atom("pi", xs, "s") + " & " + atom("pi", ys, "t") +
              " -> (s = t <-> " + same_set("x", "y", n) + ")");
  t.add_axiom("forall s: exists " + xs + ": " + atom("pi", xs, "s"));
  c.target = t;

  c.encode_fn = [n, rel, tl](const FiniteStructure& g) {
    const int size = g.size(0);
    Quotient q(size, n);
    FiniteStructure out(tl, {size, static_cast<int>(q.reps.size())});
    copy_names(g, 0, out, 0);
    const int pi = tl.relation_index("pi"), p = tl.relation_index("P");
    for (std::size_t i = 0; i < q.reps.size(); ++i) {
      out.set_name(Elem{1, static_cast<int>(i)}, tuple_name(g, 0, q.reps[i], "{", "}"));
      if (g.holds(rel, q.reps[i])) out.set_cell(p, {static_cast<int>(i)}, kTrueCell);
    }
    for (const auto& d : q.delta) out.set_cell(pi, concat(d, {q.of(d)}), kTrueCell);
    return out;
  };
  c.decode_fn = [n, rel, src = c.source](const FiniteStructure& m) {
    FiniteStructure out(src.language_ptr(), {m.size(0)});
    copy_names(m, 0, out, 0);
    const int pi = m.language().relation_index("pi"), p = m.language().relation_index("P");
    for (const auto& d : injective_tuples(m.size(0), n)) {
      for (int s = 0; s < m.size(1); ++s) {
        if (m.holds(pi, concat(d, {s})) && m.holds(p, {s})) out.set(rel, d);
      }
    }
    return out;
  };
  return c;
}

Codec hypergraph_dis_codec(int n) {
  Codec c;
  c.name = "hypergraph-dis";
  c.source = hypergraph_source(n);
  c.min_size = 2;
  const std::string rel = only_relation(c.source);

  Language tl({"V", "S"});
  std::vector<SortId> prof(static_cast<std::size_t>(n), 0);
  prof.push_back(1);
  tl.add_relation("D", prof).add_relation("g1", prof).add_relation("g2", prof);
  ClassSpec t("hypergraph-dis-target", tl);
  const std::string xs = vars("x", n), ys = vars("y", n);
  t.add_axiom("forall " + xs + ", s: " + atom("D", xs, "s") + " -> " + distinct("x", n));
  t.add_axiom("forall " + xs + ", " + ys + ", s: " + atom("D", xs, "s") + " & " + distinct("y", n) + " & " + same_set("x", "y", n) + " -> " +
              atom("D", ys, "s"));
  t.add_axiom("forall " + xs + ": " + distinct("x", n) + " -> (exists s, t: !(s = t) & " + atom("D", xs, "s") + " & " +
              atom("D", xs, "t") + " & (forall u: " + atom("D", xs, "u") + " -> u = s | u = t))");
  for (const char* g : {"g1", "g2"}) {
    t.add_axiom("forall " + xs + ", s: " + atom(g, xs, "s") + " -> " + atom("D", xs, "s"));
    t.add_axiom("forall " + xs + ": " + distinct("x", n) + " -> (exists s: " + atom(g, xs, "s") + ")");
    t.add_axiom("forall " + xs + ", s, t: " + atom(g, xs, "s") + " & " + atom(g, xs, "t") + " -> s = t");
    t.add_axiom("forall " + xs + ", " + ys + ", s: " + atom(g, xs, "s") + " & " + distinct("y", n) + " & " + same_set("x", "y", n) + " -> " +
                atom(g, ys, "s"));
  }
  c.target = t;

  // S lists (c1, q) then (c2, q) for each class q in order; c1, c2 are the
  // first two elements of V.
  c.encode_fn = [n, rel, tl](const FiniteStructure& g) {
    const int size = g.size(0);
    Quotient q(size, n);
    const int classes = static_cast<int>(q.reps.size());
    FiniteStructure out(tl, {size, 2 * classes});
    copy_names(g, 0, out, 0);
    const int d = tl.relation_index("D"), g1 = tl.relation_index("g1"), g2 = tl.relation_index("g2");
    for (int i = 0; i < classes; ++i) {
      const std::string cls = tuple_name(g, 0, q.reps[static_cast<std::size_t>(i)], "{", "}");
      out.set_name(Elem{1, 2 * i}, "(" + g.name(Elem{0, 0}) + "," + cls + ")");
      out.set_name(Elem{1, 2 * i + 1}, "(" + g.name(Elem{0, 1}) + "," + cls + ")");
    }
    for (const auto& v : q.delta) {
      const int k = q.of(v);
      out.set_cell(d, concat(v, {2 * k}), kTrueCell);
      out.set_cell(d, concat(v, {2 * k + 1}), kTrueCell);
      out.set_cell(g1, concat(v, {2 * k}), kTrueCell);
      out.set_cell(g2, concat(v, {g.holds(rel, v) ? 2 * k : 2 * k + 1}), kTrueCell);
    }
    return out;
  };
  c.decode_fn = [n, rel, src = c.source](const FiniteStructure& m) {
    FiniteStructure out(src.language_ptr(), {m.size(0)});
    copy_names(m, 0, out, 0);
    const int g1 = m.language().relation_index("g1"), g2 = m.language().relation_index("g2");
    for (const auto& v : injective_tuples(m.size(0), n)) {
      for (int s = 0; s < m.size(1); ++s) {
        if (m.holds(g1, concat(v, {s})) && m.holds(g2, concat(v, {s}))) out.set(rel, v);
      }
    }
    return out;
  };
  return c;
}

namespace {

// Selections of an equivalence psi on the k-tuples satisfying phi, over the
// sorts M (source carrier), N (a copy of phi(M^k)) and Q (the classes).
struct SelectionShape {
  int k = 0;
  std::string phi;  // over x0..x{k-1}
  std::string psi;  // over x0.., y0..
  std::function<std::vector<Tuple>(int)> domain;      // phi(M^k), lex order
  std::function<Tuple(const Tuple&)> class_key;        // equal iff psi
  std::function<std::string(const FiniteStructure&, const Tuple&)> class_name;
};

Language selection_language(int k) {
  Language l({"M", "N", "Q"});
  l.add_relation("pi", concat(Tuple(static_cast<std::size_t>(k), 0), {1}));
  l.add_relation("E", {1, 1}).add_relation("P", std::vector<SortId>{1});
  l.add_function("rho", {1}, 2);
  return l;
}

ClassSpec selection_target(const std::string& name, const SelectionShape& sh) {
  const int k = sh.k;
  ClassSpec t(name, selection_language(k));
  const std::string xs = vars("x", k), ys = vars("y", k);
  t.add_axiom("forall " + xs + ", u: " + atom("pi", xs, "u") + " -> " + sh.phi);
  t.add_axiom("forall " + xs + ": " + sh.phi + " -> (exists u: " + atom("pi", xs, "u") + ")");
  t.add_axiom("forall " + xs + ", u, v: " + atom("pi", xs, "u") + " & " + atom("pi", xs, "v") + " -> u = v");
  std::string eq = "(";
  for (int i = 0; i < k; ++i) eq += (i ? " & x" : "x") + std::to_string(i) + " = y" + std::to_string(i);
  eq += ")";
  t.add_axiom("forall " + xs + ", " + ys + ", u: " + atom("pi", xs, "u") + " & " + atom("pi", ys, "u") + " -> " + eq);
  t.add_axiom("forall u: exists " + xs + ": " + atom("pi", xs, "u"));
  t.add_axiom("forall " + xs + ", " + ys + ", u, v: " + atom("pi", xs, "u") + " & " + atom("pi", ys, "v") +
              " -> (E(u, v) <-> " + sh.psi + ")");
  t.add_axiom("forall u, v: E(u, v) <-> rho(u) = rho(v)");
  t.add_axiom("forall u: exists v: E(u, v) & P(v)");
  t.add_axiom("forall u, v: P(u) & P(v) & E(u, v) -> u = v");
  return t;
}

// The encoding of the proof: N a copy of phi(M^k) via pi, E the pushforward
// of psi, rho the quotient onto Q, P the image of the selection.
FiniteStructure selection_encode(const FiniteStructure& src, const SelectionShape& sh, const Language& tl,
                                 const std::function<bool(const Tuple&)>& selected) {
  const int size = src.size(0);
  const auto dom = sh.domain(size);
  std::map<Tuple, int> classes;
  for (const auto& t : dom) classes.emplace(sh.class_key(t), 0);
  int qi = 0;
  for (auto& [key, idx] : classes) idx = qi++;
  FiniteStructure out(tl, {size, static_cast<int>(dom.size()), qi});
  copy_names(src, 0, out, 0);
  for (const auto& [key, idx] : classes) out.set_name(Elem{2, idx}, sh.class_name(src, key));
  const int pi = tl.relation_index("pi"), e = tl.relation_index("E"), p = tl.relation_index("P");
  const int rho = tl.function_index("rho");
  for (std::size_t u = 0; u < dom.size(); ++u) {
    const int ui = static_cast<int>(u);
    out.set_name(Elem{1, ui}, tuple_name(src, 0, dom[u], "(", ")"));
    out.set_cell(pi, concat(dom[u], {ui}), kTrueCell);
    out.set_value(rho, {ui}, classes.at(sh.class_key(dom[u])));
    if (selected(dom[u])) out.set_cell(p, {ui}, kTrueCell);
    for (std::size_t v = 0; v < dom.size(); ++v) {
      if (sh.class_key(dom[u]) == sh.class_key(dom[v])) out.set_cell(e, {ui, static_cast<int>(v)}, kTrueCell);
    }
  }
  return out;
}

// Preimage of P under pi, as a list of selected k-tuples.
std::vector<Tuple> selection_decode(const FiniteStructure& m, int k) {
  std::vector<Tuple> out;
  const int pi = m.language().relation_index("pi"), p = m.language().relation_index("P");
  for (const auto& t : all_tuples_of(m.size(0), k)) {
    for (int u = 0; u < m.size(1); ++u) {
      if (m.holds(p, {u}) && m.holds(pi, concat(t, {u}))) out.push_back(t);
    }
  }
  return out;
}

}  // namespace

Codec tournament_codec() {
  Codec c;
  c.name = "tournament";
  c.source = tournament_class();
  SelectionShape sh;
  sh.k = 2;
  sh.phi = distinct("x", 2);
  sh.psi = same_set("x", "y", 2);
  sh.domain = [](int n) { return injective_tuples(n, 2); };
  sh.class_key = [](const Tuple& t) { return sorted(t); };
  sh.class_name = [](const FiniteStructure& m, const Tuple& key) { return tuple_name(m, 0, key, "{", "}"); };
  c.target = selection_target("tournament-target", sh);
  const Language tl = c.target.language();
  c.encode_fn = [sh, tl](const FiniteStructure& g) {
    return selection_encode(g, sh, tl, [&](const Tuple& t) { return g.holds("E", t); });
  };
  c.decode_fn = [src = c.source](const FiniteStructure& m) {
    FiniteStructure out(src.language_ptr(), {m.size(0)});
    copy_names(m, 0, out, 0);
    for (const auto& t : selection_decode(m, 2)) out.set("E", t);
    return out;
  };
  return c;
}

Codec function_codec(int n) {
  if (n < 1) throw Error("function codec needs arity at least 1");
  Codec c;
  c.name = "function";
  if (n == 1) {
    c.source = unary_function_class();
  } else {
    Language l = Language::single_sorted();
    l.add_function("f", std::vector<SortId>(static_cast<std::size_t>(n), 0), 0);
    c.source = ClassSpec("function" + std::to_string(n), l);
  }
  SelectionShape sh;
  sh.k = n + 1;
  sh.phi = "true";
  sh.psi = "(";
  for (int i = 0; i < n; ++i) sh.psi += (i ? " & x" : "x") + std::to_string(i) + " = y" + std::to_string(i);
  sh.psi += ")";
  sh.domain = [n](int size) { return all_tuples_of(size, n + 1); };
  sh.class_key = [](const Tuple& t) { return Tuple(t.begin(), t.end() - 1); };
  sh.class_name = [](const FiniteStructure& m, const Tuple& key) { return tuple_name(m, 0, key, "(", ")"); };
  c.target = selection_target("function-target", sh);
  const Language tl = c.target.language();
  c.encode_fn = [sh, tl](const FiniteStructure& m) {
    return selection_encode(m, sh, tl, [&](const Tuple& t) {
      return m.value(0, Tuple(t.begin(), t.end() - 1)) == t.back();
    });
  };
  c.decode_fn = [n, src = c.source](const FiniteStructure& m) {
    FiniteStructure out(src.language_ptr(), {m.size(0)});
    copy_names(m, 0, out, 0);
    for (const auto& t : selection_decode(m, n + 1)) out.set_value(0, Tuple(t.begin(), t.end() - 1), t.back());
    return out;
  };
  return c;
}

namespace {

void require_plain_base(const ClassSpec& base, const std::string& codec) {
  const Language& l = base.language();
  if (l.sort_count() != 1 || !l.is_relational()) {
    throw Error(codec + " codec needs a one-sorted relational base class");
  }
  if (!base.forbidden().empty()) throw Error(codec + " codec cannot translate forbidden configurations");
}

Term resort(const Term& t, SortId s) {
  Term out = t;
  out.sort = s;
  for (auto& a : out.args) a = resort(a, s);
  return out;
}

// Rewrites a one-sorted relational formula: variables move to sort `s`,
// atoms go through `on_atom`, and quantifiers are optionally relativized by
// `guard` (a formula about the bound variable).
Formula rewrite(const Formula& f, SortId s, const std::function<Formula(const Formula&)>& on_atom,
                const std::function<std::optional<Formula>(const Variable&)>& guard) {
  Formula out = f;
  for (auto& t : out.terms) t = resort(t, s);
  switch (f.kind) {
    case Formula::Kind::Rel:
      return on_atom(out);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      Variable v{f.bound.name, s};
      Formula body = rewrite(f.children[0], s, on_atom, guard);
      auto g = guard ? guard(v) : std::nullopt;
      if (!g) return f.kind == Formula::Kind::Exists ? Formula::exists(v, body) : Formula::forall(v, body);
      return f.kind == Formula::Kind::Exists ? Formula::exists(v, Formula::conj({*g, body}))
                                             : Formula::forall(v, Formula::implies(*g, body));
    }
    default:
      for (auto& c : out.children) c = rewrite(c, s, on_atom, guard);
      return out;
  }
}

std::string fresh_var(const Formula& f, const std::string& stem) {
  auto used = all_variable_names(f);
  std::string name = stem;
  for (int i = 0; used.count(name); ++i) name = stem + std::to_string(i);
  return name;
}

// Copies the base declarations (with renamed relations) and the remaining
// axioms into c.
void add_translated(ClassSpec& c, const ClassSpec& base, const std::function<std::string(const std::string&)>& ren,
                    const std::function<Formula(const Formula&)>& translate) {
  for (const auto& r : base.symmetric()) c.declare_symmetric(ren(r));
  for (const auto& r : base.irreflexive()) c.declare_irreflexive(ren(r));
  for (const auto& ax : base.axioms()) {
    Formula t = translate(ax);
    if (std::find(c.axioms().begin(), c.axioms().end(), t) == c.axioms().end()) c.add_axiom(t);
  }
}

std::vector<Term> var_terms(const std::string& p, int n, SortId s) {
  std::vector<Term> out;
  for (int i = 0; i < n; ++i) out.push_back(Term::var(p + std::to_string(i), s));
  return out;
}

std::vector<Variable> var_list(const std::string& p, int n, SortId s) {
  std::vector<Variable> out;
  for (int i = 0; i < n; ++i) out.push_back(Variable{p + std::to_string(i), s});
  return out;
}

}  // namespace

Codec automorphism_codec(const ClassSpec& base, int count) {
  require_plain_base(base, "automorphism");
  if (count < 1) throw Error("automorphism codec needs at least one automorphism");
  const Language& bl = base.language();
  Codec c;
  c.name = "automorphism";

  Language sl = bl;
  for (int j = 1; j <= count; ++j) sl.add_function("sigma" + std::to_string(j), {0}, 0);
  ClassSpec src(base.name() + "-aut", sl);
  add_translated(src, base, [](const std::string& r) { return r; }, [](const Formula& f) { return f; });
  const Term x = Term::var("x"), y = Term::var("y");
  for (int j = 1; j <= count; ++j) {
    const std::string sg = "sigma" + std::to_string(j);
    src.add_axiom(Formula::forall({Variable{"x", 0}, Variable{"y", 0}},
                                  Formula::implies(Formula::eq(Term::apply(sg, 0, {x}), Term::apply(sg, 0, {y})),
                                                   Formula::eq(x, y))));
    for (const auto& [r, sym] : bl.relations()) {
      const int ar = static_cast<int>(sym.profile.size());
      auto xs = var_terms("x", ar, 0);
      std::vector<Term> img;
      for (const auto& t : xs) img.push_back(Term::apply(sg, 0, {t}));
      src.add_axiom(Formula::forall(var_list("x", ar, 0), Formula::iff(Formula::rel(r, xs), Formula::rel(r, img))));
    }
  }
  c.source = src;

  Language tl({"M", "N"});
  for (const auto& [r, sym] : bl.relations()) {
    tl.add_relation(r + "_M", std::vector<SortId>(sym.profile.size(), 0));
    tl.add_relation(r + "_N", std::vector<SortId>(sym.profile.size(), 1));
  }
  for (int i = 0; i <= count; ++i) tl.add_function("tau" + std::to_string(i), {0}, 1);
  ClassSpec tgt(base.name() + "-aut-target", tl);
  for (const char* side : {"_M", "_N"}) {
    const SortId s = side[1] == 'M' ? 0 : 1;
    add_translated(
        tgt, base, [&](const std::string& r) { return r + side; },
        [&](const Formula& f) {
          return rewrite(
              f, s,
              [&](const Formula& a) { return Formula::rel(a.symbol + side, a.terms); }, nullptr);
        });
  }
  for (int i = 0; i <= count; ++i) {
    const std::string tau = "tau" + std::to_string(i);
    tgt.add_axiom("forall x, y: " + tau + "(x) = " + tau + "(y) -> x = y");
    tgt.add_axiom("forall v: exists x: " + tau + "(x) = v");
    for (const auto& [r, sym] : bl.relations()) {
      const int ar = static_cast<int>(sym.profile.size());
      auto xs = var_terms("x", ar, 0);
      std::vector<Term> img;
      for (const auto& t : xs) img.push_back(Term::apply(tau, 1, {t}));
      tgt.add_axiom(Formula::forall(var_list("x", ar, 0),
                                    Formula::iff(Formula::rel(r + "_M", xs), Formula::rel(r + "_N", img))));
    }
  }
  c.target = tgt;

  // (M; sigma) goes to (M, M; id, sigma_1, ...).
  c.encode_fn = [count, tl, bl](const FiniteStructure& m) {
    const int n = m.size(0);
    FiniteStructure out(tl, {n, n});
    copy_names(m, 0, out, 0);
    for (int e = 0; e < n; ++e) out.set_name(Elem{1, e}, m.name(Elem{0, e}) + "'");
    for (const auto& r : bl.relation_names()) {
      for (const auto& t : m.tuples(r)) {
        out.set(r + "_M", t);
        out.set(r + "_N", t);
      }
    }
    for (int e = 0; e < n; ++e) {
      out.set_value("tau0", {e}, e);
      for (int j = 1; j <= count; ++j) out.set_value("tau" + std::to_string(j), {e}, m.value("sigma" + std::to_string(j), {e}));
    }
    return out;
  };
  // sigma_j = tau0^-1 o tau_j, so that (M, M; id, sigma) decodes to sigma.
  c.decode_fn = [count, bl, src = c.source](const FiniteStructure& m) {
    const int n = m.size(0);
    FiniteStructure out(src.language_ptr(), {n});
    copy_names(m, 0, out, 0);
    for (const auto& r : bl.relation_names()) {
      for (const auto& t : m.tuples(r + "_M")) out.set(r, t);
    }
    std::vector<int> inv0(static_cast<std::size_t>(m.size(1)), kUndefined);
    for (int e = 0; e < n; ++e) inv0[static_cast<std::size_t>(m.value("tau0", {e}))] = e;
    for (int j = 1; j <= count; ++j) {
      const int sg = src.language().function_index("sigma" + std::to_string(j));
      for (int e = 0; e < n; ++e) {
        out.set_value(sg, {e}, inv0[static_cast<std::size_t>(m.value("tau" + std::to_string(j), {e}))]);
      }
    }
    return out;
  };
  return c;
}

Codec variation_codec(const ClassSpec& base) {
  require_plain_base(base, "variation");
  const Language& bl = base.language();
  Codec c;
  c.name = "variation";
  c.default_limit = 3;

  Language sl = Language::single_sorted();
  for (const auto& [r, sym] : bl.relations()) sl.add_relation(r + "_var", static_cast<int>(sym.profile.size()) + 1);
  ClassSpec src(base.name() + "-var", sl);
  for (const auto& ax : base.axioms()) {
    const Variable a{fresh_var(ax, "a"), 0};
    src.add_axiom(Formula::forall(a, rewrite(
                                         ax, 0,
                                         [&](const Formula& at) {
                                           std::vector<Term> args{Term::var(a)};
                                           args.insert(args.end(), at.terms.begin(), at.terms.end());
                                           return Formula::rel(at.symbol + "_var", args);
                                         },
                                         nullptr)));
  }
  c.source = src;

  Language tl({"M", "N"});
  tl.add_function("pi1", {1}, 0).add_function("pi2", {1}, 0);
  for (const auto& [r, sym] : bl.relations()) {
    std::vector<SortId> prof{0};
    prof.resize(sym.profile.size() + 1, 1);
    tl.add_relation(r + "_2", prof);
  }
  ClassSpec tgt(base.name() + "-var-target", tl);
  tgt.add_axiom("forall u, v: pi1(u) = pi1(v) & pi2(u) = pi2(v) -> u = v");
  tgt.add_axiom("forall a, b: exists u: pi1(u) = a & pi2(u) = b");
  for (const auto& [r, sym] : bl.relations()) {
    const int ar = static_cast<int>(sym.profile.size());
    std::vector<Term> args{Term::var("a", 0)};
    std::vector<Formula> fibers;
    for (const auto& u : var_terms("u", ar, 1)) {
      args.push_back(u);
      fibers.push_back(Formula::eq(Term::apply("pi1", 0, {u}), Term::var("a", 0)));
    }
    auto vs = var_list("u", ar, 1);
    vs.insert(vs.begin(), Variable{"a", 0});
    tgt.add_axiom(Formula::forall(vs, Formula::implies(Formula::rel(r + "_2", args), Formula::conj(fibers))));
  }
  // Each fiber over a carries a base structure: quantifiers range over the
  // fiber, atoms read R_2(a, .).
  for (const auto& ax : base.axioms()) {
    const Variable a{fresh_var(ax, "a"), 0};
    tgt.add_axiom(Formula::forall(
        a, rewrite(
               ax, 1,
               [&](const Formula& at) {
                 std::vector<Term> args{Term::var(a)};
                 args.insert(args.end(), at.terms.begin(), at.terms.end());
                 return Formula::rel(at.symbol + "_2", args);
               },
               [&](const Variable& v) {
                 return std::optional<Formula>(Formula::eq(Term::apply("pi1", 0, {Term::var(v)}), Term::var(a)));
               })));
  }
  c.target = tgt;

  // N = M x M with the projections; R_2(a, u) carries slice a.
  c.encode_fn = [tl, bl](const FiniteStructure& m) {
    const int n = m.size(0);
    FiniteStructure out(tl, {n, n * n});
    copy_names(m, 0, out, 0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        out.set_name(Elem{1, a * n + b}, "(" + m.name(Elem{0, a}) + "," + m.name(Elem{0, b}) + ")");
        out.set_value("pi1", {a * n + b}, a);
        out.set_value("pi2", {a * n + b}, b);
      }
    }
    for (const auto& r : bl.relation_names()) {
      for (const auto& t : m.tuples(r + "_var")) {
        Tuple img{t[0]};
        for (std::size_t k = 1; k < t.size(); ++k) img.push_back(t[0] * n + t[k]);
        out.set(r + "_2", img);
      }
    }
    return out;
  };
  c.decode_fn = [bl, src = c.source](const FiniteStructure& m) {
    const int n = m.size(0);
    FiniteStructure out(src.language_ptr(), {n});
    copy_names(m, 0, out, 0);
    std::vector<int> back(static_cast<std::size_t>(m.size(1)));
    for (int u = 0; u < m.size(1); ++u) back[static_cast<std::size_t>(u)] = m.value("pi2", {u});
    for (const auto& r : bl.relation_names()) {
      for (const auto& t : m.tuples(r + "_2")) {
        Tuple img{t[0]};
        for (std::size_t k = 1; k < t.size(); ++k) img.push_back(back[static_cast<std::size_t>(t[k])]);
        out.set(r + "_var", img);
      }
    }
    return out;
  };

  // Labeled base members per size, combined one per slice.
  c.enumerate = [base, src](int size) {
    std::vector<FiniteStructure> labeled;
    std::set<std::vector<std::vector<std::uint8_t>>> seen;
    for (const auto& rep : enumerate_models(base, {size})) {
      std::vector<int> perm(static_cast<std::size_t>(size));
      std::iota(perm.begin(), perm.end(), 0);
      do {
        FiniteStructure l = relabel(rep, Embedding{{perm}});
        std::vector<std::vector<std::uint8_t>> key;
        for (std::size_t r = 0; r < l.language().relation_names().size(); ++r) key.push_back(l.table(static_cast<int>(r)));
        if (seen.insert(key).second) labeled.push_back(std::move(l));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::map<std::vector<int>, FiniteStructure> reps;
    std::vector<std::size_t> pick(static_cast<std::size_t>(size), 0);
    if (labeled.empty() && size > 0) return std::vector<FiniteStructure>{};
    for (;;) {
      FiniteStructure v(src.language_ptr(), {size});
      for (int a = 0; a < size; ++a) {
        const FiniteStructure& slice = labeled[pick[static_cast<std::size_t>(a)]];
        for (const auto& r : slice.language().relation_names()) {
          for (const auto& t : slice.tuples(r)) v.set(r + "_var", concat({a}, t));
        }
      }
      auto code = canonical_code(v);
      if (!reps.count(code)) reps.emplace(code, canonical_form(v));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == labeled.size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    std::vector<FiniteStructure> out;
    for (auto& [code, m] : reps) out.push_back(std::move(m));
    return out;
  };
  return c;
}

namespace {
const std::map<std::string, std::function<Codec()>>& codec_registry() {
  static const std::map<std::string, std::function<Codec()>> r = {
      {"hypergraph-pi", [] { return hypergraph_pi_codec(2); }},
      {"hypergraph-dis", [] { return hypergraph_dis_codec(2); }},
      {"tournament", tournament_codec},
      {"function", [] { return function_codec(1); }},
      {"automorphism", [] { return automorphism_codec(graphs_class(), 1); }},
      {"variation", [] { return variation_codec(graphs_class()); }},
  };
  return r;
}
}  // namespace

std::vector<std::string> codec_names() {
  std::vector<std::string> out;
  for (const auto& [n, f] : codec_registry()) out.push_back(n);
  return out;
}

Codec builtin_codec(const std::string& name) {
  auto it = codec_registry().find(name);
  if (it == codec_registry().end()) throw Error("unknown codec '" + name + "'");
  return it->second();
}

RoundtripReport roundtrip_check(const Codec& codec, int size_limit, unsigned jobs) {
  RoundtripReport rep;
  rep.codec = codec.name;
  rep.size_limit = size_limit;
  std::vector<FiniteStructure> inputs;
  for (int s = std::max(0, codec.min_size); s <= size_limit; ++s) {
    auto part = codec.enumerate ? codec.enumerate(s) : enumerate_models(codec.source, {s});
    inputs.insert(inputs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  rep.entries.resize(inputs.size());
  parallel_find_first(inputs.size(), jobs, [&](std::size_t i) {
    RoundtripEntry& e = rep.entries[i];
    e.input = inputs[i];
    auto fail = [&](const char* stage, std::string detail) {
      e.stage = stage;
      e.detail = std::move(detail);
      return false;
    };
    FiniteStructure enc;
    try {
      enc = encode(codec, e.input);
    } catch (const Error& err) {
      return fail("encode", err.what());
    }
    e.encoded = enc;
    if (auto v = codec.target.violation(enc)) return fail("target", *v);
    FiniteStructure dec;
    try {
      dec = codec.decode_fn(enc);
    } catch (const Error& err) {
      return fail("decode", err.what());
    }
    Embedding id = Embedding::identity(e.input.sizes());
    if (dec.sizes() != e.input.sizes() || !is_embedding(e.input, dec, id)) {
      return fail("isomorphism", "decode(encode(x)) differs from x under the identity");
    }
    e.isomorphism = id;
    if (!(codec.encode_fn(dec) == enc)) return fail("re-encode", "encode(decode(encode(x))) differs from encode(x)");
    e.ok = true;
    e.stage.clear();
    return false;
  });
  rep.checked = inputs.size();
  for (const auto& e : rep.entries) rep.passed += e.ok ? 1 : 0;
  return rep;
}

FiniteStructure henson_reduct(const FiniteStructure& fusion) {
  const FusionSpec fs = hypergraph_fusion();
  for (std::size_t i = 0; i < fs.members.size(); ++i) {
    const ClassSpec& member = fs.members[i];
    if (!fusion.language().contains(member.language())) {
      throw SortError("henson_reduct needs the language {R, E1, E2}");
    }
    if (auto v = member.violation(fusion.reduct(member.language()))) {
      throw ClassViolation("reduct " + member.name() + " violates " + *v);
    }
  }
  FiniteStructure g(graphs_class().language_ptr(), {fusion.size(0)});
  copy_names(fusion, 0, g, 0);
  const int n = fusion.size(0);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (fusion.holds("E1", {x, y}) && fusion.holds("E2", {x, y})) g.set("E", {x, y});
    }
  }
  return g;
}

std::size_t count_triangles(const FiniteStructure& graph) {
  const int n = graph.size(0);
  const int e = graph.language().relation_index("E");
  std::size_t out = 0;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (!graph.holds(e, {x, y})) continue;
      for (int z = y + 1; z < n; ++z) {
        if (graph.holds(e, {y, z}) && graph.holds(e, {x, z})) ++out;
      }
    }
  }
  return out;
}

HensonRun henson_saturate(const FiniteStructure& fusion, int budget, int ext_size, std::uint64_t seed) {
  const FusionSpec fs = hypergraph_fusion();
  const ClassSpec tf = triangle_free_class();
  HensonRun run;
  run.fusion = fusion;
  run.built_size = fusion.size(0);
  std::mt19937_64 rng(seed);
  for (;;) {
    FiniteStructure g = henson_reduct(run.fusion);
    const int n = g.size(0);
    auto rep = check_extension_axioms(g, tf, ext_size, 1);
    if (rep.satisfied || n >= budget) break;
    const MissingExtension& need = rep.missing.front();
    const int last = need.extension.size(0) - 1;
    std::set<int> inside, nbrs;
    for (std::size_t i = 0; i < need.subset.size(); ++i) {
      inside.insert(need.subset[i].index);
      if (need.extension.holds("E", {static_cast<int>(i), last})) nbrs.insert(need.subset[i].index);
    }
    std::vector<int> others;
    for (int p = 0; p < n; ++p) {
      if (!inside.count(p)) others.push_back(p);
    }
    std::shuffle(others.begin(), others.end(), rng);
    for (int p : others) {
      bool free = std::none_of(nbrs.begin(), nbrs.end(), [&](int q) { return g.holds("E", {p, q}); });
      if (free) nbrs.insert(p);
    }

    std::vector<QfType> types(2);
    for (int i = 0; i < 2; ++i) {
      QfType& t = types[static_cast<std::size_t>(i)];
      const std::string e = i == 0 ? "E1" : "E2";
      for (int a = 0; a < n; ++a) {
        t.base.push_back(Elem{0, a});
        t.literals.push_back(PointLiteral{nbrs.count(a) > 0, e, {std::nullopt, Elem{0, a}}});
        for (int b = a + 1; b < n; ++b) {
          bool tri = nbrs.count(a) && nbrs.count(b) && run.fusion.holds("E1", {a, b});
          t.literals.push_back(PointLiteral{tri, "R", {std::nullopt, Elem{0, a}, Elem{0, b}}});
        }
      }
    }
    run.fusion = realize_joint_type(run.fusion, types, fs).structure;
    ++run.saturation_steps;
  }
  run.graph = henson_reduct(run.fusion);
  run.triangles = count_triangles(run.graph);
  run.coverage = check_extension_axioms(run.graph, tf, ext_size);
  return run;
}

HensonRun henson_construction(int budget, std::uint64_t seed, int ext_size) {
  GenericModel gm = build_generic(fusion_class(), budget, 1, seed);
  HensonRun run = henson_saturate(gm.structure, budget, ext_size, seed);
  run.built_size = gm.structure.size(0);
  run.build_quiescent = gm.quiescent;
  return run;
}

}  // namespace fusionlab
