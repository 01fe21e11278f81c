#include "fusionlab/normal_forms.hpp"

#include <algorithm>
#include <functional>

#include "fusionlab/error.hpp"
#include "fusionlab/search.hpp"

namespace fusionlab {

Formula FlatLiteral::to_formula(const Language& lang) const {
  Formula atom;
  std::vector<Term> ts;
  for (const auto& v : args) ts.push_back(Term::var(v));
  switch (kind) {
    case Kind::Eq:
      atom = Formula::eq(ts[0], ts[1]);
      break;
    case Kind::Rel:
      atom = Formula::rel(symbol, std::move(ts));
      break;
    case Kind::Fun: {
      Term lhs = lang.constants().count(symbol) ? Term::constant(symbol, result.sort)
                                                : Term::apply(symbol, result.sort, std::move(ts));
      atom = Formula::eq(std::move(lhs), Term::var(result));
      break;
    }
  }
  return positive ? atom : Formula::negate(std::move(atom));
}

std::vector<Variable> FlatLiteral::variables() const {
  std::vector<Variable> out = args;
  if (kind == Kind::Fun) out.push_back(result);
  return out;
}

std::optional<FlatLiteral> as_flat_literal(const Formula& f) {
  bool positive = true;
  const Formula* a = &f;
  if (a->kind == Formula::Kind::Not) {
    positive = false;
    a = &a->children[0];
  }
  auto all_vars = [](const std::vector<Term>& ts) {
    return std::all_of(ts.begin(), ts.end(), [](const Term& t) { return t.is_var(); });
  };
  auto vars_of = [](const std::vector<Term>& ts) {
    std::vector<Variable> out;
    for (const auto& t : ts) out.push_back(t.as_variable());
    return out;
  };
  FlatLiteral l;
  l.positive = positive;
  if (a->kind == Formula::Kind::Rel) {
    if (!all_vars(a->terms)) return std::nullopt;
    l.kind = FlatLiteral::Kind::Rel;
    l.symbol = a->symbol;
    l.args = vars_of(a->terms);
    return l;
  }
  if (a->kind != Formula::Kind::Eq) return std::nullopt;
  const Term& lhs = a->terms[0];
  const Term& rhs = a->terms[1];
  if (!rhs.is_var()) return std::nullopt;
  if (lhs.is_var()) {
    l.kind = FlatLiteral::Kind::Eq;
    l.args = {lhs.as_variable(), rhs.as_variable()};
    return l;
  }
  if (!all_vars(lhs.args)) return std::nullopt;
  l.kind = FlatLiteral::Kind::Fun;
  l.symbol = lhs.name;
  l.args = vars_of(lhs.args);
  l.result = rhs.as_variable();
  return l;
}

Formula EFlatFormula::to_formula(const Language& lang) const {
  std::vector<Formula> parts;
  for (const auto& l : body) parts.push_back(l.to_formula(lang));
  return Formula::exists(witnesses, Formula::conj(std::move(parts)));
}

std::vector<Variable> EFlatFormula::free_vars() const {
  std::vector<Variable> out;
  for (const auto& l : body) {
    for (const auto& v : l.variables()) {
      if (std::find(witnesses.begin(), witnesses.end(), v) != witnesses.end()) continue;
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  return out;
}

namespace {

bool literal_true(const FiniteStructure& m, const FlatLiteral& l, const std::vector<int>& slots,
                  const std::vector<int>& vals) {
  const Language& lang = m.language();
  bool v = false;
  switch (l.kind) {
    case FlatLiteral::Kind::Eq:
      v = vals[static_cast<std::size_t>(slots[0])] == vals[static_cast<std::size_t>(slots[1])];
      break;
    case FlatLiteral::Kind::Rel: {
      Tuple t;
      for (int s : slots) t.push_back(vals[static_cast<std::size_t>(s)]);
      v = m.holds(l.symbol, t);
      break;
    }
    case FlatLiteral::Kind::Fun: {
      int y = vals[static_cast<std::size_t>(slots.back())];
      if (lang.constants().count(l.symbol)) {
        v = m.constant(l.symbol) == y;
      } else {
        Tuple t;
        for (std::size_t i = 0; i + 1 < slots.size(); ++i) t.push_back(vals[static_cast<std::size_t>(slots[i])]);
        v = m.value(l.symbol, t) == y;
      }
      break;
    }
  }
  return v == l.positive;
}

}  // namespace

std::size_t EFlatFormula::count_witnesses(const FiniteStructure& m, const std::vector<int>& values,
                                          std::size_t limit) const {
  std::vector<Variable> fv = free_vars();
  if (values.size() != fv.size()) throw Error("E-flat evaluation needs one value per free variable");
  std::vector<Variable> all = fv;
  all.insert(all.end(), witnesses.begin(), witnesses.end());
  auto slot_of = [&](const Variable& v) {
    return static_cast<int>(std::find(all.begin(), all.end(), v) - all.begin());
  };
  const int nfree = static_cast<int>(fv.size());
  // Each literal is checked once its last variable is bound.
  std::vector<std::vector<std::pair<const FlatLiteral*, std::vector<int>>>> at_level(witnesses.size() + 1);
  for (const auto& l : body) {
    std::vector<int> slots;
    int level = 0;
    for (const auto& v : l.variables()) {
      int s = slot_of(v);
      slots.push_back(s);
      level = std::max(level, s < nfree ? 0 : s - nfree + 1);
    }
    at_level[static_cast<std::size_t>(level)].emplace_back(&l, std::move(slots));
  }
  std::vector<int> vals(all.size(), 0);
  std::copy(values.begin(), values.end(), vals.begin());
  auto ok = [&](std::size_t level) {
    for (const auto& [l, slots] : at_level[level]) {
      if (!literal_true(m, *l, slots, vals)) return false;
    }
    return true;
  };
  if (!ok(0)) return 0;
  std::size_t count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (count >= limit) return;
    if (i == witnesses.size()) {
      ++count;
      return;
    }
    for (int v = 0; v < m.size(witnesses[i].sort) && count < limit; ++v) {
      vals[static_cast<std::size_t>(nfree) + i] = v;
      if (ok(i + 1)) rec(i + 1);
    }
  };
  rec(0);
  return count;
}

namespace {

struct Lit {
  Formula atom;
  bool positive;
};

using Clause = std::vector<Lit>;

// Negation normal form as a DNF clause list, with a running literal budget.
struct Dnf {
  std::size_t budget;

  static std::size_t literals(const std::vector<Clause>& cs) {
    std::size_t n = 0;
    for (const auto& c : cs) n += c.size();
    return n;
  }

  void check(const std::vector<Clause>& cs) const {
    if (literals(cs) > budget) {
      throw BudgetError("DNF exceeds the literal budget of " + std::to_string(budget));
    }
  }

  std::vector<Clause> run(const Formula& f, bool neg) {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::True:
        return neg ? std::vector<Clause>{} : std::vector<Clause>{Clause{}};
      case K::False:
        return neg ? std::vector<Clause>{Clause{}} : std::vector<Clause>{};
      case K::Eq:
      case K::Rel:
        return {Clause{Lit{f, !neg}}};
      case K::Not:
        return run(f.children[0], !neg);
      case K::And:
      case K::Or: {
        bool conj = (f.kind == K::And) != neg;
        std::vector<std::vector<Clause>> parts;
        for (const auto& c : f.children) parts.push_back(run(c, neg));
        return conj ? product(parts) : concat(parts);
      }
      case K::Implies: {
        // a -> b  ==  !a | b
        Formula d = Formula::disj({Formula::negate(f.children[0]), f.children[1]});
        return run(d, neg);
      }
      case K::Iff: {
        const Formula& a = f.children[0];
        const Formula& b = f.children[1];
        Formula d = Formula::disj({Formula::conj({a, b}), Formula::conj({Formula::negate(a), Formula::negate(b)})});
        return run(d, neg);
      }
      case K::Exists:
      case K::Forall:
        break;
    }
    throw Error("flattening needs a quantifier-free formula");
  }

  // Drops duplicate literals, contradictory clauses, and subsumed clauses.
  static std::vector<Clause> simplify(std::vector<Clause> cs) {
    std::vector<Clause> kept;
    for (auto& c : cs) {
      Clause d;
      bool contradictory = false;
      for (auto& l : c) {
        bool dup = false;
        for (const auto& e : d) {
          if (e.atom == l.atom) {
            if (e.positive == l.positive) dup = true;
            else contradictory = true;
          }
        }
        if (!dup) d.push_back(std::move(l));
      }
      if (!contradictory) kept.push_back(std::move(d));
    }
    auto subset = [](const Clause& a, const Clause& b) {
      return std::all_of(a.begin(), a.end(), [&](const Lit& l) {
        return std::any_of(b.begin(), b.end(), [&](const Lit& m) { return m.atom == l.atom && m.positive == l.positive; });
      });
    };
    std::vector<char> drop(kept.size(), 0);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = 0; j < kept.size() && !drop[i]; ++j) {
        if (i == j || !subset(kept[j], kept[i])) continue;
        // Strictly smaller clause, or an equal one appearing earlier.
        drop[i] = kept[j].size() < kept[i].size() || j < i;
      }
    }
    std::vector<Clause> out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (!drop[i]) out.push_back(std::move(kept[i]));
    }
    return out;
  }

  std::vector<Clause> concat(std::vector<std::vector<Clause>>& parts) {
    std::vector<Clause> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    out = simplify(std::move(out));
    check(out);
    return out;
  }

  std::vector<Clause> product(std::vector<std::vector<Clause>>& parts) {
    std::vector<Clause> acc{Clause{}};
    for (auto& p : parts) {
      std::vector<Clause> next;
      for (const auto& a : acc) {
        for (const auto& b : p) {
          Clause c = a;
          c.insert(c.end(), b.begin(), b.end());
          next.push_back(std::move(c));
        }
      }
      acc = simplify(std::move(next));
      check(acc);
    }
    check(acc);
    return acc;
  }
};

class Unnester {
 public:
  Unnester(const Language& lang, const std::set<std::string>& taken) : lang_(lang), fresh_(taken) {}

  EFlatFormula run(const Clause& clause) {
    std::vector<FlatLiteral> main;
    for (const auto& lit : clause) main.push_back(literal(lit));
    EFlatFormula out;
    out.witnesses = witnesses_;
    for (auto* part : {&defs_, &main}) {
      for (auto& l : *part) {
        if (std::find(out.body.begin(), out.body.end(), l) == out.body.end()) out.body.push_back(l);
      }
    }
    return out;
  }

 private:
  Variable name_of(const Term& t) {
    if (t.is_var()) return t.as_variable();
    if (auto it = named_.find(t); it != named_.end()) return it->second;
    std::vector<Variable> args;
    for (const auto& a : t.args) args.push_back(name_of(a));
    Variable w = fresh_.next(t.sort);
    FlatLiteral def;
    def.kind = FlatLiteral::Kind::Fun;
    def.symbol = t.name;
    def.args = std::move(args);
    def.result = w;
    defs_.push_back(std::move(def));
    witnesses_.push_back(w);
    named_.emplace(t, w);
    return w;
  }

  FlatLiteral fun_literal(const Term& t, const Variable& y, bool positive) {
    FlatLiteral l;
    l.positive = positive;
    if (auto it = named_.find(t); it != named_.end()) {
      l.kind = FlatLiteral::Kind::Eq;
      l.args = {it->second, y};
      return l;
    }
    l.kind = FlatLiteral::Kind::Fun;
    l.symbol = t.name;
    for (const auto& a : t.args) l.args.push_back(name_of(a));
    l.result = y;
    return l;
  }

  FlatLiteral literal(const Lit& lit) {
    const Formula& a = lit.atom;
    FlatLiteral l;
    l.positive = lit.positive;
    if (a.kind == Formula::Kind::Rel) {
      l.kind = FlatLiteral::Kind::Rel;
      l.symbol = a.symbol;
      for (const auto& t : a.terms) l.args.push_back(name_of(t));
      return l;
    }
    const Term& lhs = a.terms[0];
    const Term& rhs = a.terms[1];
    if (lhs.is_var() && rhs.is_var()) {
      l.kind = FlatLiteral::Kind::Eq;
      l.args = {lhs.as_variable(), rhs.as_variable()};
      return l;
    }
    if (rhs.is_var()) return fun_literal(lhs, rhs.as_variable(), lit.positive);
    if (lhs.is_var()) return fun_literal(rhs, lhs.as_variable(), lit.positive);
    Variable y = name_of(rhs);
    return fun_literal(lhs, y, lit.positive);
  }

  const Language& lang_;
  FreshNames fresh_;
  std::map<Term, Variable> named_;
  std::vector<Variable> witnesses_;
  std::vector<FlatLiteral> defs_;
};

}  // namespace

std::vector<EFlatFormula> flatten_to_eflat(const Formula& f, const Language& lang, std::size_t literal_budget) {
  if (!f.is_quantifier_free()) throw Error("flattening needs a quantifier-free formula");
  check_well_sorted(f, lang);
  std::vector<Clause> clauses = Dnf{literal_budget}.run(f, false);
  std::set<std::string> taken = all_variable_names(f);
  std::vector<EFlatFormula> out;
  for (const auto& c : clauses) out.push_back(Unnester(lang, taken).run(c));
  return out;
}

namespace {

void for_each_values(const FiniteStructure& m, const std::vector<Variable>& vars,
                     const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> vals(vars.size(), 0);
  bool stop = false;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (stop) return;
    if (i == vars.size()) {
      if (!visit(vals)) stop = true;
      return;
    }
    for (int v = 0; v < m.size(vars[i].sort) && !stop; ++v) {
      vals[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
}

bool carriers_usable(const Language& lang, const std::vector<int>& sizes) {
  for (const auto& [n, s] : lang.constants()) {
    if (sizes[static_cast<std::size_t>(s)] == 0) return false;
  }
  for (const auto& [n, f] : lang.functions()) {
    std::size_t dom = 1;
    for (SortId a : f.args) dom *= static_cast<std::size_t>(sizes[static_cast<std::size_t>(a)]);
    if (dom > 0 && sizes[static_cast<std::size_t>(f.result)] == 0) return false;
  }
  return true;
}

}  // namespace

std::optional<UniqueWitnessFailure> check_unique_witness(const EFlatFormula& e, const Language& lang, int max_size) {
  // Reduce to positive function literals when they pin down every witness.
  EFlatFormula core;
  core.witnesses = e.witnesses;
  std::set<std::string> symbols;
  std::set<Variable> defined;
  for (const auto& l : e.body) {
    if (l.kind == FlatLiteral::Kind::Fun && l.positive) {
      core.body.push_back(l);
      symbols.insert(l.symbol);
      defined.insert(l.result);
    }
  }
  bool reducible = std::all_of(e.witnesses.begin(), e.witnesses.end(),
                               [&](const Variable& w) { return defined.count(w) > 0; });
  const EFlatFormula& target = reducible ? core : e;
  Language reduced = reducible ? lang.restrict_to(symbols) : lang;
  // Free variables of the original stay in scope (they may vanish from the core).
  std::vector<Variable> fv = e.free_vars();
  std::vector<Variable> core_fv = target.free_vars();

  std::optional<UniqueWitnessFailure> failure;
  for (int n = 1; n <= max_size && !failure; ++n) {
    for (const auto& sizes : size_vectors(lang.sort_count(), n)) {
      if (!carriers_usable(reduced, sizes) || failure) continue;
      for_each_labeled(reduced, sizes, [&](const FiniteStructure& m) {
        for_each_values(m, fv, [&](const std::vector<int>& vals) {
          std::vector<int> sub;
          for (const auto& v : core_fv) {
            sub.push_back(vals[static_cast<std::size_t>(std::find(fv.begin(), fv.end(), v) - fv.begin())]);
          }
          std::size_t c = target.count_witnesses(m, sub, 2);
          if (c > 1) failure = UniqueWitnessFailure{m, vals, c};
          return !failure;
        });
        return !failure;
      });
    }
  }
  return failure;
}

std::map<int, std::vector<FlatLiteral>> split_flat_by_language(const std::vector<FlatLiteral>& conj,
                                                               const LanguageFamily& family) {
  std::map<int, std::vector<FlatLiteral>> out;
  for (const auto& l : conj) {
    Formula f = l.to_formula(family.union_language);
    auto members = classify_formula(f, family);
    if (members.empty()) {
      throw Error("literal " + to_string(f, family.union_language) + " lies in no member language");
    }
    out[*members.begin()].push_back(l);
  }
  return out;
}

std::vector<DiagramLiteral> flat_diagram(const FiniteStructure& m) {
  const Language& lang = m.language();
  std::vector<DiagramLiteral> out;
  for (int s = 0; s < lang.sort_count(); ++s) {
    for (int a = 0; a < m.size(s); ++a) {
      for (int b = 0; b < m.size(s); ++b) {
        out.push_back(DiagramLiteral{FlatLiteral::Kind::Eq, a == b, {}, {Elem{s, a}, Elem{s, b}}, {}});
      }
    }
  }
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    const auto& name = lang.relation_names()[r];
    const auto& prof = lang.relations().at(name).profile;
    for (const Tuple& t : m.all_tuples(prof)) {
      DiagramLiteral l{FlatLiteral::Kind::Rel, m.holds(static_cast<int>(r), t), name, {}, {}};
      for (std::size_t i = 0; i < t.size(); ++i) l.args.push_back(Elem{prof[i], t[i]});
      out.push_back(std::move(l));
    }
  }
  for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
    const auto& name = lang.function_names()[f];
    const auto& fs = lang.functions().at(name);
    for (const Tuple& t : m.all_tuples(fs.args)) {
      int v = m.value(static_cast<int>(f), t);
      for (int c = 0; c < m.size(fs.result); ++c) {
        DiagramLiteral l{FlatLiteral::Kind::Fun, v == c, name, {}, Elem{fs.result, c}};
        for (std::size_t i = 0; i < t.size(); ++i) l.args.push_back(Elem{fs.args[i], t[i]});
        out.push_back(std::move(l));
      }
    }
  }
  for (const auto& [name, s] : lang.constants()) {
    int v = m.constant(name);
    for (int c = 0; c < m.size(s); ++c) out.push_back(DiagramLiteral{FlatLiteral::Kind::Fun, v == c, name, {}, Elem{s, c}});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_string(const DiagramLiteral& l, const FiniteStructure& m) {
  std::string args;
  for (std::size_t i = 0; i < l.args.size(); ++i) args += (i ? "," : "") + m.name(l.args[i]);
  std::string body;
  switch (l.kind) {
    case FlatLiteral::Kind::Eq:
      body = m.name(l.args[0]) + "=" + m.name(l.args[1]);
      break;
    case FlatLiteral::Kind::Rel:
      body = l.symbol + "(" + args + ")";
      break;
    case FlatLiteral::Kind::Fun:
      body = (m.language().constants().count(l.symbol) ? l.symbol : l.symbol + "(" + args + ")") + "=" + m.name(l.result);
      break;
  }
  return l.positive ? body : "!" + body;
}

bool diagram_satisfied(const std::vector<DiagramLiteral>& diagram, const FiniteStructure& host, const Embedding& h) {
  for (const auto& l : diagram) {
    Tuple t;
    for (const auto& e : l.args) t.push_back(h(e));
    bool v = false;
    switch (l.kind) {
      case FlatLiteral::Kind::Eq:
        v = t[0] == t[1];
        break;
      case FlatLiteral::Kind::Rel:
        v = host.holds(l.symbol, t);
        break;
      case FlatLiteral::Kind::Fun:
        v = (host.language().constants().count(l.symbol) ? host.constant(l.symbol) : host.value(l.symbol, t)) ==
            h(l.result);
        break;
    }
    if (v != l.positive) return false;
  }
  return true;
}

MorleyizationResult morleyize(const Language& lang, const std::vector<Formula>& formulas,
                              const std::set<std::string>& reserved) {
  MorleyizationResult out;
  out.language = lang;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (formulas[i] == formulas[j]) {
        throw Error("duplicate formula in Morleyization input: " + to_string(formulas[i], lang));
      }
    }
  }
  int counter = 0;
  for (const auto& f : formulas) {
    check_well_sorted(f, lang);
    std::string name;
    do {
      name = "Phi" + std::to_string(counter++);
    } while (out.language.has_symbol(name) || reserved.count(name));
    auto vars = free_variables(f);
    std::vector<SortId> prof;
    std::vector<Term> args;
    for (const auto& v : vars) {
      prof.push_back(v.sort);
      args.push_back(Term::var(v));
    }
    out.language.add_relation(name, prof);
    out.formulas.push_back(f);
    out.symbols.push_back(name);
    out.arguments.push_back(vars);
    out.axioms.push_back(Formula::forall(vars, Formula::iff(Formula::rel(name, std::move(args)), f)));
  }
  return out;
}

FiniteStructure MorleyizationResult::expand(const FiniteStructure& m) const {
  FiniteStructure out = m.expand(language);
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    CompiledFormula cf(formulas[i], m.language(), arguments[i]);
    int rel = language.relation_index(symbols[i]);
    const auto& prof = language.relations().at(symbols[i]).profile;
    for (std::size_t off = 0; off < out.tuple_space(prof); ++off) {
      Tuple t = out.decode(prof, off);
      out.table(rel)[off] = cf(m, t) ? kTrueCell : kFalseCell;
    }
  }
  return out;
}

BoundedVerdict check_bounded(const Formula& f, const std::vector<Variable>& x, const std::vector<Variable>& y,
                             const ClassSpec& spec, int k, int size_limit) {
  if (size_limit < 1) throw Error("size limit must be positive");
  if (k < 1) throw Error("bound must be positive");
  check_well_sorted(f, spec.language());
  for (const auto& v : free_variables(f)) {
    if (std::find(x.begin(), x.end(), v) == x.end() && std::find(y.begin(), y.end(), v) == y.end()) {
      throw Error("free variable '" + v.name + "' is in neither x nor y");
    }
  }
  std::vector<Variable> all = x;
  all.insert(all.end(), y.begin(), y.end());
  CompiledFormula cf(f, spec.language(), all);
  BoundedVerdict out;
  out.size_limit = size_limit;
  for (const auto& m : enumerate_up_to(spec, size_limit)) {
    bool refuted = false;
    for_each_values(m, x, [&](const std::vector<int>& xv) {
      std::size_t count = 0;
      std::vector<int> vals = xv;
      vals.resize(all.size());
      for_each_values(m, y, [&](const std::vector<int>& yv) {
        std::copy(yv.begin(), yv.end(), vals.begin() + static_cast<std::ptrdiff_t>(x.size()));
        if (cf(m, vals)) ++count;
        return count <= static_cast<std::size_t>(k);
      });
      if (count > static_cast<std::size_t>(k)) {
        out.witness = m;
        out.x_values = xv;
        out.count = count;
        refuted = true;
      }
      return !refuted;
    });
    if (refuted) {
      out.note = "refuted on a class member of size " + std::to_string(m.total_size());
      return out;
    }
  }
  out.verified = true;
  out.note = "verified on all class members of size <= " + std::to_string(size_limit) +
             "; a size-bounded check is necessary, not sufficient, for boundedness in the theory";
  return out;
}

BoundedFormula make_bounded(const Formula& f, const std::vector<Variable>& x, const std::vector<Variable>& y, int k,
                            const BoundedVerdict& verdict) {
  if (!verdict.verified) throw Error("bounded formula entry needs a verified bound");
  BoundedFormula b{f, x, y, y.empty() ? 1 : k, {false, verdict.size_limit, verdict.note}};
  return b;
}

BoundedFormula conjoin_bounded(const BoundedFormula& f1, const BoundedFormula& f2) {
  std::set<std::string> taken = all_variable_names(f1.formula);
  for (const auto& n : all_variable_names(f2.formula)) taken.insert(n);
  FreshNames fresh(taken);
  std::set<Variable> clash(f1.x.begin(), f1.x.end());
  clash.insert(f1.y.begin(), f1.y.end());
  std::map<Variable, Term> rename;
  std::vector<Variable> y2;
  for (const auto& v : f2.y) {
    if (clash.count(v)) {
      Variable w = fresh.next(v.sort);
      rename.emplace(v, Term::var(w));
      y2.push_back(w);
    } else {
      y2.push_back(v);
    }
  }
  BoundedFormula out;
  out.formula = Formula::conj({f1.formula, substitute(f2.formula, rename)});
  out.x = f1.x;
  for (const auto& v : f2.x) {
    if (std::find(out.x.begin(), out.x.end(), v) == out.x.end()) out.x.push_back(v);
  }
  out.y = f1.y;
  out.y.insert(out.y.end(), y2.begin(), y2.end());
  out.bound = (f1.y.empty() ? 1 : f1.bound) * (f2.y.empty() ? 1 : f2.bound);
  out.record.declared = f1.record.declared && f2.record.declared;
  out.record.verified_size = std::min(f1.record.verified_size, f2.record.verified_size);
  out.record.note = "product of the conjuncts' bounds";
  return out;
}

}  // namespace fusionlab
