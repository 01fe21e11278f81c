#include "fusionlab/search.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "fusionlab/error.hpp"

namespace fusionlab {

std::size_t enumeration_budget() {
  if (const char* env = std::getenv("FUSIONLAB_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 4'000'000;
}

void for_each_labeled(const Language& lang, const std::vector<int>& sizes,
                      const std::function<bool(const FiniteStructure&)>& visit) {
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
    for (std::size_t o = 0; o < m.function_table(static_cast<int>(f)).size(); ++o) {
      slots.push_back({1, static_cast<int>(f), o, range});
    }
  }
  for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
    slots.push_back({2, static_cast<int>(c), 0, m.size(lang.constants().at(lang.constant_names()[c]))});
  }
  bool stop = false;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (stop) return;
    if (i == slots.size()) {
      if (!visit(m)) stop = true;
      return;
    }
    const Slot& s = slots[i];
    for (int v = 0; v < s.range && !stop; ++v) {
      if (s.kind == 0) m.table(s.sym)[s.off] = static_cast<std::uint8_t>(v);
      if (s.kind == 1) m.function_table(s.sym)[s.off] = v;
      if (s.kind == 2) m.set_constant(s.sym, v);
      rec(i + 1);
    }
  };
  rec(0);
}

Embedding empty_partial(const std::vector<int>& source_sizes) {
  Embedding e;
  for (int n : source_sizes) e.map.emplace_back(static_cast<std::size_t>(n), -1);
  return e;
}

namespace {

struct RelCheck {
  int rel;
  Tuple tuple;
  std::uint8_t value;
};

struct FunCheck {
  int fn;
  Tuple args;
  int value;
};

// Per element: true-tuple counts per (relation, position).
std::vector<std::vector<std::vector<int>>> degrees(const FiniteStructure& m) {
  const Language& lang = m.language();
  std::vector<std::vector<std::vector<int>>> deg(static_cast<std::size_t>(lang.sort_count()));
  std::size_t slots = 0;
  for (const auto& n : lang.relation_names()) slots += lang.relations().at(n).profile.size();
  for (int s = 0; s < lang.sort_count(); ++s) {
    deg[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(m.size(s)), std::vector<int>(slots, 0));
  }
  std::size_t base = 0;
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    const auto& prof = lang.relations().at(lang.relation_names()[r]).profile;
    for (const Tuple& t : m.tuples(static_cast<int>(r))) {
      for (std::size_t i = 0; i < prof.size(); ++i) {
        ++deg[static_cast<std::size_t>(prof[i])][static_cast<std::size_t>(t[i])][base + i];
      }
    }
    base += prof.size();
  }
  return deg;
}

}  // namespace

void for_each_embedding(const FiniteStructure& source, const FiniteStructure& target,
                        const std::optional<Embedding>& partial, MapKind kind,
                        const std::function<bool(const Embedding&)>& visit) {
  const Language& lang = source.language();
  if (!(lang == target.language())) throw SortError("embedding between structures over different languages");
  const int sorts = lang.sort_count();
  if (kind == MapKind::Isomorphism && source.sizes() != target.sizes()) return;
  for (int s = 0; s < sorts; ++s) {
    if (source.size(s) > target.size(s)) return;
  }

  Embedding map = partial ? *partial : empty_partial(source.sizes());
  // Constants are forced.
  for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
    int v = source.constant(static_cast<int>(c));
    if (v == kUndefined) continue;
    int w = target.constant(static_cast<int>(c));
    SortId s = lang.constants().at(lang.constant_names()[c]);
    int& slot = map.map[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
    if (w == kUndefined || (slot >= 0 && slot != w)) return;
    slot = w;
  }

  // Element order and positions.
  std::vector<Elem> order = source.elements();
  std::vector<std::vector<int>> pos(static_cast<std::size_t>(sorts));
  for (int s = 0; s < sorts; ++s) pos[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(source.size(s)));
  for (std::size_t k = 0; k < order.size(); ++k) {
    pos[static_cast<std::size_t>(order[k].sort)][static_cast<std::size_t>(order[k].index)] = static_cast<int>(k);
  }
  std::vector<std::vector<int>> used(static_cast<std::size_t>(sorts));
  for (int s = 0; s < sorts; ++s) {
    used[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(target.size(s)), 0);
    for (int v : map.map[static_cast<std::size_t>(s)]) {
      if (v < 0) continue;
      if (v >= target.size(s) || used[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)]) return;
      used[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)] = 1;
    }
  }

  std::vector<std::vector<RelCheck>> rel_checks(order.size());
  std::vector<std::vector<FunCheck>> fun_checks(order.size());
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    const auto& prof = lang.relations().at(lang.relation_names()[r]).profile;
    const auto& tab = source.table(static_cast<int>(r));
    for (std::size_t off = 0; off < tab.size(); ++off) {
      if (tab[off] == kUnknownCell) continue;
      Tuple t = source.decode(prof, off);
      int level = -1;
      for (std::size_t i = 0; i < prof.size(); ++i) {
        level = std::max(level, pos[static_cast<std::size_t>(prof[i])][static_cast<std::size_t>(t[i])]);
      }
      if (level < 0) {
        // Nullary relation: must agree outright.
        if (target.table(static_cast<int>(r))[0] != tab[off]) return;
        continue;
      }
      rel_checks[static_cast<std::size_t>(level)].push_back(RelCheck{static_cast<int>(r), std::move(t), tab[off]});
    }
  }
  for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
    const auto& fs = lang.functions().at(lang.function_names()[f]);
    const auto& tab = source.function_table(static_cast<int>(f));
    for (std::size_t off = 0; off < tab.size(); ++off) {
      if (tab[off] == kUndefined) continue;
      Tuple t = source.decode(fs.args, off);
      int level = pos[static_cast<std::size_t>(fs.result)][static_cast<std::size_t>(tab[off])];
      for (std::size_t i = 0; i < fs.args.size(); ++i) {
        level = std::max(level, pos[static_cast<std::size_t>(fs.args[i])][static_cast<std::size_t>(t[i])]);
      }
      fun_checks[static_cast<std::size_t>(level)].push_back(FunCheck{static_cast<int>(f), std::move(t), tab[off]});
    }
  }

  auto sdeg = degrees(source);
  auto tdeg = degrees(target);
  auto degree_ok = [&](Elem e, int v) {
    const auto& a = sdeg[static_cast<std::size_t>(e.sort)][static_cast<std::size_t>(e.index)];
    const auto& b = tdeg[static_cast<std::size_t>(e.sort)][static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (kind == MapKind::Isomorphism ? a[i] != b[i] : a[i] > b[i]) return false;
    }
    return true;
  };

  auto image = [&](const std::vector<SortId>& prof, const Tuple& t) {
    Tuple u(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) u[i] = map.map[static_cast<std::size_t>(prof[i])][static_cast<std::size_t>(t[i])];
    return u;
  };
  auto level_ok = [&](std::size_t k) {
    for (const auto& c : rel_checks[k]) {
      const auto& prof = lang.relations().at(lang.relation_names()[static_cast<std::size_t>(c.rel)]).profile;
      if (target.cell(c.rel, image(prof, c.tuple)) != c.value) return false;
    }
    for (const auto& c : fun_checks[k]) {
      const auto& fs = lang.functions().at(lang.function_names()[static_cast<std::size_t>(c.fn)]);
      if (target.value(c.fn, image(fs.args, c.args)) !=
          map.map[static_cast<std::size_t>(fs.result)][static_cast<std::size_t>(c.value)]) {
        return false;
      }
    }
    return true;
  };

  bool stop = false;
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    if (stop) return;
    if (k == order.size()) {
      if (!visit(map)) stop = true;
      return;
    }
    Elem e = order[k];
    int& slot = map.map[static_cast<std::size_t>(e.sort)][static_cast<std::size_t>(e.index)];
    if (slot >= 0) {
      if (degree_ok(e, slot) && level_ok(k)) go(k + 1);
      return;
    }
    auto& u = used[static_cast<std::size_t>(e.sort)];
    for (int v = 0; v < target.size(e.sort) && !stop; ++v) {
      if (u[static_cast<std::size_t>(v)] || !degree_ok(e, v)) continue;
      slot = v;
      u[static_cast<std::size_t>(v)] = 1;
      if (level_ok(k)) go(k + 1);
      u[static_cast<std::size_t>(v)] = 0;
    }
    slot = -1;
  };
  go(0);
}

std::vector<Embedding> find_embeddings(const FiniteStructure& source, const FiniteStructure& target,
                                       const std::optional<Embedding>& partial) {
  std::vector<Embedding> out;
  for_each_embedding(source, target, partial, MapKind::Embedding, [&](const Embedding& e) {
    out.push_back(e);
    return true;
  });
  return out;
}

std::optional<Embedding> first_embedding(const FiniteStructure& source, const FiniteStructure& target,
                                         const std::optional<Embedding>& partial) {
  std::optional<Embedding> out;
  for_each_embedding(source, target, partial, MapKind::Embedding, [&](const Embedding& e) {
    out = e;
    return false;
  });
  return out;
}

std::optional<Embedding> find_isomorphism(const FiniteStructure& a, const FiniteStructure& b,
                                          const std::optional<Embedding>& partial) {
  std::optional<Embedding> out;
  for_each_embedding(a, b, partial, MapKind::Isomorphism, [&](const Embedding& e) {
    out = e;
    return false;
  });
  return out;
}

bool is_embedding(const FiniteStructure& source, const FiniteStructure& target, const Embedding& e) {
  for (int s = 0; s < source.language().sort_count(); ++s) {
    if (e.map.size() != static_cast<std::size_t>(source.language().sort_count()) ||
        e.map[static_cast<std::size_t>(s)].size() != static_cast<std::size_t>(source.size(s))) {
      return false;
    }
    for (int v : e.map[static_cast<std::size_t>(s)]) {
      if (v < 0 || v >= target.size(s)) return false;
    }
  }
  bool found = false;
  for_each_embedding(source, target, e, MapKind::Embedding, [&](const Embedding&) {
    found = true;
    return false;
  });
  return found;
}

AutomorphismSet automorphisms(const FiniteStructure& m, const ElemSet& fixed) {
  AutomorphismSet out;
  out.fixed = fixed;
  Embedding partial = empty_partial(m.sizes());
  for (const Elem& e : fixed) partial.map[static_cast<std::size_t>(e.sort)][static_cast<std::size_t>(e.index)] = e.index;
  const std::size_t budget = enumeration_budget();
  for_each_embedding(m, m, partial, MapKind::Isomorphism, [&](const Embedding& e) {
    if (out.list.size() >= budget) throw BudgetError("automorphism group exceeds the enumeration budget");
    out.list.push_back(e);
    return true;
  });
  // Lexicographic order puts the identity first.
  return out;
}

std::vector<std::vector<std::vector<Elem>>> AutomorphismSet::orbits(const FiniteStructure& m, int arity) const {
  std::vector<Elem> elems = m.elements();
  std::set<std::vector<Elem>> seen;
  std::vector<std::vector<std::vector<Elem>>> out;
  std::vector<Elem> t(static_cast<std::size_t>(arity));
  std::function<void(int)> gen = [&](int k) {
    if (k == arity) {
      if (seen.count(t)) return;
      std::set<std::vector<Elem>> orbit;
      for (const auto& g : list) {
        std::vector<Elem> u(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) u[i] = g.apply(t[i]);
        orbit.insert(std::move(u));
      }
      seen.insert(orbit.begin(), orbit.end());
      out.emplace_back(orbit.begin(), orbit.end());
      return;
    }
    for (const Elem& e : elems) {
      t[static_cast<std::size_t>(k)] = e;
      gen(k + 1);
    }
  };
  gen(0);
  return out;
}

ElemSet generated_closure(const FiniteStructure& m, const ElemSet& seed) {
  const Language& lang = m.language();
  ElemSet cur = seed;
  for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
    int v = m.constant(static_cast<int>(c));
    if (v != kUndefined) cur.insert(Elem{lang.constants().at(lang.constant_names()[c]), v});
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
      const auto& fs = lang.functions().at(lang.function_names()[f]);
      const auto& tab = m.function_table(static_cast<int>(f));
      for (std::size_t off = 0; off < tab.size(); ++off) {
        if (tab[off] == kUndefined) continue;
        Tuple t = m.decode(fs.args, off);
        bool inside = true;
        for (std::size_t i = 0; i < t.size() && inside; ++i) inside = cur.count(Elem{fs.args[i], t[i]}) > 0;
        if (inside && cur.insert(Elem{fs.result, tab[off]}).second) changed = true;
      }
    }
  }
  return cur;
}

Generated generated_substructure(const FiniteStructure& m, const ElemSet& seed) {
  ElemSet keep = generated_closure(m, seed);
  Generated g{m.induced(keep), empty_partial(std::vector<int>(m.sizes().size(), 0))};
  for (const Elem& e : keep) g.inclusion.map[static_cast<std::size_t>(e.sort)].push_back(e.index);
  return g;
}

namespace {

// Streams the code of `m` relabeled by q (new -> old per sort) and compares it
// with `best`; returns -1/0/1 and fills `out` when not worse.
struct CodeWriter {
  const FiniteStructure& m;
  const std::vector<std::vector<int>>& q;
  std::vector<std::vector<int>> p;  // old -> new

  void prepare() {
    p.assign(q.size(), {});
    for (std::size_t s = 0; s < q.size(); ++s) {
      p[s].assign(q[s].size(), 0);
      for (std::size_t i = 0; i < q[s].size(); ++i) p[s][static_cast<std::size_t>(q[s][i])] = static_cast<int>(i);
    }
  }

  // Writes code entries one by one; emit returns false to abandon.
  template <class Emit>
  void run(Emit&& emit) const {
    const Language& lang = m.language();
    for (int s = 0; s < lang.sort_count(); ++s) {
      if (!emit(m.size(s))) return;
    }
    for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
      const auto& prof = lang.relations().at(lang.relation_names()[r]).profile;
      std::size_t n = m.tuple_space(prof);
      Tuple old(prof.size());
      for (std::size_t off = 0; off < n; ++off) {
        Tuple t = m.decode(prof, off);
        for (std::size_t i = 0; i < t.size(); ++i) old[i] = q[static_cast<std::size_t>(prof[i])][static_cast<std::size_t>(t[i])];
        if (!emit(m.cell(static_cast<int>(r), old))) return;
      }
    }
    for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
      const auto& fs = lang.functions().at(lang.function_names()[f]);
      std::size_t n = m.tuple_space(fs.args);
      Tuple old(fs.args.size());
      for (std::size_t off = 0; off < n; ++off) {
        Tuple t = m.decode(fs.args, off);
        for (std::size_t i = 0; i < t.size(); ++i) old[i] = q[static_cast<std::size_t>(fs.args[i])][static_cast<std::size_t>(t[i])];
        int v = m.value(static_cast<int>(f), old);
        if (!emit(v == kUndefined ? -1 : p[static_cast<std::size_t>(fs.result)][static_cast<std::size_t>(v)])) return;
      }
    }
    for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
      int v = m.constant(static_cast<int>(c));
      SortId s = lang.constants().at(lang.constant_names()[c]);
      if (!emit(v == kUndefined ? -1 : p[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)])) return;
    }
  }
};

std::vector<std::vector<int>> best_relabeling(const FiniteStructure& m, const std::vector<int>& pinned,
                                              std::vector<int>& best) {
  const int sorts = m.language().sort_count();
  std::vector<std::vector<int>> q(static_cast<std::size_t>(sorts));
  for (int s = 0; s < sorts; ++s) {
    q[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(m.size(s)));
    std::iota(q[static_cast<std::size_t>(s)].begin(), q[static_cast<std::size_t>(s)].end(), 0);
  }
  auto pin = [&](int s) {
    return static_cast<std::size_t>(s) < pinned.size() ? pinned[static_cast<std::size_t>(s)] : 0;
  };
  std::vector<std::vector<int>> best_q;
  bool have = false;
  std::vector<int> cur;
  auto consider = [&]() {
    CodeWriter w{m, q, {}};
    w.prepare();
    cur.clear();
    int cmp = have ? 0 : -1;
    bool abandoned = false;
    std::size_t i = 0;
    w.run([&](int v) {
      if (cmp == 0) {
        if (v < best[i]) {
          cmp = -1;
        } else if (v > best[i]) {
          abandoned = true;
          return false;
        }
      }
      cur.push_back(v);
      ++i;
      return true;
    });
    if (!abandoned && cmp < 0) {
      best = cur;
      best_q = q;
      have = true;
    }
  };
  std::function<void(int)> rec = [&](int s) {
    if (s == sorts) {
      consider();
      return;
    }
    auto& qs = q[static_cast<std::size_t>(s)];
    auto first = qs.begin() + std::min<std::ptrdiff_t>(pin(s), static_cast<std::ptrdiff_t>(qs.size()));
    std::sort(first, qs.end());
    do {
      rec(s + 1);
    } while (std::next_permutation(first, qs.end()));
  };
  rec(0);
  return best_q;
}

}  // namespace

std::vector<int> canonical_code(const FiniteStructure& m, const std::vector<int>& pinned) {
  std::vector<int> best;
  best_relabeling(m, pinned, best);
  return best;
}

FiniteStructure relabel(const FiniteStructure& m, const Embedding& old_to_new) {
  const Language& lang = m.language();
  const auto& p = old_to_new.map;
  FiniteStructure out(m.language_ptr(), m.sizes());
  auto image = [&](const std::vector<SortId>& prof, const Tuple& t) {
    Tuple u(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) u[i] = p[static_cast<std::size_t>(prof[i])][static_cast<std::size_t>(t[i])];
    return u;
  };
  for (const Elem& e : m.elements()) out.set_name(old_to_new.apply(e), m.name(e));
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    const auto& prof = lang.relations().at(lang.relation_names()[r]).profile;
    for (std::size_t off = 0; off < m.tuple_space(prof); ++off) {
      Tuple t = m.decode(prof, off);
      out.set_cell(static_cast<int>(r), image(prof, t), m.table(static_cast<int>(r))[off]);
    }
  }
  for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
    const auto& fs = lang.functions().at(lang.function_names()[f]);
    for (std::size_t off = 0; off < m.tuple_space(fs.args); ++off) {
      Tuple t = m.decode(fs.args, off);
      int v = m.function_table(static_cast<int>(f))[off];
      out.set_value(static_cast<int>(f), image(fs.args, t),
                    v == kUndefined ? kUndefined : p[static_cast<std::size_t>(fs.result)][static_cast<std::size_t>(v)]);
    }
  }
  for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
    int v = m.constant(static_cast<int>(c));
    SortId s = lang.constants().at(lang.constant_names()[c]);
    out.set_constant(static_cast<int>(c), v == kUndefined ? kUndefined : p[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)]);
  }
  return out;
}

FiniteStructure canonical_form(const FiniteStructure& m, const std::vector<int>& pinned) {
  std::vector<int> best;
  auto q = best_relabeling(m, pinned, best);
  Embedding p;
  for (const auto& qs : q) {
    std::vector<int> inv(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) inv[static_cast<std::size_t>(qs[i])] = static_cast<int>(i);
    p.map.push_back(std::move(inv));
  }
  return relabel(m, p);
}

}  // namespace fusionlab
