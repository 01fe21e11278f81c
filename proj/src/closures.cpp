#include "fusionlab/closures.hpp"

#include <algorithm>
#include <deque>
#include <random>

#include "fusionlab/search.hpp"

namespace fusionlab {

ClosureOperator identity_closure() {
  return ClosureOperator{"identity", [](const FiniteStructure&, const ElemSet& s) { return s; }, "no closure"};
}

ClosureOperator function_closure(std::vector<std::string> functions) {
  std::string name = "functions";
  for (const auto& f : functions) name += ":" + f;
  auto apply = [functions](const FiniteStructure& m, const ElemSet& seed) {
    const Language& lang = m.language();
    std::vector<int> fns;
    if (functions.empty()) {
      for (std::size_t f = 0; f < lang.function_names().size(); ++f) fns.push_back(static_cast<int>(f));
    } else {
      for (const auto& f : functions) fns.push_back(lang.function_index(f));
    }
    ElemSet out = seed;
    if (functions.empty()) {
      for (std::size_t c = 0; c < lang.constant_names().size(); ++c) {
        int v = m.constant(static_cast<int>(c));
        if (v != kUndefined) out.insert(Elem{lang.constants().at(lang.constant_names()[c]), v});
      }
    }
    for (bool grew = true; grew;) {
      grew = false;
      for (int f : fns) {
        const auto& prof = m.function_profile(f);
        SortId result = lang.functions().at(lang.function_names()[static_cast<std::size_t>(f)]).result;
        for (const auto& t : m.all_tuples(prof)) {
          bool inside = true;
          for (std::size_t i = 0; i < t.size() && inside; ++i) inside = out.count(Elem{prof[i], t[i]}) > 0;
          if (!inside) continue;
          int v = m.value(f, t);
          if (v != kUndefined && out.insert(Elem{result, v}).second) grew = true;
        }
      }
    }
    return out;
  };
  return ClosureOperator{name, apply, "closure under function symbols"};
}

ClosureOperator partner_closure(const std::string& rel) {
  auto apply = [rel](const FiniteStructure& m, const ElemSet& seed) {
    int r = m.language().relation_index(rel);
    const auto& prof = m.relation_profile(r);
    if (prof.size() != 2) throw Error("partner closure needs a binary relation");
    ElemSet out = seed;
    std::deque<Elem> todo(seed.begin(), seed.end());
    while (!todo.empty()) {
      Elem a = todo.front();
      todo.pop_front();
      if (a.sort != prof[0]) continue;
      for (int b = 0; b < m.size(prof[1]); ++b) {
        if (m.cell(r, {a.index, b}) == kTrueCell && out.insert(Elem{prof[1], b}).second) todo.push_back(Elem{prof[1], b});
      }
    }
    return out;
  };
  return ClosureOperator{"partner:" + rel, apply, "reachability along " + rel};
}

ClosureOperator bcl_operator(std::vector<BoundedFormula> library) {
  auto apply = [library](const FiniteStructure& m, const ElemSet& seed) { return bcl_closure(m, seed, library); };
  return ClosureOperator{"bcl", apply, "bounded existential closure"};
}

std::vector<std::string> closure_law_defects(const ClosureOperator& op, const FiniteStructure& m,
                                             const std::vector<ElemSet>& sample) {
  std::vector<std::string> out;
  auto show = [&](const ElemSet& s) {
    std::string r = "{";
    for (const Elem& e : s) r += (r.size() > 1 ? "," : "") + m.name(e);
    return r + "}";
  };
  std::vector<ElemSet> images;
  for (const auto& s : sample) {
    ElemSet c = op.apply(m, s);
    if (!std::includes(c.begin(), c.end(), s.begin(), s.end())) out.push_back("not extensive at " + show(s));
    if (op.apply(m, c) != c) out.push_back("not idempotent at " + show(s));
    images.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = 0; j < sample.size(); ++j) {
      if (i == j || !std::includes(sample[j].begin(), sample[j].end(), sample[i].begin(), sample[i].end())) continue;
      if (!std::includes(images[j].begin(), images[j].end(), images[i].begin(), images[i].end())) {
        out.push_back("not monotone at " + show(sample[i]) + " within " + show(sample[j]));
      }
    }
  }
  return out;
}

std::vector<ElemSet> subset_sample(const FiniteStructure& m, std::size_t count, std::uint64_t seed) {
  std::vector<Elem> all = m.elements();
  std::vector<ElemSet> out;
  if (all.size() <= 10) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << all.size()); ++mask) {
      ElemSet s;
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (mask >> i & 1) s.insert(all[i]);
      }
      out.push_back(std::move(s));
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    ElemSet s;
    for (const Elem& e : all) {
      if (rng() & 1) s.insert(e);
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

ElemSet checked_apply(const ClosureOperator& op, const FiniteStructure& m, const ElemSet& s) {
  ElemSet c = op.apply(m, s);
  if (!std::includes(c.begin(), c.end(), s.begin(), s.end())) throw ClosureDefect(op.name, "extensive");
  for (const Elem& e : c) {
    if (e.sort < 0 || e.sort >= m.language().sort_count() || e.index < 0 || e.index >= m.size(e.sort)) {
      throw ClosureDefect(op.name, "inside the carrier");
    }
  }
  return c;
}

}  // namespace

ElemSet ccl_fixpoint(const FiniteStructure& m, const ElemSet& seed, const std::vector<ClosureOperator>& ops,
                     FixpointStrategy strategy) {
  ElemSet cur = seed;
  if (strategy == FixpointStrategy::RoundRobin) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& op : ops) {
        ElemSet next = checked_apply(op, m, cur);
        if (next.size() != cur.size()) {
          cur = std::move(next);
          changed = true;
        }
      }
    }
    return cur;
  }
  std::deque<std::size_t> work;
  std::vector<char> queued(ops.size(), 1);
  for (std::size_t i = 0; i < ops.size(); ++i) work.push_back(i);
  while (!work.empty()) {
    std::size_t i = work.front();
    work.pop_front();
    queued[i] = 0;
    ElemSet next = checked_apply(ops[i], m, cur);
    if (next.size() == cur.size()) continue;
    cur = std::move(next);
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (j != i && !queued[j]) {
        queued[j] = 1;
        work.push_back(j);
      }
    }
  }
  return cur;
}

ElemSet bcl_closure(const FiniteStructure& m, const ElemSet& seed, const std::vector<BoundedFormula>& library) {
  for (const auto& bf : library) {
    if (!bf.record.declared && bf.record.verified_size <= 0) {
      throw Error("library formula " + to_string(bf.formula, m.language()) + " has no verified bound");
    }
  }
  std::vector<std::vector<Variable>> vars;
  std::vector<CompiledFormula> compiled;
  for (const auto& bf : library) {
    std::vector<Variable> v = bf.x;
    v.insert(v.end(), bf.y.begin(), bf.y.end());
    compiled.emplace_back(bf.formula, m.language(), v);
    vars.push_back(std::move(v));
  }
  ElemSet cur = generated_closure(m, seed);
  for (bool grew = true; grew;) {
    grew = false;
    ElemSet next = cur;
    for (std::size_t k = 0; k < library.size(); ++k) {
      const auto& bf = library[k];
      std::vector<int> vals(vars[k].size(), 0);
      // odometer over x from cur, y from the whole carrier
      std::vector<std::vector<int>> choices(vars[k].size());
      bool empty = false;
      for (std::size_t i = 0; i < vars[k].size(); ++i) {
        SortId s = vars[k][i].sort;
        for (int e = 0; e < m.size(s); ++e) {
          if (i >= bf.x.size() || cur.count(Elem{s, e})) choices[i].push_back(e);
        }
        empty = empty || choices[i].empty();
      }
      if (empty) continue;
      std::vector<std::size_t> pos(vars[k].size(), 0);
      for (;;) {
        for (std::size_t i = 0; i < pos.size(); ++i) vals[i] = choices[i][pos[i]];
        if (compiled[k](m, vals)) {
          for (std::size_t i = bf.x.size(); i < vals.size(); ++i) next.insert(Elem{vars[k][i].sort, vals[i]});
        }
        std::size_t i = pos.size();
        while (i > 0 && ++pos[i - 1] == choices[i - 1].size()) pos[--i] = 0;
        if (i == 0) break;
      }
    }
    next = generated_closure(m, next);
    if (next.size() != cur.size()) {
      cur = std::move(next);
      grew = true;
    }
  }
  return cur;
}

AclVerdict acl_test_duplication(const ClassSpec& spec, const FiniteStructure& host, const ElemSet& base, Elem point,
                                int budget) {
  if (budget <= 0) throw Error("duplication test needs a positive budget");
  if (base.count(point)) throw Error("point lies in the base");
  if (!host.language().function_names().empty()) throw Error("duplication test needs a relational language");
  AclVerdict v;
  v.budget = budget;
  v.duplicate = point;
  const Language& lang = host.language();
  // same cells over base ∪ {p} as point has over base ∪ {point}
  auto same_type = [&](const FiniteStructure& m, Elem p) {
    for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
      const auto& prof = m.relation_profile(static_cast<int>(r));
      for (const auto& t : host.all_tuples(prof)) {
        bool relevant = true, mentions = false;
        Tuple u = t;
        for (std::size_t i = 0; i < t.size() && relevant; ++i) {
          Elem e{prof[i], t[i]};
          if (e == point) {
            mentions = true;
            u[i] = p.index;
          } else {
            relevant = base.count(e) > 0;
          }
        }
        if (relevant && mentions && m.cell(static_cast<int>(r), u) != host.cell(static_cast<int>(r), t)) return false;
      }
    }
    return true;
  };
  for (const Elem& e : host.elements()) {
    if (e.sort != point.sort || e == point || base.count(e)) continue;
    if (same_type(host, e)) {
      v.non_algebraic = true;
      v.witness = host;
      v.duplicate = e;
      v.note = "duplicate already in the host";
      return v;
    }
  }
  if (host.total_size() + 1 > budget) {
    v.note = "budget leaves no room for a new point";
    return v;
  }
  FiniteStructure partial = host;
  Elem p = partial.add_element(point.sort);
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    const auto& prof = partial.relation_profile(static_cast<int>(r));
    for (const auto& t : host.all_tuples(prof)) {
      bool relevant = true, mentions = false;
      Tuple u = t;
      for (std::size_t i = 0; i < t.size() && relevant; ++i) {
        Elem e{prof[i], t[i]};
        if (e == point) {
          mentions = true;
          u[i] = p.index;
        } else {
          relevant = base.count(e) > 0;
        }
      }
      if (relevant && mentions) partial.set_cell(static_cast<int>(r), u, host.cell(static_cast<int>(r), t));
    }
  }
  // a larger extension restricts to one with a single new point, so one
  // new point decides the question for universal classes
  if (auto done = complete_in_class(spec, std::move(partial))) {
    v.non_algebraic = true;
    v.witness = std::move(*done);
    v.duplicate = p;
    v.note = "duplicate in a one-point extension";
  } else {
    v.note = spec.universal() ? "no duplicate in any extension" : "no duplicate in one-point extensions";
  }
  return v;
}

ElemSet acl_by_duplication(const ClassSpec& spec, const FiniteStructure& host, const ElemSet& base, int budget) {
  ElemSet out = base;
  for (const Elem& e : host.elements()) {
    if (!base.count(e) && !acl_test_duplication(spec, host, base, e, budget).non_algebraic) out.insert(e);
  }
  return out;
}

}  // namespace fusionlab
