#include "fusionlab/independence.hpp"

#include <algorithm>
#include <map>

#include "fusionlab/closures.hpp"
#include "fusionlab/error.hpp"
#include "fusionlab/fraisse.hpp"
#include "fusionlab/search.hpp"

namespace fusionlab {

std::string indep_name(IndepKind k) {
  switch (k) {
    case IndepKind::FreeAmalgam:
      return "free-amalgam";
    case IndepKind::Edge:
      return "edge";
    case IndepKind::NonEdge:
      return "non-edge";
  }
  return "?";
}

IndepKind parse_indep(const std::string& name) {
  for (auto k : {IndepKind::FreeAmalgam, IndepKind::Edge, IndepKind::NonEdge}) {
    if (indep_name(k) == name) return k;
  }
  throw Error("unknown independence relation '" + name + "' (free-amalgam, edge, non-edge)");
}

std::string axiom_name(IndepAxiom a) {
  switch (a) {
    case IndepAxiom::Invariance:
      return "invariance";
    case IndepAxiom::AlgebraicIndependence:
      return "algebraic-independence";
    case IndepAxiom::Stationarity:
      return "stationarity";
    case IndepAxiom::FullExistence:
      return "full-existence";
  }
  return "?";
}

IndepAxiom parse_axiom(const std::string& name) {
  for (auto a : {IndepAxiom::Invariance, IndepAxiom::AlgebraicIndependence, IndepAxiom::Stationarity,
                 IndepAxiom::FullExistence}) {
    if (axiom_name(a) == name) return a;
  }
  throw Error("unknown independence axiom '" + name + "'");
}

bool indep_eval(IndepKind k, const FiniteStructure& host, const ElemSet& a, const ElemSet& b, const ElemSet& c) {
  for (const Elem& e : a) {
    if (b.count(e) && !c.count(e)) return false;
  }
  auto a_only = [&](const Elem& e) { return a.count(e) && !c.count(e); };
  auto b_only = [&](const Elem& e) { return b.count(e) && !c.count(e); };
  const Language& lang = host.language();
  if (k == IndepKind::FreeAmalgam) {
    // only tuples inside ABC matter: ABC must be the free amalgam of AC, BC
    for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
      const auto& prof = host.relation_profile(static_cast<int>(r));
      for (const auto& t : host.tuples(static_cast<int>(r))) {
        bool left = false, right = false, inside = true;
        for (std::size_t i = 0; i < t.size(); ++i) {
          Elem e{prof[i], t[i]};
          left = left || a_only(e);
          right = right || b_only(e);
          inside = inside && (a.count(e) || b.count(e) || c.count(e));
        }
        if (inside && left && right) return false;
      }
    }
    return true;
  }
  if (!lang.relations().count("E") || lang.relations().at("E").profile.size() != 2) {
    throw Error("edge independence needs a binary relation E");
  }
  const bool want = k == IndepKind::Edge;
  for (const Elem& x : a) {
    if (!a_only(x)) continue;
    for (const Elem& y : b) {
      if (b_only(y) && host.holds("E", {x.index, y.index}) != want) return false;
    }
  }
  return true;
}

namespace {

struct Labeled {
  ElemSet a, b, c;
};

Labeled labels(const std::vector<Elem>& els, std::size_t mask) {
  Labeled l;
  for (std::size_t i = 0; i < els.size(); ++i) {
    auto bits = (mask >> (3 * i)) & 7;
    if (bits & 1) l.a.insert(els[i]);
    if (bits & 2) l.b.insert(els[i]);
    if (bits & 4) l.c.insert(els[i]);
  }
  return l;
}

ElemSet unite(const ElemSet& x, const ElemSet& y) {
  ElemSet out = x;
  out.insert(y.begin(), y.end());
  return out;
}

ElemSet intersect(const ElemSet& x, const ElemSet& y) {
  ElemSet out;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::inserter(out, out.end()));
  return out;
}

std::vector<std::uint8_t> table_key(const FiniteStructure& m) {
  std::vector<std::uint8_t> key;
  for (std::size_t r = 0; r < m.language().relation_names().size(); ++r) {
    const auto& t = m.table(static_cast<int>(r));
    key.insert(key.end(), t.begin(), t.end());
  }
  return key;
}

FiniteStructure blank(const ClassSpec& spec, std::vector<int> sizes) {
  FiniteStructure m(spec.language_ptr(), std::move(sizes));
  for (std::size_t r = 0; r < spec.language().relation_names().size(); ++r) {
    auto& t = m.table(static_cast<int>(r));
    std::fill(t.begin(), t.end(), std::uint8_t{kUnknownCell});
  }
  return m;
}

struct AclCache {
  const ClassSpec& spec;
  const FiniteStructure& host;
  std::map<ElemSet, ElemSet> memo;
  const ElemSet& operator()(const ElemSet& x) {
    auto it = memo.find(x);
    if (it == memo.end()) it = memo.emplace(x, acl_by_duplication(spec, host, x, host.total_size() + 1)).first;
    return it->second;
  }
};

std::size_t config_count(const FiniteStructure& m) { return std::size_t{1} << (3 * m.total_size()); }

IndepReport invariance(IndepKind k, const ClassSpec& spec, int limit, unsigned jobs) {
  IndepReport rep;
  auto reps = enumerate_up_to(spec, limit);
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t mask = 0; mask < config_count(reps[i]); ++mask) work.emplace_back(i, mask);
  }
  std::vector<AutomorphismSet> groups;
  for (const auto& m : reps) groups.push_back(automorphisms(m));
  auto bad = parallel_find_first(work.size(), jobs, [&](std::size_t w) {
    const auto& m = reps[work[w].first];
    Labeled l = labels(m.elements(), work[w].second);
    bool v = indep_eval(k, m, l.a, l.b, l.c);
    for (const auto& g : groups[work[w].first].list) {
      if (indep_eval(k, m, g.image(l.a), g.image(l.b), g.image(l.c)) != v) return true;
    }
    return false;
  });
  rep.configs_checked = bad ? *bad + 1 : work.size();
  if (bad) {
    const auto& m = reps[work[*bad].first];
    Labeled l = labels(m.elements(), work[*bad].second);
    rep.witness = TripleConfig{m, l.a, l.b, l.c};
    rep.detail = "value changes under an automorphism of the host";
  }
  rep.holds = !bad;
  return rep;
}

IndepReport algebraic_independence(IndepKind k, const ClassSpec& spec, int limit) {
  IndepReport rep;
  rep.holds = true;
  for (const auto& m : enumerate_up_to(spec, limit)) {
    AclCache acl{spec, m, {}};
    auto els = m.elements();
    for (std::size_t mask = 0; mask < config_count(m); ++mask) {
      Labeled l = labels(els, mask);
      ++rep.configs_checked;
      if (!indep_eval(k, m, l.a, l.b, l.c)) continue;
      ElemSet ac = acl(unite(l.a, l.c)), bc = acl(unite(l.b, l.c));
      if (intersect(ac, bc) != acl(l.c)) {
        rep.holds = false;
        rep.witness = TripleConfig{m, l.a, l.b, l.c};
        rep.detail = "acl(AC) and acl(BC) meet outside acl(C)";
        return rep;
      }
    }
  }
  return rep;
}

IndepReport stationarity(IndepKind k, const ClassSpec& spec, int limit) {
  if (spec.language().sort_count() != 1) throw Error("stationarity check needs a one-sorted class");
  IndepReport rep;
  rep.holds = true;
  for (int n = 0; n <= limit && rep.holds; ++n) {
    for (int kc = 0; kc <= n && rep.holds; ++kc) {
      for (int ka = 1; kc + ka < n && rep.holds; ++ka) {
        int kb = n - kc - ka;
        ElemSet a, b, c;
        for (int i = 0; i < kc; ++i) c.insert(Elem{0, i});
        for (int i = kc; i < kc + ka; ++i) a.insert(Elem{0, i});
        for (int i = kc + ka; i < n; ++i) b.insert(Elem{0, i});
        ElemSet ac = unite(a, c), bc = unite(b, c);
        std::map<std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>, FiniteStructure> seen;
        (void)kb;
        for_each_completion(spec, blank(spec, {n}), [&](const FiniteStructure& m) {
          ++rep.configs_checked;
          if (!indep_eval(k, m, a, b, c)) return true;
          AclCache acl{spec, m, {}};
          if (acl(c) != c) return true;
          auto key = std::make_pair(table_key(m.induced(ac)), table_key(m.induced(bc)));
          auto [it, fresh] = seen.try_emplace(key, m);
          if (fresh || it->second == m) return true;
          rep.holds = false;
          rep.witness = TripleConfig{it->second, a, b, c};
          rep.second = TripleConfig{m, a, b, c};
          rep.detail = "two independent extensions with the same type of A over C differ over BC";
          return false;
        });
      }
    }
  }
  return rep;
}

IndepReport full_existence(IndepKind k, const ClassSpec& spec, const ClassSpec& expansion, int limit, unsigned jobs) {
  if (spec.language().sort_count() != 1) throw Error("full-existence check needs a one-sorted class");
  auto pre = check_fraisse_expansion(spec, expansion, limit);
  if (!pre.verified) throw Error("expansion " + expansion.name() + " is not a verified Fraisse expansion: " + pre.failure);
  IndepReport rep;
  auto reps = enumerate_up_to(expansion, limit);
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t mask = 0; mask < config_count(reps[i]); ++mask) work.emplace_back(i, mask);
  }
  std::vector<std::map<ElemSet, bool>> closed(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (const auto& s : subset_sample(reps[i])) {
      closed[i][s] = acl_by_duplication(expansion, reps[i], s, reps[i].total_size() + 1) == s;
    }
  }
  const Language& base_lang = spec.language();
  const int e_rel = k == IndepKind::FreeAmalgam ? -1 : expansion.language().relation_index("E");

  struct Attempt {
    FiniteStructure partial;
    ElemSet a_star;
    std::vector<Elem> fresh;
  };
  auto make_attempt = [&](const FiniteStructure& m, const Labeled& l) {
    Attempt at{m, {}, {}};
    std::map<Elem, Elem> star;
    for (const Elem& x : l.a) {
      if (l.c.count(x)) {
        at.a_star.insert(x);
        continue;
      }
      Elem y = at.partial.add_element(x.sort);
      star[x] = y;
      at.a_star.insert(y);
      at.fresh.push_back(y);
    }
    // copy the expansion type of A over C onto A*
    const Language& el = m.language();
    for (std::size_t r = 0; r < el.relation_names().size(); ++r) {
      const auto& prof = m.relation_profile(static_cast<int>(r));
      for (const auto& t : m.all_tuples(prof)) {
        bool inside = true, touches = false;
        Tuple u = t;
        for (std::size_t i = 0; i < t.size() && inside; ++i) {
          Elem e{prof[i], t[i]};
          if (star.count(e)) {
            touches = true;
            u[i] = star[e].index;
          } else {
            inside = l.c.count(e) > 0;
          }
        }
        if (inside && touches) at.partial.set_cell(static_cast<int>(r), u, m.cell(static_cast<int>(r), t));
      }
    }
    // cells the independence relation decides
    for (const Elem& y : at.fresh) {
      for (const Elem& bb : l.b) {
        if (l.c.count(bb)) continue;
        if (e_rel >= 0) {
          auto v = static_cast<std::uint8_t>(k == IndepKind::Edge ? kTrueCell : kFalseCell);
          at.partial.set_cell(e_rel, {y.index, bb.index}, v);
          at.partial.set_cell(e_rel, {bb.index, y.index}, v);
        }
      }
    }
    if (k == IndepKind::FreeAmalgam) {
      for (std::size_t r = 0; r < el.relation_names().size(); ++r) {
        if (!base_lang.relations().count(el.relation_names()[r])) continue;
        const auto& prof = at.partial.relation_profile(static_cast<int>(r));
        for (const auto& t : at.partial.all_tuples(prof)) {
          bool left = false, right = false;
          for (std::size_t i = 0; i < t.size(); ++i) {
            Elem e{prof[i], t[i]};
            left = left || std::find(at.fresh.begin(), at.fresh.end(), e) != at.fresh.end();
            right = right || (e.index < m.size(e.sort) && l.b.count(e) && !l.c.count(e));
          }
          if (left && right) at.partial.set_cell(static_cast<int>(r), t, kFalseCell);
        }
      }
    }
    return at;
  };
  auto fails = [&](std::size_t w) {
    const auto& m = reps[work[w].first];
    Labeled l = labels(m.elements(), work[w].second);
    bool has_new = false;
    for (const Elem& x : l.a) has_new = has_new || !l.c.count(x);
    if (!has_new || !closed[work[w].first].at(l.c)) return false;
    Attempt at = make_attempt(m, l);
    CompletionOptions opts;
    opts.accept = [&](const FiniteStructure& n) { return indep_eval(k, n.reduct(base_lang), at.a_star, l.b, l.c); };
    return !complete_in_class(expansion, at.partial, opts).has_value();
  };
  auto bad = parallel_find_first(work.size(), jobs, fails);
  rep.configs_checked = bad ? *bad + 1 : work.size();
  rep.holds = !bad;
  if (bad) {
    const auto& m = reps[work[*bad].first];
    Labeled l = labels(m.elements(), work[*bad].second);
    Attempt at = make_attempt(m, l);
    rep.witness = TripleConfig{m, l.a, l.b, l.c};
    rep.attempt = at.partial;
    rep.a_star = at.fresh;
    rep.detail = "no A* with the same type over C is independent from B in any extension";
  }
  return rep;
}

}  // namespace

IndepReport check_indep_axiom(IndepKind k, const ClassSpec& spec, IndepAxiom axiom, const ClassSpec* expansion,
                              int size_limit, unsigned jobs) {
  if (size_limit < 1) throw Error("size limit must be positive");
  IndepReport rep;
  switch (axiom) {
    case IndepAxiom::Invariance:
      rep = invariance(k, spec, size_limit, jobs);
      break;
    case IndepAxiom::AlgebraicIndependence:
      rep = algebraic_independence(k, spec, size_limit);
      break;
    case IndepAxiom::Stationarity:
      rep = stationarity(k, spec, size_limit);
      break;
    case IndepAxiom::FullExistence:
      if (!expansion) throw Error("full existence needs an expansion class");
      rep = full_existence(k, spec, *expansion, size_limit, jobs);
      break;
  }
  rep.axiom = axiom;
  rep.size_limit = size_limit;
  rep.header = "quantifier-free restatement (exact for classes with quantifier elimination); acl read by duplication";
  return rep;
}

}  // namespace fusionlab
