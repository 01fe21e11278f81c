#include "fusionlab/fraisse.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "fusionlab/error.hpp"
#include "fusionlab/search.hpp"

namespace fusionlab {

std::optional<std::size_t> parallel_find_first(std::size_t n, unsigned jobs,
                                               const std::function<bool(std::size_t)>& pred) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{n};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    try {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || i >= best.load()) return;
        if (pred(i)) {
          std::size_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      best.store(0);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  if (best.load() < n) return best.load();
  return std::nullopt;
}

namespace {

// Builds the partial amalgam for a given placement of B2's elements; false
// on a conflict between the two sides.
bool overlay(const FiniteStructure& src, const Embedding& g, FiniteStructure& c) {
  const Language& lang = src.language();
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    const auto& prof = lang.relations().at(lang.relation_names()[r]).profile;
    const auto& tab = src.table(static_cast<int>(r));
    for (std::size_t off = 0; off < tab.size(); ++off) {
      Tuple t = src.decode(prof, off);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = g.map[static_cast<std::size_t>(prof[i])][static_cast<std::size_t>(t[i])];
      std::uint8_t cur = c.cell(static_cast<int>(r), t);
      if (cur != kUnknownCell && cur != tab[off]) return false;
      c.set_cell(static_cast<int>(r), t, tab[off]);
    }
  }
  for (std::size_t f = 0; f < lang.function_names().size(); ++f) {
    const auto& fs = lang.functions().at(lang.function_names()[f]);
    const auto& tab = src.function_table(static_cast<int>(f));
    for (std::size_t off = 0; off < tab.size(); ++off) {
      Tuple t = src.decode(fs.args, off);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = g.map[static_cast<std::size_t>(fs.args[i])][static_cast<std::size_t>(t[i])];
      int v = tab[off] == kUndefined ? kUndefined : g.map[static_cast<std::size_t>(fs.result)][static_cast<std::size_t>(tab[off])];
      int cur = c.value(static_cast<int>(f), t);
      if (cur != kUndefined && cur != v) return false;
      c.set_value(static_cast<int>(f), t, v);
    }
  }
  for (std::size_t k = 0; k < lang.constant_names().size(); ++k) {
    int v = src.constant(static_cast<int>(k));
    if (v == kUndefined) continue;
    SortId s = lang.constants().at(lang.constant_names()[k]);
    int w = g.map[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
    if (c.constant(static_cast<int>(k)) != kUndefined && c.constant(static_cast<int>(k)) != w) return false;
    c.set_constant(static_cast<int>(k), w);
  }
  return true;
}

FiniteStructure unknown_copy(const std::shared_ptr<const Language>& lang, const std::vector<int>& sizes) {
  FiniteStructure c(lang, sizes);
  for (std::size_t r = 0; r < lang->relation_names().size(); ++r) {
    auto& tab = c.table(static_cast<int>(r));
    std::fill(tab.begin(), tab.end(), std::uint8_t{kUnknownCell});
  }
  return c;
}

// Placement of B2 into the amalgam: per sort, base elements follow f1 ∘ f2⁻¹,
// others are new or identified with a non-base element of B1.
struct Placement {
  Embedding g2;
  std::vector<int> sizes;
};

void for_each_placement(const AmalgamProblem& p, bool disjoint, const std::function<bool(const Placement&)>& visit) {
  const int sorts = p.base.language().sort_count();
  Placement pl;
  pl.g2 = empty_partial(p.b2.sizes());
  std::vector<std::vector<char>> b1_base(static_cast<std::size_t>(sorts));
  for (int s = 0; s < sorts; ++s) {
    auto su = static_cast<std::size_t>(s);
    b1_base[su].assign(static_cast<std::size_t>(p.b1.size(s)), 0);
    for (int a = 0; a < p.base.size(s); ++a) {
      b1_base[su][static_cast<std::size_t>(p.f1.map[su][static_cast<std::size_t>(a)])] = 1;
      pl.g2.map[su][static_cast<std::size_t>(p.f2.map[su][static_cast<std::size_t>(a)])] = p.f1.map[su][static_cast<std::size_t>(a)];
    }
  }
  std::vector<Elem> free;
  for (const Elem& e : p.b2.elements()) {
    if (pl.g2(e) < 0) free.push_back(e);
  }
  std::vector<int> next(p.b1.sizes());
  std::vector<std::vector<char>> used = b1_base;
  bool stop = false;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (stop) return;
    if (i == free.size()) {
      pl.sizes = next;
      if (!visit(pl)) stop = true;
      return;
    }
    Elem e = free[i];
    auto su = static_cast<std::size_t>(e.sort);
    int& slot = pl.g2.map[su][static_cast<std::size_t>(e.index)];
    slot = next[su]++;
    rec(i + 1);
    --next[su];
    if (!disjoint) {
      for (int u = 0; u < p.b1.size(e.sort) && !stop; ++u) {
        if (used[su][static_cast<std::size_t>(u)]) continue;
        used[su][static_cast<std::size_t>(u)] = 1;
        slot = u;
        rec(i + 1);
        used[su][static_cast<std::size_t>(u)] = 0;
      }
    }
    slot = -1;
  };
  rec(0);
}

}  // namespace

std::optional<Amalgam> find_amalgam(const ClassSpec& spec, const AmalgamProblem& p, bool disjoint) {
  std::optional<Amalgam> out;
  Embedding g1 = Embedding::identity(p.b1.sizes());
  for_each_placement(p, disjoint, [&](const Placement& pl) {
    FiniteStructure c = unknown_copy(spec.language_ptr(), pl.sizes);
    if (!overlay(p.b1, g1, c) || !overlay(p.b2, pl.g2, c)) return true;
    if (c.is_complete() || spec.language().function_names().empty()) {
      FiniteStructure plain = c;
      plain.close_unknown_false();
      if (spec.contains(plain)) {
        out = Amalgam{std::move(plain), g1, pl.g2};
        return false;
      }
    }
    auto done = complete_in_class(spec, std::move(c));
    if (!done) return true;
    out = Amalgam{std::move(*done), g1, pl.g2};
    return false;
  });
  return out;
}

Amalgam free_amalgam(const AmalgamProblem& p, const ClassSpec* spec) {
  if (!p.base.language().function_names().empty()) {
    throw Error("free amalgamation is defined for languages without function symbols");
  }
  Amalgam out;
  Embedding g1 = Embedding::identity(p.b1.sizes());
  for_each_placement(p, true, [&](const Placement& pl) {
    FiniteStructure c = unknown_copy(p.b1.language_ptr(), pl.sizes);
    if (!overlay(p.b1, g1, c) || !overlay(p.b2, pl.g2, c)) throw Error("free amalgam sides disagree on the base");
    c.close_unknown_false();
    out = Amalgam{std::move(c), g1, pl.g2};
    return false;
  });
  if (spec) {
    if (auto v = spec->violation(out.structure)) throw ClassViolation("free amalgam leaves the class: " + *v);
  }
  return out;
}

std::string property_name(Property p) {
  switch (p) {
    case Property::JEP:
      return "JEP";
    case Property::AP:
      return "AP";
    case Property::DAP:
      return "dAP";
  }
  return "?";
}

namespace {

struct Extension {
  FiniteStructure b;  // base elements first, in base order
  Embedding f;
};

// Extensions of `a` by class members of size <= limit, up to isomorphism
// over a.
std::vector<Extension> extensions_of(const FiniteStructure& a, const std::vector<FiniteStructure>& reps) {
  std::vector<Extension> out;
  std::set<std::vector<int>> seen;
  const int sorts = a.language().sort_count();
  for (const auto& b : reps) {
    bool fits = true;
    for (int s = 0; s < sorts; ++s) fits = fits && b.size(s) >= a.size(s);
    if (!fits) continue;
    for (const auto& e : find_embeddings(a, b)) {
      Embedding p = empty_partial(b.sizes());
      for (int s = 0; s < sorts; ++s) {
        auto su = static_cast<std::size_t>(s);
        int next = a.size(s);
        for (int i = 0; i < a.size(s); ++i) p.map[su][static_cast<std::size_t>(e.map[su][static_cast<std::size_t>(i)])] = i;
        for (auto& v : p.map[su]) {
          if (v < 0) v = next++;
        }
      }
      FiniteStructure marked = canonical_form(relabel(b, p), a.sizes());
      if (!seen.insert(canonical_code(marked, a.sizes())).second) continue;
      Embedding f = empty_partial(a.sizes());
      for (int s = 0; s < sorts; ++s) {
        for (int i = 0; i < a.size(s); ++i) f.map[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] = i;
      }
      out.push_back(Extension{std::move(marked), std::move(f)});
    }
  }
  return out;
}

}  // namespace

std::vector<PropertyReport> check_class_properties(const ClassSpec& spec, int size_limit,
                                                   const std::set<Property>& properties, unsigned jobs) {
  if (size_limit < 1) throw Error("size limit must be positive");
  std::vector<FiniteStructure> reps = enumerate_up_to(spec, size_limit);
  std::vector<PropertyReport> out;

  // Problem list: (base index or -1 for JEP, extension indices).
  struct Family {
    FiniteStructure base;
    std::vector<Extension> ext;
  };
  std::vector<Family> fams;
  struct Ref {
    std::size_t fam, i, j;
  };
  std::vector<Ref> jep_refs, ap_refs;

  FiniteStructure empty(spec.language_ptr(), std::vector<int>(static_cast<std::size_t>(spec.language().sort_count()), 0));
  if (properties.count(Property::JEP)) {
    Family f{empty, {}};
    for (const auto& r : reps) {
      if (r.total_size() > 0) f.ext.push_back(Extension{r, empty_partial(empty.sizes())});
    }
    fams.push_back(std::move(f));
    for (std::size_t i = 0; i < fams.back().ext.size(); ++i) {
      for (std::size_t j = i; j < fams.back().ext.size(); ++j) jep_refs.push_back(Ref{fams.size() - 1, i, j});
    }
  }
  if (properties.count(Property::AP) || properties.count(Property::DAP)) {
    for (const auto& a : reps) {
      if (a.total_size() == 0) continue;
      Family f{a, extensions_of(a, reps)};
      fams.push_back(std::move(f));
      for (std::size_t i = 0; i < fams.back().ext.size(); ++i) {
        for (std::size_t j = i; j < fams.back().ext.size(); ++j) ap_refs.push_back(Ref{fams.size() - 1, i, j});
      }
    }
  }
  auto problem = [&](const Ref& r) {
    const Family& f = fams[r.fam];
    return AmalgamProblem{f.base, f.ext[r.i].b, f.ext[r.j].b, f.ext[r.i].f, f.ext[r.j].f};
  };
  auto run = [&](Property prop, const std::vector<Ref>& refs, bool disjoint) {
    PropertyReport rep;
    rep.property = prop;
    rep.size_limit = size_limit;
    auto bad = parallel_find_first(refs.size(), jobs, [&](std::size_t k) {
      return !find_amalgam(spec, problem(refs[k]), disjoint).has_value();
    });
    rep.holds = !bad.has_value();
    rep.problems = bad ? *bad + 1 : refs.size();
    if (bad) rep.witness = problem(refs[*bad]);
    out.push_back(std::move(rep));
  };
  if (properties.count(Property::JEP)) run(Property::JEP, jep_refs, true);
  if (properties.count(Property::AP)) run(Property::AP, ap_refs, false);
  if (properties.count(Property::DAP)) run(Property::DAP, ap_refs, true);
  return out;
}

std::vector<FiniteStructure> one_point_extensions(const ClassSpec& spec, const FiniteStructure& base, SortId sort) {
  FiniteStructure partial = base;
  partial.add_element(sort);
  std::vector<FiniteStructure> out;
  for_each_completion(spec, partial, [&](const FiniteStructure& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

namespace {

void require_relational(const Language& lang) {
  if (!lang.function_names().empty() || !lang.constant_names().empty()) {
    throw Error("one-point extension saturation needs a relational language");
  }
}

// The cells of a one-point extension that mention its new point.
struct PointCells {
  std::vector<Elem> subset;
  SortId sort = 0;
  std::vector<std::pair<int, Tuple>> cells;  // tuples over the extension
  std::vector<std::uint8_t> values;
};

PointCells point_cells(const std::vector<Elem>& subset, const FiniteStructure& ext, SortId sort) {
  PointCells pc{subset, sort, {}, {}};
  const Language& lang = ext.language();
  const int point = ext.size(sort) - 1;
  for (std::size_t r = 0; r < lang.relation_names().size(); ++r) {
    const auto& prof = lang.relations().at(lang.relation_names()[r]).profile;
    for (const auto& t : ext.all_tuples(prof)) {
      bool touches = false;
      for (std::size_t i = 0; i < t.size(); ++i) touches = touches || (prof[i] == sort && t[i] == point);
      if (!touches) continue;
      pc.cells.emplace_back(static_cast<int>(r), t);
      pc.values.push_back(ext.cell(static_cast<int>(r), t));
    }
  }
  return pc;
}

// Position of each subset element inside the extension's carriers.
std::vector<std::vector<int>> subset_map(const std::vector<Elem>& subset, int sorts) {
  std::vector<std::vector<int>> map(static_cast<std::size_t>(sorts));
  for (const Elem& e : subset) map[static_cast<std::size_t>(e.sort)].push_back(e.index);
  return map;
}

bool realized_by(const FiniteStructure& model, const PointCells& pc, const std::vector<std::vector<int>>& map,
                 int candidate) {
  const Language& lang = model.language();
  for (std::size_t k = 0; k < pc.cells.size(); ++k) {
    const auto& [r, t] = pc.cells[k];
    const auto& prof = lang.relations().at(lang.relation_names()[static_cast<std::size_t>(r)]).profile;
    Tuple u(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& m = map[static_cast<std::size_t>(prof[i])];
      u[i] = (prof[i] == pc.sort && t[i] == static_cast<int>(m.size())) ? candidate : m[static_cast<std::size_t>(t[i])];
    }
    if (model.cell(r, u) != pc.values[k]) return false;
  }
  return true;
}

bool realized(const FiniteStructure& model, const PointCells& pc) {
  auto map = subset_map(pc.subset, model.language().sort_count());
  for (int c = 0; c < model.size(pc.sort); ++c) {
    if (std::find(pc.subset.begin(), pc.subset.end(), Elem{pc.sort, c}) != pc.subset.end()) continue;
    if (realized_by(model, pc, map, c)) return true;
  }
  return false;
}

std::string describe(const FiniteStructure& model, const PointCells& pc) {
  const Language& lang = model.language();
  auto map = subset_map(pc.subset, lang.sort_count());
  std::string out;
  for (std::size_t k = 0; k < pc.cells.size(); ++k) {
    if (pc.values[k] != kTrueCell) continue;
    const auto& [r, t] = pc.cells[k];
    const auto& prof = lang.relations().at(lang.relation_names()[static_cast<std::size_t>(r)]).profile;
    if (!out.empty()) out += ' ';
    out += lang.relation_names()[static_cast<std::size_t>(r)] + "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += ',';
      const auto& m = map[static_cast<std::size_t>(prof[i])];
      if (prof[i] == pc.sort && t[i] == static_cast<int>(m.size())) {
        out += '*';
      } else {
        out += model.name(Elem{prof[i], m[static_cast<std::size_t>(t[i])]});
      }
    }
    out += ')';
  }
  return out.empty() ? "isolated" : out;
}

void for_each_subset(const std::vector<Elem>& pool, int max_size, const std::function<void(const std::vector<Elem>&)>& visit) {
  std::vector<Elem> cur;
  if (max_size < 0) return;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    visit(cur);
    if (static_cast<int>(cur.size()) == max_size) return;
    for (std::size_t i = from; i < pool.size(); ++i) {
      cur.push_back(pool[i]);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

// Requirements over `subset`: every one-point class extension, each sort.
void push_requirements(const ClassSpec& spec, const FiniteStructure& model, const std::vector<Elem>& subset,
                       std::deque<PointCells>& queue) {
  ElemSet keep(subset.begin(), subset.end());
  FiniteStructure a = model.induced(keep);
  for (SortId s = 0; s < spec.language().sort_count(); ++s) {
    for (const auto& ext : one_point_extensions(spec, a, s)) queue.push_back(point_cells(subset, ext, s));
  }
}

}  // namespace

GenericModel build_generic(const ClassSpec& spec, int budget, int ext_size, std::uint64_t seed, const BuildOptions& opts) {
  if (budget <= 0) throw Error("generic build needs a positive budget");
  if (ext_size < 0) throw Error("extension size must be non-negative");
  require_relational(spec.language());
  if (!opts.skip_precheck) {
    auto rep = check_class_properties(spec, ext_size + 1, {Property::AP}, 1);
    if (!rep.front().holds) {
      throw ClassViolation("class " + spec.name() + " fails AP up to size " + std::to_string(ext_size + 1));
    }
  }
  GenericModel g;
  g.class_name = spec.name();
  g.seed = seed;
  g.structure = FiniteStructure(spec.language_ptr(), std::vector<int>(static_cast<std::size_t>(spec.language().sort_count()), 0));
  std::deque<PointCells> queue;
  push_requirements(spec, g.structure, {}, queue);
  while (!queue.empty()) {
    PointCells req = std::move(queue.front());
    queue.pop_front();
    if (realized(g.structure, req)) continue;
    if (g.structure.total_size() >= budget) {
      ++g.pending;
      continue;
    }
    FiniteStructure partial = g.structure;
    Elem c = partial.add_element(req.sort);
    auto map = subset_map(req.subset, spec.language().sort_count());
    for (std::size_t k = 0; k < req.cells.size(); ++k) {
      const auto& [r, t] = req.cells[k];
      const auto& lang = spec.language();
      const auto& prof = lang.relations().at(lang.relation_names()[static_cast<std::size_t>(r)]).profile;
      Tuple u(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& m = map[static_cast<std::size_t>(prof[i])];
        u[i] = (prof[i] == req.sort && t[i] == static_cast<int>(m.size())) ? c.index : m[static_cast<std::size_t>(t[i])];
      }
      partial.set_cell(r, u, req.values[k]);
    }
    CompletionOptions copt;
    copt.seed = seed ^ (0x9E3779B97F4A7C15ULL * (g.log.size() + 1));
    auto done = complete_in_class(spec, std::move(partial), copt);
    if (!done) {
      ++g.pending;
      continue;
    }
    if (opts.verify_steps) {
      if (auto v = spec.violation(*done)) throw ClassViolation("generic build left the class: " + *v);
    }
    g.log.push_back(BuildStep{req.subset, describe(*done, req), c});
    g.structure = std::move(*done);
    std::vector<Elem> older;
    for (const Elem& e : g.structure.elements()) {
      if (e != c) older.push_back(e);
    }
    for_each_subset(older, ext_size - 1, [&](const std::vector<Elem>& rest) {
      std::vector<Elem> subset = rest;
      subset.push_back(c);
      std::sort(subset.begin(), subset.end());
      push_requirements(spec, g.structure, subset, queue);
    });
  }
  g.quiescent = g.pending == 0;
  return g;
}

ExtensionReport check_extension_axioms(const FiniteStructure& model, const ClassSpec& spec, int ext_size,
                                       std::size_t max_missing) {
  require_relational(spec.language());
  ExtensionReport rep;
  for_each_subset(model.elements(), ext_size, [&](const std::vector<Elem>& subset) {
    ElemSet keep(subset.begin(), subset.end());
    FiniteStructure a = model.induced(keep);
    for (SortId s = 0; s < spec.language().sort_count(); ++s) {
      for (auto& ext : one_point_extensions(spec, a, s)) {
        ++rep.requirements;
        PointCells pc = point_cells(subset, ext, s);
        if (realized(model, pc)) continue;
        rep.satisfied = false;
        if (rep.missing.size() < max_missing) rep.missing.push_back(MissingExtension{subset, std::move(ext)});
      }
    }
  });
  return rep;
}

ExpansionVerdict check_fraisse_expansion(const ClassSpec& base, const ClassSpec& expansion, int size_limit) {
  const Language& bl = base.language();
  const Language& el = expansion.language();
  if (bl.sort_count() != el.sort_count()) throw Error("expansion must keep the sorts of the base language");
  if (!el.contains(bl)) throw Error("expansion language does not extend the base language");
  require_relational(el);
  ExpansionVerdict v;
  v.size_limit = size_limit;
  auto fail = [&](std::string why, FiniteStructure w) {
    v.failure = std::move(why);
    v.witness = std::move(w);
    return v;
  };
  std::vector<FiniteStructure> exp_reps = enumerate_up_to(expansion, size_limit);
  for (const auto& m : exp_reps) {
    ++v.members_checked;
    if (auto bad = base.violation(m.reduct(bl))) return fail("reduct of an expansion member leaves the base class: " + *bad, m);
  }
  for (const auto& m : enumerate_up_to(base, size_limit)) {
    ++v.members_checked;
    if (!complete_in_class(expansion, m.expand(el))) return fail("base member has no expansion in the class", m);
  }
  for (const auto& b : exp_reps) {
    if (b.total_size() >= size_limit) continue;
    FiniteStructure red = b.reduct(bl);
    for (SortId s = 0; s < bl.sort_count(); ++s) {
      for (const auto& ext : one_point_extensions(base, red, s)) {
        FiniteStructure partial = b;
        Elem c = partial.add_element(s);
        for (std::size_t r = 0; r < bl.relation_names().size(); ++r) {
          const auto& name = bl.relation_names()[r];
          const auto& prof = bl.relations().at(name).profile;
          int er = el.relation_index(name);
          for (const auto& t : ext.all_tuples(prof)) {
            bool touches = false;
            for (std::size_t i = 0; i < t.size(); ++i) touches = touches || (prof[i] == s && t[i] == c.index);
            if (touches) partial.set_cell(er, t, ext.cell(static_cast<int>(r), t));
          }
        }
        if (!complete_in_class(expansion, std::move(partial))) {
          return fail("one-point extension of a reduct does not lift", ext);
        }
        ++v.extensions_lifted;
      }
    }
  }
  v.verified = true;
  return v;
}

std::string to_string(const PointLiteral& l, const FiniteStructure& m) {
  std::string out = l.positive ? "" : "!";
  out += l.symbol + "(";
  for (std::size_t i = 0; i < l.args.size(); ++i) {
    if (i) out += ',';
    out += l.args[i] ? m.name(*l.args[i]) : std::string("c");
  }
  return out + ")";
}

Realization realize_joint_type(const FiniteStructure& model, const std::vector<QfType>& types, const FusionSpec& fusion) {
  const auto& members = fusion.family.members;
  if (types.size() != members.size() || fusion.members.size() != members.size()) {
    throw Error("need one type and one class per member language");
  }
  const Language& ul = model.language();
  require_relational(ul);
  for (const auto& spec : fusion.members) {
    if (!spec.free_amalgamation()) throw Error("class " + spec.name() + " does not declare free amalgamation");
  }
  ElemSet base;
  for (std::size_t i = 0; i < types.size(); ++i) {
    ElemSet b(types[i].base.begin(), types[i].base.end());
    if (i == 0) base = b;
    if (b != base) throw Error("types are over different base sets");
  }
  for (const Elem& e : base) {
    if (e.sort < 0 || e.sort >= ul.sort_count() || e.index < 0 || e.index >= model.size(e.sort)) {
      throw Error("type base element outside the model");
    }
  }

  struct Entry {
    std::size_t member;
    PointLiteral lit;
  };
  std::map<std::pair<std::string, Tuple>, Entry> assigned;
  std::optional<SortId> point_sort;
  std::vector<std::tuple<std::size_t, int, Tuple, bool>> cells;
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (const auto& lit : types[i].literals) {
      if (!members[i].relations().count(lit.symbol)) {
        throw Error("literal " + lit.symbol + " is not in member language " + std::to_string(i));
      }
      const auto& prof = members[i].relations().at(lit.symbol).profile;
      if (prof.size() != lit.args.size()) throw Error("wrong arity in literal over " + lit.symbol);
      Tuple t(prof.size());
      bool mentions_point = false;
      for (std::size_t k = 0; k < prof.size(); ++k) {
        if (!lit.args[k]) {
          if (point_sort && *point_sort != prof[k]) throw Error("new point used at two sorts");
          point_sort = prof[k];
          mentions_point = true;
          t[k] = -1;
        } else {
          if (!base.count(*lit.args[k])) throw Error("literal argument outside the type's base");
          if (lit.args[k]->sort != prof[k]) throw Error("ill-sorted literal over " + lit.symbol);
          t[k] = lit.args[k]->index;
        }
      }
      if (!mentions_point) {
        if (model.holds(lit.symbol, t) != lit.positive) {
          throw Error("type literal " + to_string(lit, model) + " is false in the model");
        }
        continue;
      }
      auto [it, fresh] = assigned.try_emplace({lit.symbol, t}, Entry{i, lit});
      if (!fresh && it->second.lit.positive != lit.positive) {
        PointLiteral pos = lit;
        pos.positive = true;
        throw Error("clashing literal " + to_string(pos, model) + ": type " + std::to_string(it->second.member) +
                    (it->second.lit.positive ? " asserts it, type " : " denies it, type ") + std::to_string(i) +
                    (lit.positive ? " asserts it" : " denies it"));
      }
      cells.emplace_back(i, ul.relation_index(lit.symbol), t, lit.positive);
    }
  }
  SortId sort = point_sort.value_or(0);
  FiniteStructure grown = model;
  Elem c = grown.add_element(sort);
  for (auto& [i, r, t, positive] : cells) {
    for (auto& x : t) {
      if (x < 0) x = c.index;
    }
    const std::uint8_t want = positive ? kTrueCell : kFalseCell;
    const auto& name = ul.relation_names()[static_cast<std::size_t>(r)];
    std::vector<Tuple> orbit{t};
    if (fusion.members[i].symmetric().count(name)) {
      Tuple u = t;
      std::sort(u.begin(), u.end());
      orbit.clear();
      do {
        orbit.push_back(u);
      } while (std::next_permutation(u.begin(), u.end()));
    }
    for (const auto& u : orbit) {
      std::uint8_t before = grown.cell(r, u);
      if (before != kUnknownCell && before != want) {
        PointLiteral lit{true, name, {}};
        for (int x : u) lit.args.push_back(x == c.index ? std::nullopt : std::optional<Elem>(Elem{sort, x}));
        throw Error("clashing literal " + to_string(lit, model) + " under declared symmetry");
      }
      grown.set_cell(r, u, want);
    }
  }
  grown.close_unknown_false();
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (auto bad = fusion.members[i].violation(grown.reduct(members[i]))) {
      throw ClassViolation("member " + std::to_string(i) + " (" + fusion.members[i].name() + "): " + *bad);
    }
  }
  return Realization{std::move(grown), c};
}

}  // namespace fusionlab
