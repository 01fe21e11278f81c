#include <memory>

#include "cli.hpp"
#include "fusionlab/io.hpp"
#include "fusionlab/normal_forms.hpp"
#include "fusionlab/parser.hpp"
#include "fusionlab/search.hpp"

namespace cli {

namespace {

struct LogicOpts {
  std::string lang, spec, formula, structure, x, y, assign, fix;
  std::vector<std::string> formulas, members;
  int check_size = 0, k = 1, max_size = 3;
  bool list = false;
};

Report flatten(const LogicOpts& o) {
  Language lang = resolve_language(o.lang);
  Formula f = parse_formula(o.formula, lang);
  Report r;
  auto parts = flatten_to_eflat(f, lang);
  Json list = Json::array();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    list.push_back(to_string(parts[i].to_formula(lang), lang));
    if (o.check_size > 0) {
      auto fail = check_unique_witness(parts[i], lang, o.check_size);
      auto& v = r.add("unique-witness[" + std::to_string(i) + "]", !fail, o.check_size);
      if (fail) {
        v.detail = std::to_string(fail->witnesses) + " witnesses";
        v.witness = structure_to_json(fail->structure);
      }
    }
  }
  r.data["input"] = to_string(f, lang);
  r.data["disjuncts"] = list;
  return r;
}

Report split(const LogicOpts& o) {
  FusionSpec fam = resolve_family(o.members);
  const Language& lang = fam.family.union_language;
  Formula f = parse_formula(o.formula, lang);
  Report r;
  Json out = Json::array();
  for (const auto& d : flatten_to_eflat(f, lang)) {
    Json entry;
    entry["disjunct"] = to_string(d.to_formula(lang), lang);
    Json groups = Json::object();
    for (const auto& [member, lits] : split_flat_by_language(d.body, fam.family)) {
      Json ls = Json::array();
      for (const auto& l : lits) ls.push_back(to_string(l.to_formula(lang), lang));
      groups[std::to_string(member)] = ls;
    }
    entry["members"] = groups;
    out.push_back(entry);
  }
  r.data["split"] = out;
  return r;
}

Report fdiag(const LogicOpts& o) {
  Language lang = resolve_language(o.lang);
  FiniteStructure m = load_structure(o.structure, lang);
  Report r;
  Json lits = Json::array();
  for (const auto& l : flat_diagram(m)) lits.push_back(to_string(l, m));
  r.data["diagram"] = lits;
  return r;
}

Report morley(const LogicOpts& o) {
  Language lang = resolve_language(o.lang);
  std::vector<Formula> fs;
  for (const auto& t : o.formulas) fs.push_back(parse_formula(t, lang));
  auto res = morleyize(lang, fs);
  Report r;
  Json syms = Json::array(), axioms = Json::array();
  for (std::size_t i = 0; i < res.symbols.size(); ++i) {
    Json s;
    s["symbol"] = res.symbols[i];
    s["formula"] = to_string(res.formulas[i], lang);
    Json args = Json::array();
    for (const auto& v : res.arguments[i]) args.push_back(v.name);
    s["arguments"] = args;
    syms.push_back(s);
  }
  for (const auto& a : res.axioms) axioms.push_back(to_string(a, res.language));
  r.data["symbols"] = syms;
  r.data["axioms"] = axioms;
  if (!o.structure.empty()) r.data["expanded"] = structure_to_json(res.expand(load_structure(o.structure, lang)));
  return r;
}

Report bounded(const LogicOpts& o) {
  ClassSpec spec = resolve_class(o.spec);
  Formula f = parse_formula(o.formula, spec.language());
  auto x = pick_variables(f, o.x), y = pick_variables(f, o.y);
  auto v = check_bounded(f, x, y, spec, o.k, o.max_size);
  Report r;
  auto& out = r.add("at-most-" + std::to_string(o.k) + "-witnesses", v.verified, o.max_size, v.note);
  if (v.witness) {
    Json w;
    w["structure"] = structure_to_json(*v.witness);
    Json xs = Json::array();
    for (std::size_t i = 0; i < x.size(); ++i) xs.push_back(v.witness->name(Elem{x[i].sort, v.x_values[i]}));
    w["x"] = xs;
    w["count"] = v.count;
    out.witness = w;
  }
  return r;
}

Report eval(const LogicOpts& o) {
  Language lang = resolve_language(o.lang);
  FiniteStructure m = load_structure(o.structure, lang);
  Formula f = parse_formula(o.formula, lang);
  Assignment a;
  for (const auto& item : split_list(o.assign)) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("assignments look like x=a");
    auto vs = pick_variables(f, item.substr(0, eq));
    auto e = m.find(vs[0].sort, item.substr(eq + 1));
    if (!e) throw UsageError("no element '" + item.substr(eq + 1) + "' of the variable's sort");
    a[vs[0]] = e->index;
  }
  for (const auto& v : free_variables(f)) {
    if (!a.count(v)) throw UsageError("free variable '" + v.name + "' needs --assign");
  }
  Report r;
  r.data["formula"] = to_string(f, lang);
  r.data["value"] = evaluate(m, f, a);
  return r;
}

Report enumerate(const LogicOpts& o) {
  ClassSpec spec = resolve_class(o.spec);
  Report r;
  Json counts = Json::object(), list = Json::array();
  for (int n = 0; n <= o.max_size; ++n) {
    std::size_t count = 0;
    for (const auto& sizes : size_vectors(spec.language().sort_count(), n)) {
      auto reps = enumerate_models(spec, sizes);
      count += reps.size();
      if (o.list) {
        for (const auto& m : reps) list.push_back(structure_to_json(m));
      }
    }
    counts[std::to_string(n)] = count;
  }
  r.data["class"] = spec.name();
  r.data["counts"] = counts;
  if (o.list) r.data["structures"] = list;
  return r;
}

Report aut(const LogicOpts& o) {
  Language lang = resolve_language(o.lang);
  FiniteStructure m = load_structure(o.structure, lang);
  auto group = automorphisms(m, parse_element_set(m, o.fix));
  Report r;
  r.data["count"] = group.list.size();
  Json maps = Json::array();
  for (const auto& e : group.list) maps.push_back(embedding_to_json(m, m, e));
  r.data["automorphisms"] = maps;
  return r;
}

}  // namespace

void register_logic(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<LogicOpts>();
  auto bind = [&ctx, o](CLI::App* sub, Report (*fn)(const LogicOpts&)) {
    sub->callback([&ctx, o, fn] { ctx.run = [o, fn] { return fn(*o); }; });
  };

  auto* s = app.add_subcommand("flatten", "Quantifier-free formula to a disjunction of E-flat formulas");
  s->add_option("--lang", o->lang, "Spec file or built-in class giving the language")->required();
  s->add_option("--formula", o->formula)->required();
  s->add_option("--check-size", o->check_size, "Check unique witnesses on structures up to this size");
  bind(s, flatten);

  s = app.add_subcommand("split", "Split each E-flat disjunct by member language");
  s->add_option("--member", o->members, "Member class (repeat), or hypergraph-fusion")->required();
  s->add_option("--formula", o->formula)->required();
  bind(s, split);

  s = app.add_subcommand("fdiag", "Flat diagram of a structure");
  s->add_option("--lang", o->lang)->required();
  s->add_option("--structure", o->structure)->required();
  bind(s, fdiag);

  s = app.add_subcommand("morleyize", "Name formulas by new relation symbols");
  s->add_option("--lang", o->lang)->required();
  s->add_option("--formula", o->formulas)->required();
  s->add_option("--structure", o->structure, "Also print the canonical expansion of this structure");
  bind(s, morley);

  s = app.add_subcommand("bounded", "Check that phi(x; y) has at most k solutions y per x");
  s->add_option("--spec", o->spec)->required();
  s->add_option("--formula", o->formula)->required();
  s->add_option("--x", o->x, "Comma-separated parameter variables")->required();
  s->add_option("--y", o->y, "Comma-separated witness variables")->required();
  s->add_option("--k", o->k);
  s->add_option("--max-size", o->max_size);
  bind(s, bounded);

  s = app.add_subcommand("eval", "Evaluate a formula in a structure");
  s->add_option("--lang", o->lang)->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--formula", o->formula)->required();
  s->add_option("--assign", o->assign, "x=a,y=b");
  bind(s, eval);

  s = app.add_subcommand("enum", "Count (and list) class members up to isomorphism");
  s->add_option("--spec", o->spec)->required();
  s->add_option("--max-size", o->max_size);
  s->add_flag("--list", o->list);
  bind(s, enumerate);

  s = app.add_subcommand("aut", "Automorphisms of a structure");
  s->add_option("--lang", o->lang)->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--fix", o->fix, "Elements fixed pointwise");
  bind(s, aut);
}

}  // namespace cli
