#include <fstream>
#include <algorithm>
#include <memory>

#include "cli.hpp"
#include "fusionlab/io.hpp"
#include "fusionlab/search.hpp"

namespace cli {

namespace {

struct FraisseOpts {
  std::string spec, base, expansion, structure, types, out, properties = "jep,ap,dap";
  std::string a, b1, b2, f1, f2;
  std::vector<std::string> members;
  int max_size = 4, budget = 30, ext_size = 1;
  bool disjoint = false;
};

Embedding names_to_embedding(const FiniteStructure& from, const FiniteStructure& to, const std::string& list) {
  auto names = split_list(list);
  if (static_cast<int>(names.size()) != from.total_size()) {
    throw UsageError("an embedding needs one image per base element");
  }
  Embedding e;
  std::size_t k = 0;
  for (SortId s = 0; s < from.language().sort_count(); ++s) {
    e.map.emplace_back();
    for (int i = 0; i < from.size(s); ++i) {
      auto img = to.find(s, names[k++]);
      if (!img) throw UsageError("no element '" + names[k - 1] + "' in the target");
      e.map.back().push_back(img->index);
    }
  }
  if (!is_embedding(from, to, e)) throw UsageError("the given map is not an embedding");
  return e;
}

Report class_check(const FraisseOpts& o, const Context& ctx) {
  ClassSpec spec = resolve_class(o.spec);
  std::set<Property> props;
  for (const auto& p : split_list(o.properties)) {
    if (p == "jep") props.insert(Property::JEP);
    else if (p == "ap") props.insert(Property::AP);
    else if (p == "dap") props.insert(Property::DAP);
    else throw UsageError("unknown property '" + p + "' (jep, ap, dap)");
  }
  Report r;
  r.data["class"] = spec.name();
  for (const auto& rep : check_class_properties(spec, o.max_size, props, ctx.jobs)) {
    auto& v = r.add(property_name(rep.property), rep.holds, rep.size_limit,
                    std::to_string(rep.problems) + " problems examined");
    if (rep.witness) v.witness = amalgam_problem_json(*rep.witness);
  }
  return r;
}

Report amalgam(const FraisseOpts& o) {
  ClassSpec spec = resolve_class(o.spec);
  const Language& l = spec.language();
  AmalgamProblem p;
  p.base = load_structure(o.a, l);
  p.b1 = load_structure(o.b1, l);
  p.b2 = load_structure(o.b2, l);
  p.f1 = names_to_embedding(p.base, p.b1, o.f1);
  p.f2 = names_to_embedding(p.base, p.b2, o.f2);
  auto am = find_amalgam(spec, p, o.disjoint);
  Report r;
  auto& v = r.add(o.disjoint ? "disjoint-amalgam" : "amalgam", am.has_value());
  if (!am) {
    v.witness = amalgam_problem_json(p);
    return r;
  }
  r.data["structure"] = structure_to_json(am->structure);
  r.data["g1"] = embedding_to_json(p.b1, am->structure, am->g1);
  r.data["g2"] = embedding_to_json(p.b2, am->structure, am->g2);
  return r;
}

void missing_verdict(Report& r, const ExtensionReport& rep, const FiniteStructure& m, int ext_size) {
  auto& v = r.add("extension-axioms", rep.satisfied, ext_size,
                  std::to_string(rep.requirements) + " requirements, " + std::to_string(rep.missing.size()) +
                      " missing");
  if (!rep.missing.empty()) {
    Json w;
    w["subset"] = element_set_json(m, ElemSet(rep.missing[0].subset.begin(), rep.missing[0].subset.end()));
    w["extension"] = structure_to_json(rep.missing[0].extension);
    v.witness = w;
  }
}

Report generic_build(const FraisseOpts& o, const Context& ctx) {
  ClassSpec spec = resolve_class(o.spec);
  GenericModel gm = build_generic(spec, o.budget, o.ext_size, ctx.seed);
  Report r;
  const FiniteStructure& m = gm.structure;
  r.data["class"] = gm.class_name;
  r.data["size"] = m.total_size();
  r.data["quiescent"] = gm.quiescent;
  r.data["pending"] = gm.pending;
  Json log = Json::array();
  for (const auto& step : gm.log) {
    Json s;
    s["subset"] = element_set_json(m, ElemSet(step.subset.begin(), step.subset.end()));
    s["type"] = step.type;
    s["added"] = m.name(step.added);
    log.push_back(s);
  }
  r.data["log"] = log;
  r.data["structure"] = structure_to_json(m);
  missing_verdict(r, check_extension_axioms(m, spec, o.ext_size, 1), m, o.ext_size);
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw Error("cannot write " + o.out);
    f << structure_to_json(m).dump(2) << '\n';
  }
  return r;
}

Report generic_verify(const FraisseOpts& o) {
  ClassSpec spec = resolve_class(o.spec);
  FiniteStructure m = load_structure(o.structure, spec.language());
  Report r;
  if (auto v = spec.violation(m)) {
    r.add("class-membership", false, -1, *v);
    return r;
  }
  missing_verdict(r, check_extension_axioms(m, spec, o.ext_size, 1), m, o.ext_size);
  return r;
}

Report expansion_check(const FraisseOpts& o) {
  ClassSpec base = resolve_class(o.base), exp = resolve_class(o.expansion);
  auto v = check_fraisse_expansion(base, exp, o.max_size);
  Report r;
  auto& out = r.add("fraisse-expansion", v.verified, v.size_limit,
                    v.verified ? std::to_string(v.members_checked) + " members, " +
                                     std::to_string(v.extensions_lifted) + " extensions lifted"
                               : v.failure);
  if (v.witness) out.witness = structure_to_json(*v.witness);
  return r;
}

PointLiteral parse_point_literal(const FiniteStructure& m, std::string text) {
  text.erase(std::remove(text.begin(), text.end(), ' '), text.end());
  PointLiteral l;
  if (!text.empty() && text[0] == '!') {
    l.positive = false;
    text.erase(0, 1);
  }
  auto open = text.find('('), close = text.rfind(')');
  if (open == std::string::npos || close != text.size() - 1) throw UsageError("literal '" + text + "' is not R(args)");
  l.symbol = text.substr(0, open);
  for (const auto& a : split_list(text.substr(open + 1, close - open - 1))) {
    if (a == "c") {
      l.args.push_back(std::nullopt);
    } else {
      l.args.push_back(element_by_name(m, a));
    }
  }
  return l;
}

Report realize(const FraisseOpts& o) {
  FusionSpec fam = resolve_family(o.members);
  FiniteStructure m = load_structure(o.structure, fam.family.union_language);
  for (SortId s = 0; s < m.language().sort_count(); ++s) {
    if (m.find(s, "c")) throw UsageError("the new point is written c; rename the model's element c");
  }
  std::ifstream in(o.types);
  if (!in) throw Error("cannot read " + o.types);
  Json tj;
  try {
    tj = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(o.types + ": " + e.what(), e.byte);
  }
  std::vector<QfType> types;
  for (const auto& t : tj) {
    QfType q;
    for (const auto& n : t.at("base")) q.base.push_back(element_by_name(m, n.get<std::string>()));
    for (const auto& l : t.at("literals")) q.literals.push_back(parse_point_literal(m, l.get<std::string>()));
    types.push_back(q);
  }
  Report r;
  try {
    auto res = realize_joint_type(m, types, fam);
    r.add("joint-type", true);
    r.data["structure"] = structure_to_json(res.structure);
    r.data["point"] = res.structure.name(res.point);
  } catch (const BudgetError&) {
    throw;
  } catch (const SortError&) {
    throw;
  } catch (const Error& e) {
    r.add("joint-type", false, -1, e.what());
  }
  return r;
}

}  // namespace

void register_fraisse(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<FraisseOpts>();

  auto* cls = app.add_subcommand("class", "Class-level checks");
  cls->require_subcommand(1);
  auto* s = cls->add_subcommand("check", "Certify JEP / AP / dAP up to a size");
  s->add_option("--spec", o->spec)->required();
  s->add_option("--max-size", o->max_size);
  s->add_option("--properties", o->properties, "Comma-separated: jep, ap, dap");
  s->callback([&ctx, o] { ctx.run = [&ctx, o] { return class_check(*o, ctx); }; });

  s = app.add_subcommand("amalgam", "Search an amalgam of B1 and B2 over A");
  s->add_option("--spec", o->spec)->required();
  s->add_option("--a", o->a, "Base structure file")->required();
  s->add_option("--b1", o->b1)->required();
  s->add_option("--b2", o->b2)->required();
  s->add_option("--f1", o->f1, "Images in B1 of the base elements, in order")->required();
  s->add_option("--f2", o->f2)->required();
  s->add_flag("--disjoint", o->disjoint);
  s->callback([&ctx, o] { ctx.run = [o] { return amalgam(*o); }; });

  auto* gen = app.add_subcommand("generic", "Generic structure builder");
  gen->require_subcommand(1);
  s = gen->add_subcommand("build", "Saturate one-point extension requirements");
  s->add_option("--spec", o->spec)->required();
  s->add_option("--budget", o->budget);
  s->add_option("--ext-size", o->ext_size);
  s->add_option("--out", o->out, "Write the structure JSON here");
  s->callback([&ctx, o] { ctx.run = [&ctx, o] { return generic_build(*o, ctx); }; });
  s = gen->add_subcommand("verify", "Check extension axioms on a structure");
  s->add_option("--spec", o->spec)->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--ext-size", o->ext_size);
  s->callback([&ctx, o] { ctx.run = [o] { return generic_verify(*o); }; });

  auto* exp = app.add_subcommand("expansion", "Expansion checks");
  exp->require_subcommand(1);
  s = exp->add_subcommand("check", "Verify a Fraisse expansion up to a size");
  s->add_option("--base", o->base)->required();
  s->add_option("--expansion", o->expansion)->required();
  s->add_option("--max-size", o->max_size);
  s->callback([&ctx, o] { ctx.run = [o] { return expansion_check(*o); }; });

  s = app.add_subcommand("realize", "Realize a joint type over a fusion model");
  s->add_option("--member", o->members, "Member class (repeat), or hypergraph-fusion")->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--types", o->types, "JSON list of {base, literals}")->required();
  s->callback([&ctx, o] { ctx.run = [o] { return realize(*o); }; });
}

}  // namespace cli
