#include <memory>

#include "cli.hpp"
#include "fusionlab/closures.hpp"
#include "fusionlab/independence.hpp"
#include "fusionlab/io.hpp"
#include "fusionlab/search.hpp"
#include "fusionlab/parser.hpp"

namespace cli {

namespace {

struct ClosureOpts {
  std::string lang, spec = "graphs", structure, seed_set, strategy = "round-robin", base, point;
  std::string relation, axiom, expansion, a, b, c;
  std::vector<std::string> ops, formulas, xs, ys;
  std::vector<int> ks;
  int max_size = 4, budget = 0;
  bool check_laws = false;
};

ClosureOperator parse_operator(const std::string& text) {
  auto colon = text.find(':');
  std::string kind = text.substr(0, colon), arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "identity") return identity_closure();
  if (kind == "functions") return function_closure(split_list(arg));
  if (kind == "partner") {
    if (arg.empty()) throw UsageError("partner needs a relation: partner:E");
    return partner_closure(arg);
  }
  throw UsageError("unknown operator '" + text + "' (identity, functions[:f,g], partner:R)");
}

Report ccl(const ClosureOpts& o, const Context& ctx) {
  Language lang = resolve_language(o.lang);
  FiniteStructure m = load_structure(o.structure, lang);
  std::vector<ClosureOperator> ops;
  for (const auto& t : o.ops) ops.push_back(parse_operator(t));
  FixpointStrategy st;
  if (o.strategy == "round-robin") st = FixpointStrategy::RoundRobin;
  else if (o.strategy == "worklist") st = FixpointStrategy::Worklist;
  else throw UsageError("strategy is round-robin or worklist");
  Report r;
  if (o.check_laws) {
    auto sample = subset_sample(m, 256, ctx.seed);
    for (const auto& op : ops) {
      auto defects = closure_law_defects(op, m, sample);
      auto& v = r.add("closure-laws " + op.name, defects.empty(), -1,
                      std::to_string(sample.size()) + " subsets sampled");
      if (!defects.empty()) v.witness = defects;
    }
  }
  ElemSet seed = parse_element_set(m, o.seed_set);
  r.data["seed_set"] = element_set_json(m, seed);
  r.data["closure"] = element_set_json(m, ccl_fixpoint(m, seed, ops, st));
  return r;
}

Report bcl(const ClosureOpts& o) {
  ClassSpec spec = resolve_class(o.spec);
  FiniteStructure m = load_structure(o.structure, spec.language());
  if (o.xs.size() != o.formulas.size() || o.ys.size() != o.formulas.size()) {
    throw UsageError("give one --x and one --y per --formula");
  }
  Report r;
  std::vector<BoundedFormula> lib;
  for (std::size_t i = 0; i < o.formulas.size(); ++i) {
    Formula f = parse_formula(o.formulas[i], spec.language());
    auto x = pick_variables(f, o.xs[i]), y = pick_variables(f, o.ys[i]);
    int k = i < o.ks.size() ? o.ks[i] : 1;
    auto v = check_bounded(f, x, y, spec, k, o.max_size);
    auto& out = r.add("bounded[" + std::to_string(i) + "]", v.verified, o.max_size, v.note);
    if (!v.verified) {
      if (v.witness) out.witness = structure_to_json(*v.witness);
      continue;
    }
    lib.push_back(make_bounded(f, x, y, k, v));
  }
  if (r.failed()) return r;
  ElemSet seed = parse_element_set(m, o.seed_set);
  r.data["seed_set"] = element_set_json(m, seed);
  r.data["generated"] = element_set_json(m, generated_closure(m, seed));
  r.data["closure"] = element_set_json(m, bcl_closure(m, seed, lib));
  return r;
}

Report acl_test(const ClosureOpts& o) {
  ClassSpec spec = resolve_class(o.spec);
  FiniteStructure m = load_structure(o.structure, spec.language());
  ElemSet base = parse_element_set(m, o.base);
  Elem p = element_by_name(m, o.point);
  int budget = o.budget > 0 ? o.budget : m.total_size() + 1;
  auto v = acl_test_duplication(spec, m, base, p, budget);
  Report r;
  r.data["point"] = o.point;
  r.data["base"] = element_set_json(m, base);
  r.data["algebraic"] = !v.non_algebraic;
  r.data["budget"] = v.budget;
  r.data["note"] = v.note;
  if (v.witness) {
    r.data["witness"] = structure_to_json(*v.witness);
    r.data["duplicate"] = v.witness->name(v.duplicate);
  }
  return r;
}

Json triple_json(const TripleConfig& t) {
  Json j;
  j["host"] = structure_to_json(t.host);
  j["a"] = element_set_json(t.host, t.a);
  j["b"] = element_set_json(t.host, t.b);
  j["c"] = element_set_json(t.host, t.c);
  return j;
}

Report indep_eval_cmd(const ClosureOpts& o) {
  IndepKind k = parse_indep(o.relation);
  Language lang = resolve_language(o.lang.empty() ? o.spec : o.lang);
  FiniteStructure m = load_structure(o.structure, lang);
  Report r;
  r.data["relation"] = indep_name(k);
  r.data["value"] = indep_eval(k, m, parse_element_set(m, o.a), parse_element_set(m, o.b), parse_element_set(m, o.c));
  return r;
}

Report indep_check(const ClosureOpts& o, const Context& ctx) {
  IndepKind k = parse_indep(o.relation);
  IndepAxiom ax = parse_axiom(o.axiom);
  ClassSpec spec = resolve_class(o.spec);
  std::optional<ClassSpec> exp;
  if (!o.expansion.empty()) exp = resolve_class(o.expansion);
  auto rep = check_indep_axiom(k, spec, ax, exp ? &*exp : nullptr, o.max_size, ctx.jobs);
  Report r;
  if (!rep.header.empty()) r.notes.push_back(rep.header);
  auto& v = r.add(indep_name(k) + " " + axiom_name(ax), rep.holds, rep.size_limit,
                  std::to_string(rep.configs_checked) + " configurations" +
                      (rep.detail.empty() ? "" : "; " + rep.detail));
  if (rep.witness) {
    Json w;
    w["config"] = triple_json(*rep.witness);
    if (rep.second) w["second"] = triple_json(*rep.second);
    if (rep.attempt) {
      w["attempt"] = structure_to_json(*rep.attempt);
      w["a_star"] = element_set_json(*rep.attempt, ElemSet(rep.a_star.begin(), rep.a_star.end()));
    }
    v.witness = w;
  }
  return r;
}

}  // namespace

void register_closure(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<ClosureOpts>();

  auto* cl = app.add_subcommand("closure", "Closure operators");
  cl->require_subcommand(1);
  auto* s = cl->add_subcommand("ccl", "Least set closed under several operators");
  s->add_option("--lang", o->lang)->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--seed-set", o->seed_set, "Comma-separated element names");
  s->add_option("--op", o->ops, "identity, functions[:f,g], partner:R (repeat)")->required();
  s->add_option("--strategy", o->strategy, "round-robin or worklist");
  s->add_flag("--check-laws", o->check_laws, "Also test extensive/monotone/idempotent on sampled subsets");
  s->callback([&ctx, o] { ctx.run = [&ctx, o] { return ccl(*o, ctx); }; });

  s = cl->add_subcommand("bcl", "Bounded closure from a library of bounded formulas");
  s->add_option("--spec", o->spec)->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--seed-set", o->seed_set);
  s->add_option("--formula", o->formulas, "phi(x; y) (repeat)")->required();
  s->add_option("--x", o->xs, "Parameter variables per formula")->required();
  s->add_option("--y", o->ys, "Witness variables per formula")->required();
  s->add_option("--k", o->ks, "Bound per formula (default 1)");
  s->add_option("--max-size", o->max_size, "Size up to which bounds are verified");
  s->callback([&ctx, o] { ctx.run = [o] { return bcl(*o); }; });

  s = cl->add_subcommand("acl-test", "Is a point algebraic over a set (duplication test)");
  s->add_option("--spec", o->spec)->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--base", o->base);
  s->add_option("--point", o->point)->required();
  s->add_option("--budget", o->budget, "Largest extension searched (default host size + 1)");
  s->callback([&ctx, o] { ctx.run = [o] { return acl_test(*o); }; });

  auto* in = app.add_subcommand("indep", "Independence relations");
  in->require_subcommand(1);
  s = in->add_subcommand("eval", "Evaluate A | C | B in a structure");
  s->add_option("--relation", o->relation, "free-amalgam, edge, non-edge")->required();
  s->add_option("--lang", o->lang, "Language (default: that of --spec)");
  s->add_option("--spec", o->spec);
  s->add_option("--structure", o->structure)->required();
  s->add_option("--a", o->a);
  s->add_option("--b", o->b);
  s->add_option("--c", o->c);
  s->callback([&ctx, o] { ctx.run = [o] { return indep_eval_cmd(*o); }; });

  s = in->add_subcommand("check", "Check an axiom exhaustively up to a size");
  s->add_option("--relation", o->relation)->required();
  s->add_option("--axiom", o->axiom, "invariance, algebraic-independence, stationarity, full-existence")->required();
  s->add_option("--spec", o->spec, "Base class (default graphs)");
  s->add_option("--expansion", o->expansion, "Expansion class for full existence");
  s->add_option("--max-size", o->max_size);
  s->callback([&ctx, o] { ctx.run = [&ctx, o] { return indep_check(*o, ctx); }; });
}

}  // namespace cli
