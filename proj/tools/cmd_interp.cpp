#include <fstream>
#include <memory>
#include <random>

#include "cli.hpp"
#include "fusionlab/catalog.hpp"
#include "fusionlab/closures.hpp"
#include "fusionlab/independence.hpp"
#include "fusionlab/interpretations.hpp"
#include "fusionlab/io.hpp"
#include "fusionlab/parser.hpp"

namespace cli {

namespace {

struct InterpOpts {
  std::string codec = "all", structure, out, suite;
  int max_size = -1, budget = 40, ext_size = 2;
};

void write_out(const std::string& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(2) << '\n';
}

Report transcode(const InterpOpts& o, bool forward) {
  Codec c = builtin_codec(o.codec);
  const ClassSpec& from = forward ? c.source : c.target;
  FiniteStructure in = load_structure(o.structure, from.language());
  FiniteStructure res = forward ? encode(c, in) : decode(c, in);
  Report r;
  r.data["codec"] = c.name;
  r.data["structure"] = structure_to_json(res);
  if (!o.out.empty()) write_out(o.out, structure_to_json(res));
  return r;
}

void add_roundtrip(Report& r, const Codec& c, int limit, unsigned jobs) {
  auto rep = roundtrip_check(c, limit, jobs);
  auto& v = r.add("roundtrip " + c.name, rep.all_passed(), limit,
                  std::to_string(rep.passed) + "/" + std::to_string(rep.checked) + " inputs");
  for (const auto& e : rep.entries) {
    if (e.ok) continue;
    v.witness["input"] = structure_to_json(e.input);
    v.witness["stage"] = e.stage;
    v.witness["detail"] = e.detail;
    if (e.encoded) v.witness["encoded"] = structure_to_json(*e.encoded);
    break;
  }
}

Report roundtrip(const InterpOpts& o, const Context& ctx) {
  std::vector<std::string> names = o.codec == "all" ? codec_names() : split_list(o.codec);
  Report r;
  for (const auto& n : names) {
    Codec c = builtin_codec(n);
    add_roundtrip(r, c, o.max_size >= 0 ? o.max_size : c.default_limit, ctx.jobs);
  }
  return r;
}

void add_henson(Report& r, const HensonRun& run, const std::string& prefix, int ext_size) {
  r.add(prefix + "triangle-free", run.triangles == 0, -1,
        std::to_string(run.graph.total_size()) + " points, " + std::to_string(run.triangles) + " triangles");
  auto& v = r.add(prefix + "extension-axioms", run.coverage.satisfied, ext_size,
                  std::to_string(run.coverage.requirements) + " requirements, " +
                      std::to_string(run.coverage.missing.size()) + " missing");
  if (!run.coverage.missing.empty()) {
    const auto& m = run.coverage.missing[0];
    v.witness["subset"] = element_set_json(run.graph, ElemSet(m.subset.begin(), m.subset.end()));
    v.witness["extension"] = structure_to_json(m.extension);
  }
}

Json henson_data(const HensonRun& run) {
  Json j;
  j["built_size"] = run.built_size;
  j["build_quiescent"] = run.build_quiescent;
  j["saturation_steps"] = run.saturation_steps;
  j["size"] = run.graph.total_size();
  return j;
}

Report henson(const InterpOpts& o, const Context& ctx) {
  auto run = henson_construction(o.budget, ctx.seed, o.ext_size);
  Report r;
  add_henson(r, run, "", o.ext_size);
  r.data = henson_data(run);
  r.data["graph"] = structure_to_json(run.graph);
  if (!o.out.empty()) write_out(o.out, structure_to_json(run.fusion));
  return r;
}

Report suite_henson(const InterpOpts& o) {
  Report r;
  r.notes.push_back("seeds 0-4, budget " + std::to_string(o.budget) + ", extension subsets of size <= " +
                    std::to_string(o.ext_size));
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto run = henson_construction(o.budget, s, o.ext_size);
    add_henson(r, run, "seed " + std::to_string(s) + " ", o.ext_size);
    r.data["seed " + std::to_string(s)] = henson_data(run);
  }
  return r;
}

void expect(Report& r, const std::string& name, const IndepReport& rep, bool expected) {
  std::string got = rep.holds ? "holds" : "fails";
  auto& v = r.add(name, rep.holds == expected, rep.size_limit,
                  got + " (expected " + (expected ? "holds" : "fails") + "), " +
                      std::to_string(rep.configs_checked) + " configurations" +
                      (rep.detail.empty() ? "" : "; " + rep.detail));
  if (rep.witness) {
    v.witness["host"] = structure_to_json(rep.witness->host);
    v.witness["a"] = element_set_json(rep.witness->host, rep.witness->a);
    v.witness["b"] = element_set_json(rep.witness->host, rep.witness->b);
    v.witness["c"] = element_set_json(rep.witness->host, rep.witness->c);
  }
}

Report suite_rg(const Context& ctx) {
  ClassSpec g = graphs_class(), clique = clique_predicate_class();
  Report r;
  r.notes.push_back("graphs up to 4 points; expansion: graphs with a clique predicate");
  expect(r, "free-amalgam stationarity",
         check_indep_axiom(IndepKind::FreeAmalgam, g, IndepAxiom::Stationarity, nullptr, 4, ctx.jobs), true);
  expect(r, "edge full-existence",
         check_indep_axiom(IndepKind::Edge, g, IndepAxiom::FullExistence, &clique, 4, ctx.jobs), true);
  expect(r, "non-edge full-existence",
         check_indep_axiom(IndepKind::NonEdge, g, IndepAxiom::FullExistence, &clique, 4, ctx.jobs), false);
  return r;
}

Report suite_roundtrips(const Context& ctx) {
  Report r;
  for (const auto& n : codec_names()) {
    Codec c = builtin_codec(n);
    add_roundtrip(r, c, c.default_limit, ctx.jobs);
  }
  return r;
}

FiniteStructure random_graph(int n, std::mt19937_64& rng) {
  FiniteStructure m(graphs_class().language(), {n});
  for (int i = 0; i < n; ++i) {
    m.set_cell(0, {i, i}, kFalseCell);
    for (int j = i + 1; j < n; ++j) {
      bool e = rng() % 2;
      m.set(std::string("E"), {i, j}, e);
      m.set(std::string("E"), {j, i}, e);
    }
  }
  return m;
}

FiniteStructure random_function(int n, std::mt19937_64& rng) {
  FiniteStructure m(unary_function_class().language(), {n});
  for (int i = 0; i < n; ++i) m.set_value(0, {i}, static_cast<int>(rng() % static_cast<unsigned>(n)));
  return m;
}

ElemSet random_subset(const FiniteStructure& m, std::mt19937_64& rng) {
  ElemSet s;
  for (const auto& e : m.elements()) {
    if (rng() % 3 == 0) s.insert(e);
  }
  return s;
}

// Forward orbit under f, computed directly.
ElemSet orbit(const FiniteStructure& m, ElemSet s) {
  std::vector<Elem> todo(s.begin(), s.end());
  while (!todo.empty()) {
    Elem e = todo.back();
    todo.pop_back();
    Elem img{0, m.value(0, {e.index})};
    if (s.insert(img).second) todo.push_back(img);
  }
  return s;
}

Report suite_closure(const Context& ctx) {
  std::mt19937_64 rng(ctx.seed);
  Report r;
  r.notes.push_back("20 random graphs and 20 random unary functions on 6 points, seed " +
                    std::to_string(ctx.seed));
  std::size_t law_defects = 0, strategy_mismatch = 0, orbit_mismatch = 0, checks = 0;
  std::string first;
  for (int t = 0; t < 20; ++t) {
    FiniteStructure g = random_graph(6, rng);
    std::vector<ClosureOperator> ops{identity_closure(), partner_closure("E")};
    auto sample = subset_sample(g, 64, rng());
    for (const auto& op : ops) {
      auto d = closure_law_defects(op, g, sample);
      law_defects += d.size();
      if (!d.empty() && first.empty()) first = d[0];
    }
    ElemSet seed = random_subset(g, rng);
    if (ccl_fixpoint(g, seed, ops, FixpointStrategy::RoundRobin) !=
        ccl_fixpoint(g, seed, ops, FixpointStrategy::Worklist)) {
      ++strategy_mismatch;
    }
    ++checks;
  }
  r.add("closure laws", law_defects == 0, -1, std::to_string(law_defects) + " defects" +
                                                  (first.empty() ? "" : "; first: " + first));
  r.add("fixpoint strategies agree", strategy_mismatch == 0, -1,
        std::to_string(checks - strategy_mismatch) + "/" + std::to_string(checks) + " seeds");

  ClassSpec fn = unary_function_class();
  Formula phi = parse_formula("f(x) = y", fn.language());
  auto x = pick_variables(phi, "x"), y = pick_variables(phi, "y");
  auto bound = check_bounded(phi, x, y, fn, 1, 3);
  std::vector<BoundedFormula> lib;
  if (bound.verified) lib.push_back(make_bounded(phi, x, y, 1, bound));
  for (int t = 0; t < 20 && bound.verified; ++t) {
    FiniteStructure m = random_function(6, rng);
    ElemSet seed = random_subset(m, rng);
    if (bcl_closure(m, seed, lib) != orbit(m, seed)) ++orbit_mismatch;
  }
  r.add("bcl of f(x) = y is the forward orbit", bound.verified && orbit_mismatch == 0, 3,
        bound.verified ? std::to_string(20 - orbit_mismatch) + "/20 seeds" : "bound not verified: " + bound.note);
  return r;
}

Report suite(const InterpOpts& o, const Context& ctx) {
  Report r;
  if (o.suite == "henson") r = suite_henson(o);
  else if (o.suite == "rg-example") r = suite_rg(ctx);
  else if (o.suite == "roundtrips") r = suite_roundtrips(ctx);
  else if (o.suite == "closure-laws") r = suite_closure(ctx);
  else throw UsageError("unknown suite '" + o.suite + "' (henson, rg-example, roundtrips, closure-laws)");
  r.data["suite"] = o.suite;
  return r;
}

}  // namespace

void register_interp(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<InterpOpts>();

  auto* s = app.add_subcommand("encode", "Apply a codec's encoder");
  s->add_option("--codec", o->codec)->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--out", o->out);
  s->callback([&ctx, o] { ctx.run = [o] { return transcode(*o, true); }; });

  s = app.add_subcommand("decode", "Apply a codec's decoder");
  s->add_option("--codec", o->codec)->required();
  s->add_option("--structure", o->structure)->required();
  s->add_option("--out", o->out);
  s->callback([&ctx, o] { ctx.run = [o] { return transcode(*o, false); }; });

  s = app.add_subcommand("roundtrip", "decode(encode(x)) = x for all small inputs");
  s->add_option("--codec", o->codec, "Codec name, comma list, or all");
  s->add_option("--max-size", o->max_size, "Default: the codec's own limit");
  s->callback([&ctx, o] { ctx.run = [&ctx, o] { return roundtrip(*o, ctx); }; });

  s = app.add_subcommand("henson", "Triangle-free graph from the hypergraph fusion");
  s->add_option("--budget", o->budget);
  s->add_option("--ext-size", o->ext_size);
  s->add_option("--out", o->out, "Write the fusion model");
  s->callback([&ctx, o] { ctx.run = [&ctx, o] { return henson(*o, ctx); }; });

  s = app.add_subcommand("suite", "Run a named experiment");
  s->add_option("name", o->suite, "henson, rg-example, roundtrips, closure-laws")->required();
  s->add_option("--budget", o->budget);
  s->add_option("--ext-size", o->ext_size);
  s->callback([&ctx, o] { ctx.run = [&ctx, o] { return suite(*o, ctx); }; });
}

}  // namespace cli
