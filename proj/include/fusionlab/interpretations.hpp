#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fusionlab/class_spec.hpp"
#include "fusionlab/fraisse.hpp"
#include "fusionlab/structure.hpp"

namespace fusionlab {

/// A pair of structure maps between a source class and a two- or
/// three-sorted target class. The source carriers survive the round trip
/// unchanged, so decode(encode(x)) is compared with x under the identity.
struct Codec {
  std::string name;
  ClassSpec source;
  ClassSpec target;
  std::function<FiniteStructure(const FiniteStructure&)> encode_fn;
  std::function<FiniteStructure(const FiniteStructure&)> decode_fn;
  /// Inputs smaller than this are outside the codec's domain.
  int min_size = 0;
  /// Round trips run up to this size by default.
  int default_limit = 4;
  /// Source representatives of one total size; empty uses enumerate_up_to.
  std::function<std::vector<FiniteStructure>(int)> enumerate;
};

/// Checks source membership (ClassViolation naming the axiom) and the size
/// floor, then runs the codec's encoder.
FiniteStructure encode(const Codec& codec, const FiniteStructure& input);
/// Checks target membership, then decodes.
FiniteStructure decode(const Codec& codec, const FiniteStructure& input);

/// n-ary hypergraphs (graphs for n = 2) as a surjection pi from injective
/// tuples onto unordered classes S, with P on S marking hyperedges.
Codec hypergraph_pi_codec(int n = 2);
/// Same source; D links each injective tuple to its two S-points, g1/g2 pick
/// one each and agree exactly on hyperedges. S = {c1, c2} x classes.
Codec hypergraph_dis_codec(int n = 2);
/// Tournaments as selections of the unordered-pair equivalence on ordered pairs.
Codec tournament_codec();
/// n-ary functions as selections of (a, b) ~ (a', b') iff a = a'.
Codec function_codec(int n = 1);
/// Structures of `base` with `count` automorphisms sigma1.. as two copies
/// joined by isomorphisms tau0, tau1, ...
Codec automorphism_codec(const ClassSpec& base, int count = 1);
/// Variations of `base` (R_var(a, .) a base structure for every a) as
/// fibers of pi1 over M with slice relations R_2.
Codec variation_codec(const ClassSpec& base);

std::vector<std::string> codec_names();
/// Registered codecs: hypergraph ones with n = 2 over graphs, function with
/// n = 1, automorphism and variation over graphs. Throws Error when unknown.
Codec builtin_codec(const std::string& name);

struct RoundtripEntry {
  FiniteStructure input;
  bool ok = false;
  std::string stage;  // "encode", "target", "decode", "isomorphism", "re-encode"
  std::string detail;
  std::optional<FiniteStructure> encoded;
  std::optional<Embedding> isomorphism;  // input -> decode(encode(input))
};

struct RoundtripReport {
  std::string codec;
  int size_limit = 0;
  std::size_t checked = 0;
  std::size_t passed = 0;
  std::vector<RoundtripEntry> entries;  // enumeration order
  bool all_passed() const { return passed == checked; }
};

/// Runs every source representative of size in [min_size, size_limit]
/// through encode, the target check, decode, the identity isomorphism and a
/// second encode.
RoundtripReport roundtrip_check(const Codec& codec, int size_limit, unsigned jobs = 0);

/// Graph E = E1 & E2 of a model over {R, E1, E2}; ClassViolation when a
/// member reduct leaves K1 or K2.
FiniteStructure henson_reduct(const FiniteStructure& fusion);
/// Unordered E-triangles of a graph.
std::size_t count_triangles(const FiniteStructure& graph);

struct HensonRun {
  FiniteStructure fusion;
  FiniteStructure graph;
  int built_size = 0;  // after build_generic
  bool build_quiescent = false;
  std::size_t saturation_steps = 0;
  std::size_t triangles = 0;
  ExtensionReport coverage;  // triangle-free extension axioms on the graph
};

/// Adds points to a fusion model until the reduct realizes every
/// triangle-free one-point extension of subsets of size <= ext_size, or the
/// model has `budget` points. Each point joins both E1 and E2 to the required
/// neighbours plus a seeded maximal independent set of the reduct, avoiding
/// the required non-neighbours; R holds on its E1-triangles.
HensonRun henson_saturate(const FiniteStructure& fusion, int budget, int ext_size, std::uint64_t seed);
/// build_generic on the fusion class (ext_size 1), then henson_saturate.
HensonRun henson_construction(int budget, std::uint64_t seed, int ext_size = 2);

}  // namespace fusionlab
