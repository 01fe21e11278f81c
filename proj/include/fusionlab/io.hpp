#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fusionlab/class_spec.hpp"
#include "fusionlab/fraisse.hpp"
#include "fusionlab/structure.hpp"

namespace fusionlab {

using Json = nlohmann::ordered_json;

/// Contents of a spec file:
///
///   language {
///     sorts V, S;
///     relations E(V, V), P(S);
///     functions f(V) -> V;
///     constants c: V;
///   }
///   class graphs {
///     axiom "forall x, y: E(x,y) -> E(y,x)";
///     symmetric E;
///     irreflexive E;
///     free-amalgamation;
///     forbid "triangle.json";
///   }
///
/// `#` starts a comment. The class block is optional; forbid paths are
/// relative to the spec file.
struct SpecFile {
  Language language;
  std::optional<ClassSpec> cls;
};

/// Throws ParseError with the byte offset, SortError for bad symbols.
SpecFile parse_spec(std::string_view text, const std::filesystem::path& base_dir = {});
SpecFile load_spec(const std::filesystem::path& path);

/// {"sorts": {S: [names]}, "relations": {R: [[names]...]},
///  "functions": {f: {"a,b": name}}, "constants": {c: name}}.
/// Function keys join argument names with commas, or are JSON arrays of
/// names when a name contains a comma.
Json structure_to_json(const FiniteStructure& m);
/// Relations not listed are false; functions and constants must be total.
FiniteStructure structure_from_json(const Json& j, const Language& lang);
FiniteStructure load_structure(const std::filesystem::path& path, const Language& lang);

/// Element by name in any sort (the first sort that has it).
Elem element_by_name(const FiniteStructure& m, const std::string& name);
/// Comma-separated element names; empty text is the empty set.
ElemSet parse_element_set(const FiniteStructure& m, const std::string& text);
Json element_set_json(const FiniteStructure& m, const ElemSet& s);

/// Embedding as {sort: {source name: target name}}.
Json embedding_to_json(const FiniteStructure& from, const FiniteStructure& to, const Embedding& e);
Json amalgam_problem_json(const AmalgamProblem& p);

}  // namespace fusionlab
