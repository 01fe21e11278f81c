#include <algorithm>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "fusionlab/catalog.hpp"
#include "fusionlab/io.hpp"

namespace cli {

ClassSpec resolve_class(const std::string& ref) {
  if (std::filesystem::is_regular_file(ref)) {
    SpecFile f = load_spec(ref);
    if (!f.cls) throw UsageError(ref + " has no class block");
    return *f.cls;
  }
  return builtin_class(ref);
}

Language resolve_language(const std::string& ref) {
  if (std::filesystem::is_regular_file(ref)) return load_spec(ref).language;
  return builtin_class(ref).language();
}

FusionSpec resolve_family(const std::vector<std::string>& refs) {
  if (refs.size() == 1 && refs[0] == "hypergraph-fusion") return hypergraph_fusion();
  if (refs.size() < 2) throw UsageError("a family needs 'hypergraph-fusion' or at least two member classes");
  FusionSpec out;
  std::vector<Language> langs;
  for (const auto& r : refs) {
    out.members.push_back(resolve_class(r));
    langs.push_back(out.members.back().language());
  }
  out.family = make_language_family(langs);
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<Variable> pick_variables(const Formula& f, const std::string& names) {
  std::vector<Variable> out;
  auto free = free_variables(f);
  for (const auto& n : split_list(names)) {
    auto it = std::find_if(free.begin(), free.end(), [&](const Variable& v) { return v.name == n; });
    if (it == free.end()) throw UsageError("'" + n + "' is not a free variable of the formula");
    out.push_back(*it);
  }
  return out;
}

}  // namespace cli
