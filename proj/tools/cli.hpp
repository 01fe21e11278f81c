#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fusionlab/class_spec.hpp"
#include "fusionlab/error.hpp"
#include "fusionlab/fraisse.hpp"
#include "fusionlab/report.hpp"

namespace cli {

using namespace fusionlab;

struct Context {
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string report_path;
  bool machine = false;
  bool timing = false;
  std::function<Report()> run;
};

/// Bad arguments that CLI11 cannot see (exit 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A spec file path, or a built-in class name.
ClassSpec resolve_class(const std::string& ref);
Language resolve_language(const std::string& ref);
/// "hypergraph-fusion", or two or more class references.
FusionSpec resolve_family(const std::vector<std::string>& refs);
/// Free variables of f named in the comma-separated list, in list order.
std::vector<Variable> pick_variables(const Formula& f, const std::string& names);
std::vector<std::string> split_list(const std::string& text);

void register_logic(CLI::App& app, Context& ctx);
void register_fraisse(CLI::App& app, Context& ctx);
void register_closure(CLI::App& app, Context& ctx);
void register_interp(CLI::App& app, Context& ctx);

}  // namespace cli
