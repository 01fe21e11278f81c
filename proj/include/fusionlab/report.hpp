#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fusionlab/io.hpp"

namespace fusionlab {

struct Verdict {
  std::string name;
  bool passed = true;
  int size_limit = -1;  // -1 when no size bound applies
  std::string detail;
  Json witness;  // null when there is none
};

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;  // scope statements, headers
  std::vector<Verdict> verdicts;
  Json data = Json::object();  // command output that is not a verdict
  std::optional<std::int64_t> elapsed_ms;  // only emitted when set

  bool failed() const;
  Verdict& add(std::string name, bool passed, int size_limit = -1, std::string detail = {});
};

/// Human-readable rendering: header, one PASS/FAIL line per verdict with
/// the witness indented below it, then the data block.
void write_text(std::ostream& out, const Report& r);
/// Fixed key order: command, seed, notes, verdicts, data, elapsed_ms.
Json machine_report(const Report& r);

}  // namespace fusionlab
