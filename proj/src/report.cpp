#include "fusionlab/report.hpp"

#include <algorithm>
#include <sstream>

namespace fusionlab {

bool Report::failed() const {
  return std::any_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return !v.passed; });
}

Verdict& Report::add(std::string name, bool passed, int size_limit, std::string detail) {
  verdicts.push_back(Verdict{std::move(name), passed, size_limit, std::move(detail), nullptr});
  return verdicts.back();
}

namespace {
void indented(std::ostream& out, const std::string& text, const char* pad) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out << pad << line << '\n';
}
}  // namespace

void write_text(std::ostream& out, const Report& r) {
  out << "command: " << r.command << '\n';
  out << "seed: " << r.seed << '\n';
  for (const auto& n : r.notes) out << "note: " << n << '\n';
  for (const auto& v : r.verdicts) {
    out << (v.passed ? "PASS " : "FAIL ") << v.name;
    if (v.size_limit >= 0) out << " (size <= " << v.size_limit << ")";
    if (!v.detail.empty()) out << ": " << v.detail;
    out << '\n';
    if (!v.witness.is_null()) indented(out, "witness: " + v.witness.dump(2), "    ");
  }
  if (!r.data.empty()) indented(out, r.data.dump(2), "");
  if (r.elapsed_ms) out << "elapsed: " << *r.elapsed_ms << " ms\n";
  out << (r.failed() ? "result: counterexample found" : "result: ok") << '\n';
}

Json machine_report(const Report& r) {
  Json j;
  j["command"] = r.command;
  j["seed"] = r.seed;
  j["notes"] = r.notes;
  j["verdicts"] = Json::array();
  for (const auto& v : r.verdicts) {
    Json e;
    e["name"] = v.name;
    e["status"] = v.passed ? "pass" : "fail";
    e["size_limit"] = v.size_limit >= 0 ? Json(v.size_limit) : Json(nullptr);
    e["detail"] = v.detail;
    e["witness"] = v.witness;
    j["verdicts"].push_back(e);
  }
  j["data"] = r.data;
  j["failed"] = r.failed();
  if (r.elapsed_ms) j["elapsed_ms"] = *r.elapsed_ms;
  return j;
}

}  // namespace fusionlab
