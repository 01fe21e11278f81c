#include <chrono>
#include <fstream>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace cli;
  CLI::App app{"Finite-structure workbench for fusions, amalgamation classes and interpretations", "fusionlab"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_option("--seed", ctx.seed, "Seed for randomized paths (default 0)");
  app.add_option("--jobs", ctx.jobs, "Worker threads (0 = hardware concurrency)");
  app.add_option("--report", ctx.report_path, "Also write the machine-readable report to this file");
  app.add_flag("--machine", ctx.machine, "Print the machine-readable report instead of text");
  app.add_flag("--timing", ctx.timing, "Include elapsed time in the report");
  register_logic(app, ctx);
  register_fraisse(app, ctx);
  register_closure(app, ctx);
  register_interp(app, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!ctx.run) {
    std::cerr << app.help();
    return 2;
  }

  Report report;
  auto start = std::chrono::steady_clock::now();
  try {
    report = ctx.run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::string echo = "fusionlab";
  for (int i = 1; i < argc; ++i) echo += std::string(" ") + argv[i];
  report.command = echo;
  report.seed = ctx.seed;
  if (ctx.timing) {
    report.elapsed_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }
  if (ctx.machine) {
    std::cout << machine_report(report).dump(2) << '\n';
  } else {
    write_text(std::cout, report);
  }
  if (!ctx.report_path.empty()) {
    std::ofstream out(ctx.report_path);
    if (!out) {
      std::cerr << "error: cannot write " << ctx.report_path << '\n';
      return 2;
    }
    out << machine_report(report).dump(2) << '\n';
  }
  return report.failed() ? 1 : 0;
}
