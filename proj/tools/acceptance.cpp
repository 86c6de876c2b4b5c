// Acceptance battery: one PASS/FAIL line per criterion.
//
// Without --known-failures the exit status is 0 iff every criterion passes.
// With it, the status is 0 iff the failing set equals the listed set.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wbv/cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace wbv::cli;
  CLI::App app{"wbv-acceptance: run every acceptance criterion"};
  std::string known_path, out_dir;
  bool timing = false;
  app.add_option("--known-failures", known_path, "TOML list of documented failures");
  app.add_option("--out", out_dir, "also write report.json and traces here");
  app.add_flag("--timing", timing, "print per-criterion runtime");
  CLI11_PARSE(app, argc, argv);

  KnownFailures known;
  try {
    if (!known_path.empty()) known = load_known_failures(known_path);
  } catch (const std::exception& e) {
    std::cerr << "wbv-acceptance: " << e.what() << "\n";
    return exit_usage;
  }

  std::vector<CriterionResult> results;
  Json list = Json::array();
  for (const Criterion& c : criteria()) {
    results.push_back(run_criterion(c));
    const CriterionResult& r = results.back();
    std::cout << summary_line(r);
    if (timing) std::cout << " [" << format_double(r.seconds) << " s]";
    std::cout << std::endl;
    list.push_back(to_json(r, timing));
  }
  int passed = 0;
  for (const CriterionResult& r : results) passed += r.pass() ? 1 : 0;
  std::cout << passed << "/" << results.size() << " criteria pass\n";

  if (!out_dir.empty()) {
    Json rep;
    rep["wbv"] = kVersion;
    rep["criteria"] = list;
    write_json(std::filesystem::path(out_dir) / "report.json", rep);
    for (const CriterionResult& r : results)
      for (CsvTrace t : r.traces) {
        t.name = "c" + std::to_string(r.id) + "_" + t.name;
        write_trace(out_dir, t);
      }
  }
  return suite_exit(results, known);
}
