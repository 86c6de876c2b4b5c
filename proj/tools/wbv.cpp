// wbv: command-line front end for the weighted-BV lab.
//
//   wbv run <config.toml|config.json> [--out DIR] [--timing]
//   wbv suite [--criteria 1,2,...] [--out DIR] [--timing]
//   wbv fixtures [--json]
//   wbv <kind> [--weight ..] [--function ..] [--lower ..] [--upper ..] ...
//
// Exit status: 0 all checks pass, 1 a check failed, 2 bad usage or config,
// 3 a module raised an error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wbv/cli/runner.hpp"

namespace {

using namespace wbv::cli;

struct KindFlags {
  std::string weight, function, shape, measure, fixture, name, out, source;
  std::vector<double> lower, upper;
  std::vector<int> resolution;
  std::vector<std::string> params;
  double expect = 0.0, tolerance = 0.0;
  bool has_expect = false, relative = false, timing = false;
};

/// key=value; the value is read as JSON when it parses, else as a string.
void put_param(Json& params, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw SpecError("--param expects key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq), text = kv.substr(eq + 1);
  Json v = Json::parse(text, nullptr, false);
  params[key] = v.is_discarded() ? Json(text) : v;
}

Json config_from_flags(const std::string& kind, const KindFlags& f) {
  Json j;
  j["kind"] = kind;
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) j[k] = v;
  };
  put("name", f.name);
  put("fixture", f.fixture);
  put("weight", f.weight);
  put("function", f.function);
  put("shape", f.shape);
  put("measure", f.measure);
  put("output", f.out);
  if (!f.lower.empty()) j["grid"]["lower"] = f.lower;
  if (!f.upper.empty()) j["grid"]["upper"] = f.upper;
  if (!f.resolution.empty()) j["grid"]["resolution"] = f.resolution;
  if (!f.params.empty()) {
    Json p = Json::object();
    for (const std::string& kv : f.params) put_param(p, kv);
    j["params"] = p;
  }
  if (f.has_expect) {
    j["expect"]["value"] = f.expect;
    if (!f.source.empty()) j["expect"]["source"] = f.source;
    if (f.tolerance != 0.0) j["expect"]["tolerance"] = f.tolerance;
    j["expect"]["relative"] = f.relative;
  } else if (!f.source.empty() || f.tolerance != 0.0 || f.relative) {
    throw SpecError("--source, --tolerance and --relative need --expect");
  }
  if (f.timing) j["timing"] = true;
  return j;
}

int list_fixtures(bool as_json) {
  if (as_json) {
    Json a = Json::array();
    for (const FixtureInfo& f : catalog()) {
      Json e;
      e["name"] = f.name;
      e["kind"] = f.kind;
      e["anchor"] = f.anchor;
      if (!f.weight.empty()) e["weight"] = f.weight;
      if (!f.function.empty()) e["function"] = f.function;
      if (!f.measure.empty()) e["measure"] = f.measure;
      e["lower"] = nums(f.lower);
      e["upper"] = nums(f.upper);
      if (f.expected) {
        e["expected"] = num(f.expected->value);
        e["source"] = to_string(f.expected->source);
        e["tolerance"] = num(f.expected->tolerance);
        e["relative"] = f.expected->relative;
      }
      a.push_back(e);
    }
    std::cout << a.dump(2) << "\n";
    return exit_ok;
  }
  for (const FixtureInfo& f : catalog()) {
    std::cout << f.name << "  [" << f.kind << "]  " << f.anchor;
    if (f.expected)
      std::cout << "  expected " << format_double(f.expected->value) << " (" << to_string(f.expected->source) << ")";
    std::cout << "\n";
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wbv: weighted bounded-variation numerical lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path, out_dir;
  bool timing = false;
  CLI::App* run = app.add_subcommand("run", "run an experiment config (TOML, or JSON by extension)");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_flag("--timing", timing, "record runtimes (reports are then no longer byte-stable)");

  std::vector<int> suite_ids;
  std::string suite_out = "wbv-out/suite";
  bool suite_timing = false;
  CLI::App* suite = app.add_subcommand("suite", "run the acceptance criteria");
  suite->add_option("--criteria", suite_ids, "criterion ids (default: all)")->delimiter(',');
  suite->add_option("--out", suite_out, "output directory");
  suite->add_flag("--timing", suite_timing, "record runtimes");

  bool fixtures_json = false;
  CLI::App* fixtures = app.add_subcommand("fixtures", "list the built-in fixtures");
  fixtures->add_flag("--json", fixtures_json, "print as JSON");

  KindFlags kf;
  std::vector<CLI::App*> kind_cmds;
  for (const std::string& k : kinds()) {
    if (k == "suite") continue;
    CLI::App* c = app.add_subcommand(k, "run a single " + k + " experiment");
    c->add_option("--fixture", kf.fixture, "start from a built-in fixture");
    c->add_option("--weight", kf.weight, "weight spec, e.g. power(alpha=-0.5)");
    c->add_option("--function", kf.function, "function spec, e.g. indicator(0, 1)");
    c->add_option("--shape", kf.shape, "set spec, e.g. disk(center=[0,0], radius=1)");
    c->add_option("--measure", kf.measure, "measure spec, e.g. dirac(at=0)");
    c->add_option("--lower", kf.lower, "domain lower corner")->delimiter(',');
    c->add_option("--upper", kf.upper, "domain upper corner")->delimiter(',');
    c->add_option("--resolution", kf.resolution, "cells per axis")->delimiter(',');
    c->add_option("--param", kf.params, "kind parameter key=value (repeatable)");
    c->add_option("--expect", kf.expect, "expected value")->each([&](const std::string&) { kf.has_expect = true; });
    c->add_option("--source", kf.source, "published | definition | oracle");
    c->add_option("--tolerance", kf.tolerance, "tolerance for --expect");
    c->add_flag("--relative", kf.relative, "compare relative to the expected value");
    c->add_option("--name", kf.name, "experiment name");
    c->add_option("--out", kf.out, "output directory");
    c->add_flag("--timing", kf.timing, "record runtimes");
    kind_cmds.push_back(c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*fixtures) return list_fixtures(fixtures_json);
    ExperimentConfig cfg;
    if (*run) {
      cfg = parse_config(load_config_file(config_path));
      if (!out_dir.empty()) cfg.output = out_dir;
      cfg.timing = cfg.timing || timing;
    } else if (*suite) {
      Json j{{"kind", "suite"}, {"name", "suite"}, {"output", suite_out}, {"timing", suite_timing}};
      if (!suite_ids.empty()) j["params"]["criteria"] = suite_ids;
      cfg = parse_config(j);
    } else {
      for (CLI::App* c : kind_cmds)
        if (*c) cfg = parse_config(config_from_flags(c->get_name(), kf));
    }
    return run_and_write(cfg);
  } catch (const SpecError& e) {
    std::cerr << "wbv: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "wbv: " << e.what() << "\n";
    return exit_numeric;
  }
}
