#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "wbv/cli/runner.hpp"

using namespace wbv;
using namespace wbv::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("wbv_cli_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig config(const std::string& toml) { return parse_config(parse_toml_text(toml)); }

}  // namespace

TEST(SpecParser, SplitsCallsAtTopLevel) {
  const Call c = parse_call("step(threshold=0, low=1, high=if(x<0, 1, 2))");
  EXPECT_EQ(c.name, "step");
  EXPECT_EQ(c.named.at("threshold"), "0");
  EXPECT_EQ(c.named.at("high"), "if(x<0, 1, 2)");
  const Call d = parse_call("indicator(0, 1)");
  ASSERT_EQ(d.positional.size(), 2u);
  EXPECT_EQ(d.arg("b", 1), "1");
  EXPECT_THROW(parse_call("step(0"), SpecError);
}

TEST(SpecParser, ComparisonIsNotAnAssignment) {
  const Call c = parse_call("expr(x<=1)");
  EXPECT_TRUE(c.named.empty());
  ASSERT_EQ(c.positional.size(), 1u);
}

TEST(SpecParser, NumbersAreExpressions) {
  EXPECT_DOUBLE_EQ(parse_number("1/3 + 2/3"), 1.0);
  EXPECT_NEAR(parse_number("sqrt(2)"), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(parse_number("nonsense("), std::invalid_argument);
}

TEST(SpecParser, Weights) {
  EXPECT_DOUBLE_EQ(parse_weight("const(2)")(0.0), 2.0);
  EXPECT_DOUBLE_EQ(parse_weight("power(alpha=-0.5)")(4.0), 0.5);
  EXPECT_DOUBLE_EQ(parse_weight("step(threshold=0, low=1, high=2)")(0.5), 2.0);
  EXPECT_DOUBLE_EQ(parse_weight("expr(1 + x^2)")(2.0), 5.0);
  EXPECT_DOUBLE_EQ(parse_weight("product(const(2), expr(1+x))")(1.0), 4.0);
  EXPECT_NEAR(parse_weight("radial(profile=1/sqrt(1+r))")(Point{3.0, 4.0, 0.0}), 1.0 / std::sqrt(6.0), 1e-15);
  EXPECT_EQ(parse_weight("const(1, a1=1.5)").known_a1(1), 1.5);
  EXPECT_THROW(parse_weight("const(1, bogus=2)"), SpecError);
  EXPECT_THROW(parse_weight("unknown(1)"), SpecError);
}

TEST(SpecParser, ShapesAndMeasures) {
  EXPECT_TRUE(parse_shape("disk(center=[0, 0], radius=1)", 2).contains(Point{0.5, 0.5, 0}));
  EXPECT_TRUE(parse_shape("intervals([0, 1], [2, 3])", 1).contains(Point{2.5, 0, 0}));
  EXPECT_TRUE(parse_shape("box(lower=[0,0], upper=[1,2])", 2).contains(Point{0.5, 1.5, 0}));
  EXPECT_THROW(parse_shape("disk(center=[0, 0], radius=1)", 3), SpecError);
  EXPECT_DOUBLE_EQ(parse_measure("dirac(at=0.5)", 1).mass(Ball{{0.5, 0, 0}, 0.1}), 1.0);
  EXPECT_DOUBLE_EQ(parse_measure("atoms(at=[0, 1], mass=[2, 3])", 1).interval_mass(-1, 2), 5.0);
}

TEST(SpecParser, OneDimensionalFunctions) {
  const Weight one = Weight::constant(1.0);
  EXPECT_DOUBLE_EQ(variation_1d(parse_function_1d("indicator(0, 1)"), one, -2, 2), 2.0);
  EXPECT_NEAR(variation_1d(parse_function_1d("tent(center=0, half_width=1, height=1)"), one, -2, 2), 2.0, 1e-12);
  EXPECT_NEAR(variation_1d(parse_function_1d("interpolant(xs=[0, 1, 2], ys=[0, 3, 1])"), one, -2, 3), 5.0, 1e-12);
}

TEST(JsonIo, NonFiniteValuesRoundTrip) {
  EXPECT_EQ(num(kInf), Json("inf"));
  EXPECT_EQ(num(-kInf), Json("-inf"));
  EXPECT_EQ(num(NAN), Json("nan"));
  EXPECT_EQ(as_double(num(kInf), "v"), kInf);
  EXPECT_DOUBLE_EQ(as_double(Json(0.25), "v"), 0.25);
  EXPECT_THROW(as_double(Json::array(), "v"), SpecError);
}

// FNV-1a 64 reference vectors.
TEST(JsonIo, DigestMatchesReferenceVectors) {
  EXPECT_EQ(digest(std::string()), "cbf29ce484222325");
  EXPECT_EQ(digest(std::string("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(digest(std::string("foobar")), "85944171f73967e8");
}

TEST(JsonIo, TomlErrorsCarryPosition) {
  try {
    parse_toml_text("kind = \"a1\"\nweight = ", "cfg.toml");
    FAIL() << "expected a parse error";
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.toml:2:"), std::string::npos) << e.what();
  }
}

TEST(JsonIo, CsvRendersShortestRoundTrip) {
  const CsvTrace t{"x", {"a", "b"}, {{0.1, kInf}, {1.0, -2.5}}};
  EXPECT_EQ(t.render(), "a,b\n0.10000000000000001,inf\n1,-2.5\n");
}

TEST(Fixtures, CatalogIsSortedAndAnchored) {
  const auto& cat = catalog();
  ASSERT_FALSE(cat.empty());
  for (std::size_t i = 1; i < cat.size(); ++i) EXPECT_LT(cat[i - 1].name, cat[i].name);
  for (const FixtureInfo& f : cat) {
    EXPECT_FALSE(f.anchor.empty()) << f.name;
    EXPECT_EQ(f.lower.size(), f.upper.size()) << f.name;
    EXPECT_NE(std::find(kinds().begin(), kinds().end(), f.kind), kinds().end()) << f.name;
  }
  EXPECT_EQ(find_fixture("step-remark").expected->source, Source::published);
  EXPECT_THROW(find_fixture("nope"), SpecError);
}

TEST(Fixtures, SourcesParse) {
  for (Source s : {Source::published, Source::definition, Source::oracle}) EXPECT_EQ(parse_source(to_string(s)), s);
  EXPECT_THROW(parse_source("guess"), SpecError);
}

TEST(Config, FixtureFillsDefaults) {
  const ExperimentConfig c = config("kind = \"bv1d\"\nfixture = \"step-remark\"\n");
  EXPECT_EQ(c.name, "step-remark");
  EXPECT_FALSE(c.weight.empty());
  ASSERT_TRUE(c.expect.has_value());
  EXPECT_EQ(c.expect->value, 3.0);
  EXPECT_EQ(c.output, std::filesystem::path("wbv-out") / "step-remark");
}

TEST(Config, ExpectationOnlyFollowsMatchingKind) {
  // step-remark is a bv1d fixture; as a perimeter run it carries no target.
  const ExperimentConfig c = config("kind = \"perimeter\"\nfixture = \"step-remark\"\n");
  EXPECT_FALSE(c.expect.has_value());
}

TEST(Config, RejectsInvalidInput) {
  EXPECT_THROW(config("weight = \"const(1)\"\n"), SpecError);                            // no kind
  EXPECT_THROW(config("kind = \"frob\"\n"), SpecError);                                   // unknown kind
  EXPECT_THROW(config("kind = \"bv1d\"\nfixture = \"step-remark\"\nextra = 1\n"), SpecError);  // unknown key
  EXPECT_THROW(config("kind = \"a1\"\nfixture = \"power-a1\"\n[params]\nk = [1]\n"), SpecError);
  EXPECT_THROW(config("kind = \"a1\"\nweight = \"const(1)\"\n"), SpecError);              // no grid
  EXPECT_THROW(config("kind = \"a1\"\nfixture = \"power-a1\"\n[expect]\nvalue = 1\ntolerance = 0\n"), SpecError);
  EXPECT_THROW(config("kind = \"a1\"\nfixture = \"power-a1\"\n[grid]\nresolution = 1\n"), SpecError);
  EXPECT_THROW(config("kind = \"tv\"\nweight = \"const(1)\"\n[grid]\nlower = [0]\nupper = [1]\n"), SpecError);
  EXPECT_THROW(config("kind = \"bv1d\"\nfixture = \"step-remark\"\nname = \"a/b\"\n"), SpecError);
}

TEST(Config, JsonAndTomlAgree) {
  const ExperimentConfig t = config("kind = \"mf\"\nfixture = \"lebesgue\"\n[params]\nprobes = 3\n");
  const ExperimentConfig j =
      parse_config(parse_json_text(R"({"kind": "mf", "fixture": "lebesgue", "params": {"probes": 3}})"));
  EXPECT_EQ(t.inputs().dump(), j.inputs().dump());
}

TEST(Runner, ReportsAreByteStable) {
  const auto dir = scratch("stable");
  ExperimentConfig c = config("kind = \"bv1d\"\nfixture = \"step-remark\"\n[params]\nk = [4, 16]\n");
  c.output = dir / "a";
  std::ostringstream sink;
  EXPECT_EQ(run_and_write(c, sink), exit_ok);
  c.output = dir / "b";
  EXPECT_EQ(run_and_write(c, sink), exit_ok);
  const std::string a = slurp(dir / "a" / "report.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "report.json"));
  EXPECT_EQ(slurp(dir / "a" / "trace_mollified.csv"), slurp(dir / "b" / "trace_mollified.csv"));
  EXPECT_EQ(a.find("seconds"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Runner, FailedExpectationExitsOne) {
  ExperimentConfig c = config(
      "kind = \"bv1d\"\nfixture = \"step-remark\"\n[expect]\nvalue = 2\nsource = \"oracle\"\ntolerance = 1e-9\n");
  const RunOutcome r = run_experiment(c);
  EXPECT_EQ(r.exit_code, exit_check_failed);
  EXPECT_FALSE(r.report["summary"]["pass"].get<bool>());
  EXPECT_EQ(r.report["checks"][0]["source"], "oracle");
}

TEST(Runner, InfiniteValuesAreSerialised) {
  const RunOutcome r = run_experiment(config("kind = \"perimeter\"\nfixture = \"power-interval\"\n"));
  EXPECT_EQ(r.exit_code, exit_ok);
  EXPECT_EQ(r.report["value"], "inf");
}

TEST(Runner, ModuleErrorsAreEmbeddedWithExitThree) {
  // A grid too coarse for the requested radius.
  const RunOutcome r = run_experiment(config(
      "kind = \"mollify\"\nweight = \"power(alpha=-0.5)\"\nfunction = \"indicator(0, 1)\"\n"
      "[grid]\nlower = [-2]\nupper = [2]\nresolution = 64\n[params]\neps = [0.0125]\n"));
  EXPECT_EQ(r.exit_code, exit_numeric);
  ASSERT_TRUE(r.report.contains("error"));
  EXPECT_EQ(r.report["error"]["type"], "numeric");
}

TEST(Runner, EveryKindRunsFromItsFixture) {
  for (const FixtureInfo& f : catalog()) {
    if (f.kind == "gns") continue;  // covered by the acceptance run; the empirical constant is slow
    const RunOutcome r = run_experiment(config("kind = \"" + f.kind + "\"\nfixture = \"" + f.name + "\"\n"));
    EXPECT_NE(r.exit_code, exit_numeric) << f.name << ": " << r.report.dump();
    if (f.expected) {
      EXPECT_EQ(r.exit_code, exit_ok) << f.name << ": " << r.report["checks"].dump();
    }
  }
}

TEST(KnownFailures, StrictMatching) {
  const auto dir = scratch("known");
  write_text(dir / "k.toml", "[[failure]]\ncriterion = 8\nreason = \"documented\"\n");
  const KnownFailures k = load_known_failures(dir / "k.toml");
  ASSERT_EQ(k.size(), 1u);

  CriterionResult ok8 = acceptance_detail::start(8, "x");
  ok8.checks.push_back(check_true("c", true));
  CriterionResult bad8 = acceptance_detail::start(8, "x");
  bad8.checks.push_back(check_true("c", false));
  CriterionResult bad3 = acceptance_detail::start(3, "y");
  bad3.checks.push_back(check_true("c", false));
  std::ostringstream sink;
  EXPECT_EQ(suite_exit({bad8}, k, sink), exit_ok);
  EXPECT_EQ(suite_exit({bad8, bad3}, k, sink), exit_check_failed);
  EXPECT_EQ(suite_exit({ok8}, k, sink), exit_check_failed);  // a listed criterion that passes
  EXPECT_EQ(suite_exit({bad8}, {}, sink), exit_check_failed);

  write_text(dir / "bad.toml", "[[failure]]\ncriterion = 13\nreason = \"x\"\n");
  EXPECT_THROW(load_known_failures(dir / "bad.toml"), SpecError);
  write_text(dir / "bad2.toml", "[[failure]]\ncriterion = 8\n");
  EXPECT_THROW(load_known_failures(dir / "bad2.toml"), SpecError);
  std::filesystem::remove_all(dir);
}
