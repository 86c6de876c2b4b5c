#pragma once

// Named fixtures. Each catalog entry is plain spec text, so a config may say
// `fixture = "step-remark"` and inherit weight, function and domain. The
// suite builders produce the randomized and scaled families used by the
// acceptance battery.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wbv/analysis.hpp"
#include "wbv/bv1d.hpp"
#include "wbv/cli/spec_parser.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"
#include "wbv/core/shape.hpp"
#include "wbv/core/weight.hpp"

namespace wbv::cli {

/// Where an expected value comes from: quoted from the source result,
/// forced by a definition, or computed here by an independent oracle.
enum class Source { published, definition, oracle };

inline const char* to_string(Source s) {
  switch (s) {
    case Source::published: return "published";
    case Source::definition: return "definition";
    case Source::oracle: return "oracle";
  }
  return "unknown";
}

inline Source parse_source(const std::string& s) {
  if (s == "published") return Source::published;
  if (s == "definition") return Source::definition;
  if (s == "oracle") return Source::oracle;
  throw SpecError("source must be published, definition or oracle, not '" + s + "'");
}

struct Expected {
  double value = 0.0;
  Source source = Source::oracle;
  double tolerance = 1e-9;
  bool relative = false;
};

struct FixtureInfo {
  std::string name;
  std::string kind;    ///< the experiment kind its expected value belongs to
  std::string anchor;  ///< the example it reproduces, in words
  std::string weight;
  std::string function;  ///< 1-D function, grid function or set spec; may be empty
  std::string measure;   ///< for maxfn / mf fixtures
  std::vector<double> lower, upper;
  std::optional<Expected> expected;
};

/// Sorted by name; stable across runs.
inline const std::vector<FixtureInfo>& catalog() {
  static const std::vector<FixtureInfo> list = [] {
    const std::string step = "step(threshold=0, low=1, high=2, axis=0)";
    std::vector<FixtureInfo> v = {
        {"continuous-remark", "bv1d", "continuous weight x^2+2 with the same jump set: smoothing is exact",
         "expr(x^2+2)", "indicator(0, 1)", "", {-2}, {2}, Expected{5.0, Source::definition, 1e-9}},
        {"delta0", "mf", "Dirac mass at the origin: M mu = 1/|x|, K = 0", "", "", "dirac(at=[0])", {-1}, {1},
         Expected{0.0, Source::oracle, 1e-12}},
        {"embed-linear", "embed", "subgraph of the continuous weight x+2 over (-1, 2)", "expr(x+2)",
         "indicator(0, 1)", "", {-1}, {2}, Expected{5.0, Source::oracle, 2e-2, true}},
        {"embed-step", "embed", "subgraph of the step weight: both perimeters equal 3", step,
         "indicator(0, 1)", "", {-2}, {2}, Expected{3.0, Source::oracle, 1e-12}},
        {"geometric", "mf", "unbounded exponential atom train: maximal function infinite", "", "",
         "geometric(base=2)", {-1}, {1}, std::nullopt},
        {"lebesgue", "mf", "Lebesgue measure: K = 1 at every probe", "", "", "lebesgue", {-1}, {1},
         Expected{1.0, Source::oracle, 1e-3}},
        {"power-a1", "a1", "A1 constant of |x|^(-1/2) over all intervals", "power(alpha=-0.5)", "", "",
         {-1}, {1}, Expected{1.0 + std::sqrt(2.0), Source::oracle, 2e-2, true}},
        {"power-interval", "perimeter", "interval (0, 1) under |x|^(-1/2): infinite perimeter",
         "power(alpha=-0.5)", "interval(0, 1)", "", {-2}, {2}, Expected{kInf, Source::published, 1e-12}},
        {"radial-disk", "gns", "unit disk under (1+|x|)^(-1/2)", "radial(profile=(1+r)^-0.5)",
         "disk(center=[0, 0], radius=1)", "", {-2, -2}, {2, 2}, std::nullopt},
        {"slab", "perimeter", "slab under a weight decaying like |x|^(-3/2): finite weighted perimeter",
         "radial(profile=if(r<=1, 1, r^-1.5), breaks=[1])", "box(lower=[-2048, -1], upper=[2048, 1])", "",
         {-1024, -2}, {1024, 2}, std::nullopt},
        {"step-a1", "a1", "A1 constant of the step weight", step, "", "", {-1}, {1},
         Expected{2.0, Source::oracle, 1e-2, true}},
        {"step-remark", "bv1d", "step weight with the indicator of (0, 1): variation 3, not approximable",
         step, "indicator(0, 1)", "", {-2}, {2}, Expected{3.0, Source::published, 1e-12}},
        {"tent-affine", "coarea", "tent under |x|+1: coarea integral 3", "expr(abs(x)+1)",
         "tent(center=0, half_width=1)", "", {-2}, {2}, Expected{3.0, Source::oracle, 1e-2, true}},
        {"tent-unit", "coarea", "tent under w = 1: coarea integral 2", "const(1)", "tent(center=0, half_width=1)",
         "", {-2}, {2}, Expected{2.0, Source::definition, 1e-2, true}},
        {"unit-disk", "gns", "unit disk, w = 1: norm over variation is 1/(2 sqrt pi)", "const(1)",
         "disk(center=[0, 0], radius=1)", "", {-2, -2}, {2, 2},
         Expected{0.5 / std::sqrt(std::numbers::pi), Source::oracle, 2e-2, true}},
        {"unit-interval", "perimeter", "interval (0, 1) under w = 1: perimeter 2", "const(1)", "interval(0, 1)",
         "", {-2}, {2}, Expected{2.0, Source::definition, 1e-12}},
        {"unit-square", "isoperimetric", "unit square, w = 1: area 1 against perimeter 4", "const(1)",
         "box(lower=[0, 0], upper=[1, 1])", "", {-2, -2}, {2, 2}, Expected{0.25, Source::oracle, 1e-6, true}},
    };
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return v;
  }();
  return list;
}

inline const FixtureInfo& find_fixture(const std::string& name) {
  for (const FixtureInfo& f : catalog())
    if (f.name == name) return f;
  throw SpecError("unknown fixture '" + name + "' (see `wbv fixtures`)");
}

inline BoxDomain fixture_domain(const FixtureInfo& f) { return BoxDomain(f.lower, f.upper); }

// ---------------------------------------------------------------------------
// Lower-semicontinuity sequences.

struct LscFixture {
  std::string name;
  Weight w;
  GridFunction limit;
  std::vector<GridFunction> sequence;
};

namespace fixture_detail {

inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline GridFunction sampled(const PiecewiseFunction1D& f, const Grid& g) {
  return sample([&](const Point& x) { return f(x[0]); }, g);
}

/// 0 -> 1 linearly over [a0, a1], 1 -> 0 over [b0, b1].
inline GridFunction ramp_box(double a0, double a1, double b0, double b1, const Grid& g) {
  return sampled(PiecewiseFunction1D::interpolant({a0, a1, b0, b1}, {0.0, 1.0, 1.0, 0.0}), g);
}

inline const std::vector<int>& lsc_orders() {
  static const std::vector<int> k = {4, 8, 16, 32, 64};
  return k;
}

}  // namespace fixture_detail

inline Grid lsc_grid() { return make_grid(BoxDomain::interval(-2.0, 2.0), {2048}); }

/// 20 sequences on a 2048-cell grid over (-2, 2), k in {4, ..., 64}:
/// six ramped indicators of (0, 1) under the step weight (ramps of width
/// c/k on either side of each jump), eight oscillating perturbations
/// f + (a/k) sin(k pi x) of f = m tanh(x) under random smooth positive
/// weights with a pi >= 2m, and six indicators whose left end moves inward
/// by 1/k under nondecreasing weights.
inline std::vector<LscFixture> lsc_fixtures(std::uint64_t seed = 20240611) {
  using fixture_detail::ramp_box;
  const Grid g = lsc_grid();
  const Weight step = Weight::step(0.0, 1.0, 2.0);
  std::vector<LscFixture> out;

  struct Ramp {
    const char* name;
    double up0, up1, dn0, dn1;  // offsets in units of 1/k
  };
  const Ramp ramps[] = {{"outside", -1, 0, 0, 1},  {"inside", 0, 1, -1, 0},
                        {"centred", -0.5, 0.5, -0.5, 0.5}, {"left", -1, 0, -1, 0},
                        {"right", 0, 1, 0, 1},     {"wide", -1, 1, -1, 1}};
  const GridFunction chi = indicator(ShapeSet::interval(0.0, 1.0), g);
  for (const Ramp& r : ramps) {
    LscFixture fx{std::string("remark-") + r.name, step, chi, {}};
    for (int k : fixture_detail::lsc_orders()) {
      const double d = 1.0 / k;
      fx.sequence.push_back(ramp_box(r.up0 * d, r.up1 * d, 1.0 + r.dn0 * d, 1.0 + r.dn1 * d, g));
    }
    out.push_back(std::move(fx));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 8; ++i) {
    const double c1 = 0.2 + 0.7 * u(rng), q = 0.5 + 3.0 * u(rng), phi = 6.28 * u(rng);
    const double m = 0.2 + 1.8 * u(rng);
    const std::string ws = "1+" + fixture_detail::fmt6(c1) + "+" + fixture_detail::fmt6(c1) +
                           "*cos(" + fixture_detail::fmt6(q) + "*x+" + fixture_detail::fmt6(phi) + ")";
    const Weight w = Weight::expression(Expr(ws));
    const double a = 1.25 * 2.0 * m / std::numbers::pi;
    const GridFunction f = sample([m](const Point& x) { return m * std::tanh(x[0]); }, g);
    LscFixture fx{"oscillation-" + std::to_string(i), w, f, {}};
    for (int k : fixture_detail::lsc_orders())
      fx.sequence.push_back(sample(
          [m, a, k](const Point& x) {
            return m * std::tanh(x[0]) + a / k * std::sin(k * std::numbers::pi * x[0]);
          },
          g));
    out.push_back(std::move(fx));
  }

  struct Shift {
    const char* name;
    Weight w;
    double a, b;
  };
  const Shift shifts[] = {
      {"step-unit", step, 0.0, 1.0},
      {"step-left", step, -1.0, 0.0},
      {"rational", Weight::expression(Expr("2+x/(1+abs(x))")), -1.0, 1.0},
      {"exp", Weight::expression(Expr("exp(x/2)")), 0.0, 1.5},
      {"hinge", Weight::expression(Expr("1+max(0, x)")), -0.5, 0.5},
      {"step-wide", Weight::step(0.5, 1.0, 3.0), -1.5, 1.5},
  };
  for (const Shift& s : shifts) {
    LscFixture fx{std::string("shift-") + s.name, s.w, indicator(ShapeSet::interval(s.a, s.b), g), {}};
    for (int k : fixture_detail::lsc_orders())
      fx.sequence.push_back(indicator(ShapeSet::interval(s.a + 1.0 / k, s.b), g));
    out.push_back(std::move(fx));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted GNS suite: ten 2-D members on (-2, 2)^2 and five held-out
// members obtained by shrinking.

inline Grid gns_grid(int n = 256) { return make_grid(BoxDomain::cube(2, -2.0, 2.0), {n, n}); }

inline Weight decay_weight() {
  return Weight::radial([](double r) { return 1.0 / std::sqrt(1.0 + r); }, "(1+r)^-0.5");
}

inline std::vector<GnsFixture> gns_suite(int n = 256) {
  const Grid g = gns_grid(n);
  const Weight one = Weight::constant(1.0);
  const Weight step = Weight::step(0.0, 1.0, 2.0);
  const Weight power = Weight::power(-0.5);
  const Weight decay = decay_weight();
  const Weight quad = Weight::expression(Expr("1+x^2"));
  auto f = [&](const char* src) {
    const Expr e(src);
    return sample([e](const Point& x) { return e(x, 2); }, g);
  };
  std::vector<GnsFixture> s;
  s.push_back({"disk", one, SetIndicator{ShapeSet::disk(Point{0, 0, 0}, 1.0), g}, false});
  s.push_back({"disk-decay", decay, SetIndicator{ShapeSet::disk(Point{0, 0, 0}, 1.0), g}, false});
  s.push_back({"square", one, SetIndicator{ShapeSet::box(2, Point{0, 0, 0}, Point{1, 1, 0}), g}, false});
  s.push_back({"disk-power", power, SetIndicator{ShapeSet::disk(Point{0.3, 0.2, 0}, 1.0), g}, false});
  s.push_back({"ellipse-step", step, SetIndicator{ShapeSet::ellipse(Point{0.2, 0, 0}, 1.2, 0.6), g}, false});
  s.push_back({"annulus-quadratic", quad,
               SetIndicator{ShapeSet::implicit(
                                2, [](const Point& x) { return std::fabs(norm(x, 2) - 0.9) - 0.4; },
                                "annulus(0.5, 1.3)"),
                            g},
               false});
  s.push_back({"gaussian", one, f("exp(-(x^2+y^2)/0.2)"), true});
  s.push_back({"gaussian-decay", decay, f("exp(-2*r^2)"), true});
  s.push_back({"bump-power", power, f("max(0, 1-r^2)^2"), false});
  s.push_back({"pyramid-step", step, f("max(0, 1-max(abs(x), abs(y)))"), false});
  return s;
}

inline std::vector<GnsFixture> gns_held_out(const std::vector<GnsFixture>& suite) {
  const std::pair<const char*, double> picks[] = {
      {"disk", 0.5}, {"square", 0.25}, {"ellipse-step", 0.5}, {"gaussian-decay", 0.5}, {"pyramid-step", 0.75}};
  std::vector<GnsFixture> out;
  for (const auto& [name, s] : picks)
    for (const GnsFixture& fx : suite)
      if (fx.name == name) out.push_back(shrunk(fx, s));
  return out;
}

// ---------------------------------------------------------------------------
// Smooth 2-D fixtures on (-1, 1)^2 for the variation-measure identity.

struct StructureFixture {
  std::string name;
  std::string f;
  Weight w;
};

inline std::vector<StructureFixture> structure_fixtures() {
  return {
      {"gaussian-unit", "exp(-(x^2+y^2)/0.2)", Weight::constant(1.0)},
      {"quadratic", "x^2+y", Weight::expression(Expr("1+x^2"))},
      {"trig-decay", "sin(2*x)*cos(y)", decay_weight()},
      {"gaussian-power", "exp(-r^2)", Weight::power(-0.5)},
      {"bilinear-step", "x*y+0.3*x", Weight::step(0.0, 1.0, 2.0)},
  };
}

inline BoxDomain structure_domain() { return BoxDomain::cube(2, -1.0, 1.0); }

}  // namespace wbv::cli
