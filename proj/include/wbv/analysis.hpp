#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wbv/bv1d.hpp"
#include "wbv/core/errors.hpp"
#include "wbv/core/extended.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"
#include "wbv/core/parallel.hpp"
#include "wbv/core/shape.hpp"
#include "wbv/core/weight.hpp"
#include "wbv/variation.hpp"
#include "wbv/weights.hpp"

namespace wbv {

// ---------------------------------------------------------------------------
// Coarea.

struct CoareaReport {
  std::vector<double> levels;      ///< midpoints of a uniform partition of [min f, max f]
  std::vector<double> perimeters;  ///< weighted perimeter of {f > t} in the open box
  double spacing = 0.0;
  double integral = 0.0;           ///< midpoint rule over the levels
  double direct = 0.0;             ///< weighted variation of f
  std::optional<double> gap;       ///< |integral - direct| / direct; empty when infinite
};

namespace analysis_detail {

inline std::vector<double> midpoint_levels(double lo, double hi, int count, double& dt) {
  if (count < 2) throw std::invalid_argument("coarea needs at least 2 levels");
  dt = (hi - lo) / count;
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[i] = lo + (i + 0.5) * dt;
  return t;
}

inline void finish(CoareaReport& r) {
  std::vector<double> terms(r.perimeters.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = r.perimeters[i] * r.spacing;
  r.integral = pairwise_sum(terms);
  if (is_inf(r.integral) || is_inf(r.direct)) return;
  const double scale = std::max(std::fabs(r.direct), 1e-300);
  r.gap = std::fabs(r.integral - r.direct) / scale;
}

/// Points of (lo, hi) where x -> [f(x) > t] changes. Inside a piece the
/// change is bracketed on a uniform sample and bisected to machine precision.
inline std::vector<double> level_crossings(const PiecewiseFunction1D& f, double t, double lo,
                                           double hi, int samples) {
  std::vector<double> out;
  std::vector<double> edges{lo};
  for (double b : f.breakpoints())
    if (b > lo && b < hi) edges.push_back(b);
  edges.push_back(hi);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const Piece& piece = f.pieces()[f.piece_index(0.5 * (a + b))];
    auto above = [&](double x) { return piece.value(x) > t; };
    if (p > 0) {
      const Piece& left = f.pieces()[f.piece_index(0.5 * (edges[p - 1] + a))];
      if ((left.value(a) > t) != above(a)) out.push_back(a);
    }
    double x0 = a;
    bool s0 = above(a);
    for (int i = 1; i <= samples; ++i) {
      const double x1 = i == samples ? b : a + (b - a) * i / samples;
      const bool s1 = above(x1);
      if (s1 != s0) {
        double l = x0, r = x1;
        for (int it = 0; it < 200 && r - l > 0.0; ++it) {
          const double m = 0.5 * (l + r);
          if (m <= l || m >= r) break;
          (above(m) == s0 ? l : r) = m;
        }
        const double root = 0.5 * (l + r);
        if (root > lo && root < hi) out.push_back(root);
      }
      x0 = x1;
      s0 = s1;
    }
  }
  return out;
}

}  // namespace analysis_detail

/// Coarea on (lo, hi): midpoint quadrature of t -> P_w({f > t}) against
/// variation_1d.
inline CoareaReport coarea_check(const PiecewiseFunction1D& f, const Weight& w, double lo, double hi,
                                 int levels, int samples_per_piece = 256) {
  if (!(hi > lo)) throw std::invalid_argument("coarea interval must satisfy lo < hi");
  double fmin = kInf, fmax = -kInf;
  {
    std::vector<double> edges{lo};
    for (double b : f.breakpoints())
      if (b > lo && b < hi) edges.push_back(b);
    edges.push_back(hi);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const Piece& piece = f.pieces()[f.piece_index(0.5 * (edges[p] + edges[p + 1]))];
      for (int i = 0; i <= samples_per_piece; ++i) {
        const double v =
            piece.value(edges[p] + (edges[p + 1] - edges[p]) * i / samples_per_piece);
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
      }
    }
  }
  if (!std::isfinite(fmin) || !std::isfinite(fmax)) throw std::invalid_argument("f must be bounded");
  CoareaReport r;
  r.levels = analysis_detail::midpoint_levels(fmin, fmax, levels, r.spacing);
  r.perimeters.assign(r.levels.size(), 0.0);
  parallel_for(r.levels.size(), [&](std::size_t i) {
    std::vector<double> pts = analysis_detail::level_crossings(f, r.levels[i], lo, hi, samples_per_piece);
    std::vector<double> ws(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) ws[j] = w(pts[j]);
    r.perimeters[i] = pairwise_sum(ws);
  });
  r.direct = variation_1d(f, w, lo, hi);
  analysis_detail::finish(r);
  return r;
}

/// Grid version: the perimeter of {f > t} is weighted_tv of its indicator,
/// so the identity is exact up to the level quadrature in 1-D.
inline CoareaReport coarea_check(const GridFunction& f, const Weight& w, int levels) {
  if (!f.all_finite()) throw std::invalid_argument("coarea needs a bounded f");
  const auto [mn, mx] = std::minmax_element(f.values().begin(), f.values().end());
  const GridFunction ws = sample(w, f.grid());
  CoareaReport r;
  r.levels = analysis_detail::midpoint_levels(*mn, *mx, levels, r.spacing);
  r.perimeters.assign(r.levels.size(), 0.0);
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const double t = r.levels[i];
    r.perimeters[i] = weighted_tv(f.map([t](double v) { return v > t ? 1.0 : 0.0; }), ws).value;
  }
  r.direct = weighted_tv(f, ws).value;
  analysis_detail::finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Subgraph embedding.

/// Omega_w = {(x, y) : x in Omega, 0 < y < w(x)} on a lifted grid over
/// Omega x (0, height). A lifted cell is inside when its centre is; its
/// fraction is the exact share of its y-extent below w(x_c).
struct SubgraphScene {
  int n = 1;
  Grid base;
  Grid lifted;
  double height = 0.0;
  bool truncated = false;
  std::vector<double> heights;   ///< w at base centres, clipped to height
  std::vector<char> inside;      ///< per lifted cell
  std::vector<double> fraction;  ///< per lifted cell, in [0, 1]
  GridFunction base_f;
  GridFunction lifted_f;         ///< Jf(x, y) = f(x) on cells meeting Omega_w, 0 elsewhere

  std::size_t base_cell(std::size_t lifted_cell) const {
    return lifted_cell % base.size();
  }
};

namespace analysis_detail {

inline Grid lift_grid(const Grid& base, double height, int y_res) {
  std::vector<double> lo, hi;
  std::vector<int> res;
  for (int a = 0; a < base.dim(); ++a) {
    lo.push_back(base.domain().lower(a));
    hi.push_back(base.domain().upper(a));
    res.push_back(base.resolution(a));
  }
  lo.push_back(0.0);
  hi.push_back(height);
  res.push_back(y_res);
  return Grid(BoxDomain(lo, hi), res);
}

}  // namespace analysis_detail

/// Lifts f to Jf on Omega_w. Unbounded w needs an explicit truncation height.
inline SubgraphScene subgraph_embed(const GridFunction& f, const Weight& w, int y_res,
                                    std::optional<double> truncation = std::nullopt) {
  const Grid& base = f.grid();
  if (base.dim() + 1 > kMaxDim)
    throw std::invalid_argument("the lifted space must have dimension at most 3");
  if (y_res < 2) throw std::invalid_argument("y resolution must be at least 2");
  const GridFunction ws = sample(w, base);
  double top = 0.0;
  bool unbounded = w.unbounded_in(base.domain());
  for (double v : ws.values()) {
    unbounded = unbounded || is_inf(v);
    top = std::max(top, v);
  }
  double height = top;
  if (truncation) {
    if (!(*truncation > 0.0)) throw std::invalid_argument("truncation height must be positive");
    height = *truncation;
  } else if (unbounded) {
    throw std::invalid_argument("weight " + w.description() +
                                " is unbounded on the box; pass a truncation height");
  }
  const int n = base.dim();
  const Grid lifted = analysis_detail::lift_grid(base, height, y_res);
  std::vector<double> heights(base.size());
  for (std::size_t c = 0; c < base.size(); ++c) heights[c] = std::min(ws[c], height);
  const double hy = lifted.spacing(n);
  std::vector<char> inside(lifted.size(), 0);
  std::vector<double> fraction(lifted.size(), 0.0), jf(lifted.size(), 0.0);
  for (std::size_t c = 0; c < lifted.size(); ++c) {
    const std::size_t b = c % base.size();
    const int j = static_cast<int>(c / base.size());
    fraction[c] = std::clamp((heights[b] - lifted.face(n, j)) / hy, 0.0, 1.0);
    inside[c] = lifted.center(n, j) < heights[b] ? 1 : 0;
    if (fraction[c] > 0.0) jf[c] = f[b];
  }
  return SubgraphScene{n,
                       base,
                       lifted,
                       height,
                       truncation.has_value(),
                       std::move(heights),
                       std::move(inside),
                       std::move(fraction),
                       f,
                       GridFunction(lifted, std::move(jf))};
}

/// E_w = {(x, y) : x in E, 0 < y < w(x)}, with E sampled at base centres.
inline SubgraphScene subgraph_embed(const ShapeSet& e, const Weight& w, const Grid& base, int y_res,
                                    std::optional<double> truncation = std::nullopt) {
  return subgraph_embed(indicator(e, base), w, y_res, truncation);
}

struct IsometryReport {
  SubgraphScene scene;
  double base_variation = 0.0;    ///< weighted, in n dimensions
  double lifted_variation = 0.0;  ///< unweighted, inside Omega_w
  double variation_gap = 0.0;     ///< relative
  double base_l1 = 0.0;
  double lifted_l1 = 0.0;
  double l1_gap = 0.0;            ///< absolute
};

/// Unweighted variation of Jf inside the open set Omega_w: a difference counts
/// only across faces whose two cells are both inside.
inline double lifted_variation(const SubgraphScene& s) {
  const Grid& g = s.lifted;
  const double vol = g.cell_volume();
  std::vector<double> terms(g.size(), 0.0);
  parallel_for(g.size(), [&](std::size_t c) {
    if (!s.inside[c]) return;
    double q = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      if (!g.has_forward(c, a)) continue;
      const std::size_t nb = c + g.stride(a);
      if (!s.inside[nb]) continue;
      const double d = (s.lifted_f[nb] - s.lifted_f[c]) / g.spacing(a);
      q += d * d;
    }
    terms[c] = std::sqrt(q) * vol;
  });
  return pairwise_sum(terms);
}

namespace analysis_detail {

inline void fill_l1(IsometryReport& r, const Weight& w) {
  const SubgraphScene& s = r.scene;
  const double bvol = s.base.cell_volume(), lvol = s.lifted.cell_volume();
  std::vector<double> b(s.base.size()), l(s.lifted.size());
  for (std::size_t c = 0; c < b.size(); ++c)
    b[c] = measure_product(std::fabs(s.base_f[c]), s.truncated ? s.heights[c] : w(s.base.center(c))) * bvol;
  for (std::size_t c = 0; c < l.size(); ++c) l[c] = std::fabs(s.lifted_f[c]) * s.fraction[c] * lvol;
  r.base_l1 = pairwise_sum(b);
  r.lifted_l1 = pairwise_sum(l);
  r.l1_gap = std::fabs(r.base_l1 - r.lifted_l1);
}

inline double relative_gap(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

}  // namespace analysis_detail

/// Weighted perimeter of E in Omega against the unweighted perimeter of E_w
/// inside Omega_w.
inline IsometryReport isometry_check(const ShapeSet& e, const Weight& w, const Grid& base, int y_res,
                                     std::optional<double> truncation = std::nullopt) {
  IsometryReport r{subgraph_embed(e, w, base, y_res, truncation)};
  r.base_variation = weighted_perimeter(e, w, base.domain()).value;
  r.lifted_variation = lifted_variation(r.scene);
  r.variation_gap = analysis_detail::relative_gap(r.base_variation, r.lifted_variation);
  analysis_detail::fill_l1(r, w);
  return r;
}

/// weighted_tv(f, w) against the unweighted variation of Jf inside Omega_w.
inline IsometryReport isometry_check(const GridFunction& f, const Weight& w, int y_res,
                                     std::optional<double> truncation = std::nullopt) {
  IsometryReport r{subgraph_embed(f, w, y_res, truncation)};
  r.base_variation = weighted_tv(f, w).value;
  r.lifted_variation = lifted_variation(r.scene);
  r.variation_gap = analysis_detail::relative_gap(r.base_variation, r.lifted_variation);
  analysis_detail::fill_l1(r, w);
  return r;
}

// ---------------------------------------------------------------------------
// Weighted GNS and isoperimetric checks.

/// f given as the indicator of a set: integrals use cell quadrature on
/// `grid`, the variation is the set's weighted perimeter.
struct SetIndicator {
  ShapeSet set;
  Grid grid;
};

struct GnsFixture {
  std::string name;
  Weight w;
  std::variant<GridFunction, SetIndicator> f;
  bool approximable = false;

  int dim() const {
    return std::holds_alternative<GridFunction>(f) ? std::get<GridFunction>(f).grid().dim()
                                                   : std::get<SetIndicator>(f).grid.dim();
  }
  const Grid& grid() const {
    return std::holds_alternative<GridFunction>(f) ? std::get<GridFunction>(f).grid()
                                                   : std::get<SetIndicator>(f).grid;
  }
};

struct GnsOptions {
  std::optional<double> a1;  ///< overrides the weight's constant
  int a1_resolution = 64;    ///< lattice for estimating [w] when none is known
};

struct GnsReport {
  int n = 2;
  double one_star = 2.0;  ///< n / (n - 1)
  double lhs = 0.0;       ///< ||f||_{L^{1*}(w)}
  double rhs = 0.0;       ///< ||Df||_{w^{1/1*}}
  double a1 = 1.0;
  bool a1_known = false;
  double c1 = 0.0;
  double power = 1.0;     ///< 2/1*, or 1/1* under the approximable flag
  double residual = 0.0;  ///< c1 [w]^power rhs - lhs
  bool approximable = false;

  /// lhs / ([w]^power rhs), the smallest admissible c1 for this member.
  double required_c1() const {
    const double d = std::pow(a1, power) * rhs;
    if (d == 0.0) return lhs == 0.0 ? 0.0 : kInf;
    return lhs / d;
  }
};

namespace analysis_detail {

inline double one_star(int n) {
  if (n < 2) throw std::invalid_argument("1* = n/(n-1) needs n >= 2");
  return static_cast<double>(n) / (n - 1);
}

inline std::pair<double, bool> a1_for(const Weight& w, const Grid& grid, const GnsOptions& opt) {
  if (opt.a1) return {*opt.a1, true};
  if (auto k = w.known_a1(grid.dim())) return {*k, true};
  const Grid coarse = make_grid(grid.domain(), std::min(opt.a1_resolution, grid.resolution(0)));
  // Keyed by description and lattice: suites reuse a handful of weights and
  // each estimate costs seconds. Descriptions identify weights in this library.
  static std::mutex mu;
  static std::map<std::string, double> memo;
  std::string key = w.description();
  for (int a = 0; a < coarse.dim(); ++a)
    key += "|" + weight_detail::fmt(coarse.domain().lower(a)) + ":" +
           weight_detail::fmt(coarse.domain().upper(a)) + "/" + std::to_string(coarse.resolution(a));
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return {it->second, false};
  }
  const double est = estimate_a1_constant(w, coarse, BallFamily::dyadic());
  std::lock_guard lock(mu);
  memo.emplace(key, est);
  return {est, false};
}

inline GnsReport gns_core(int n, double lhs, double rhs, double a1, bool known, double c1,
                          bool approximable) {
  GnsReport r;
  r.n = n;
  r.one_star = one_star(n);
  r.lhs = lhs;
  r.rhs = rhs;
  r.a1 = a1;
  r.a1_known = known;
  r.c1 = c1;
  r.approximable = approximable;
  r.power = (approximable ? 1.0 : 2.0) / r.one_star;
  r.residual = c1 * std::pow(a1, r.power) * rhs - lhs;
  return r;
}

/// (integral over E of w)^(1/1*) and P(E) under w^(1/1*).
inline std::pair<double, double> set_sides(const ShapeSet& e, const Weight& w, const Grid& grid,
                                           double q) {
  std::vector<double> t(grid.size(), 0.0);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Point x = grid.center(c);
    if (e.contains(x)) t[c] = w(x) * grid.cell_volume();
  }
  const double mass = pairwise_sum(t);
  const double boundary =
      e.is_empty() ? 0.0 : weighted_perimeter(e, delta_weight(w, 1.0 / q), grid.domain()).value;
  return {std::pow(mass, 1.0 / q), boundary};
}

}  // namespace analysis_detail

inline GnsReport gns_check(const GridFunction& f, const Weight& w, double c1, bool approximable,
                           const GnsOptions& opt = {}) {
  const int n = f.grid().dim();
  const double q = analysis_detail::one_star(n);
  const GridFunction ws = sample(w, f.grid());
  std::vector<double> t(f.size());
  for (std::size_t c = 0; c < f.size(); ++c)
    t[c] = measure_product(std::pow(std::fabs(f[c]), q), ws[c]) * f.grid().cell_volume();
  const double lhs = std::pow(pairwise_sum(t), 1.0 / q);
  const double rhs = weighted_tv(f, delta_weight(w, 1.0 / q)).value;
  const auto [a1, known] = analysis_detail::a1_for(w, f.grid(), opt);
  return analysis_detail::gns_core(n, lhs, rhs, a1, known, c1, approximable);
}

inline GnsReport gns_check(const SetIndicator& f, const Weight& w, double c1, bool approximable,
                           const GnsOptions& opt = {}) {
  const int n = f.grid.dim();
  const double q = analysis_detail::one_star(n);
  const auto [lhs, rhs] = analysis_detail::set_sides(f.set, w, f.grid, q);
  const auto [a1, known] = analysis_detail::a1_for(w, f.grid, opt);
  return analysis_detail::gns_core(n, lhs, rhs, a1, known, c1, approximable);
}

inline GnsReport gns_check(const GnsFixture& fx, double c1, const GnsOptions& opt = {}) {
  return std::visit([&](const auto& f) { return gns_check(f, fx.w, c1, fx.approximable, opt); },
                    fx.f);
}

struct IsoperimetricReport {
  double w_of_e = 0.0;    ///< integral over E of w
  double lhs = 0.0;       ///< w(E)^(1/1*)
  double boundary = 0.0;  ///< P(E) under w^(1/1*)
  double a1 = 1.0;
  double c1 = 0.0;
  double residual = 0.0;  ///< c1 [w]^(2/1*) boundary - lhs
  double ratio = 0.0;     ///< lhs / ([w]^(2/1*) boundary)
};

inline IsoperimetricReport isoperimetric_check(const ShapeSet& e, const Weight& w, double c1,
                                               const Grid& grid, const GnsOptions& opt = {}) {
  if (e.dim() != grid.dim()) throw std::invalid_argument("set and grid dimensions differ");
  const GnsReport g = gns_check(SetIndicator{e, grid}, w, c1, false, opt);
  IsoperimetricReport r;
  r.lhs = g.lhs;
  r.w_of_e = std::pow(g.lhs, g.one_star);
  r.boundary = g.rhs;
  r.a1 = g.a1;
  r.c1 = c1;
  r.residual = g.residual;
  r.ratio = g.required_c1();
  return r;
}

/// Largest lhs / ([w]^(2/1*) rhs) over the suite. A member with rhs = 0 and
/// lhs > 0 contradicts the inequality for every constant.
inline double empirical_c1(const std::vector<GnsFixture>& suite, const GnsOptions& opt = {}) {
  if (suite.empty()) throw std::invalid_argument("empirical_c1 needs a nonempty suite");
  double best = 0.0;
  for (const GnsFixture& fx : suite) {
    GnsFixture strict = fx;
    strict.approximable = false;
    const GnsReport r = gns_check(strict, 1.0, opt);
    if (r.rhs == 0.0 && r.lhs > 0.0)
      throw InconsistencyError("fixture " + fx.name + " has zero variation but norm " +
                               std::to_string(r.lhs));
    best = std::max(best, r.required_c1());
  }
  return best;
}

/// w(x / s), keeping the A1 constant (dilation invariant) and breakpoints.
inline Weight dilated(const Weight& w, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("dilation factor must be positive");
  Weight d = Weight::from_function(
      w.description() + " dilated by " + weight_detail::fmt(s),
      [w, s](const Point& x) { return w(Point{x[0] / s, x[1] / s, x[2] / s}); },
      w.lsc_asserted());
  for (int a = 0; a < kMaxDim; ++a) {
    std::vector<double> b = w.breakpoints(a);
    for (double& v : b) v *= s;
    d = d.with_breakpoints(a, std::move(b));
  }
  for (int n = 1; n <= kMaxDim; ++n)
    if (auto c = w.known_a1(n)) d = d.with_known_a1(n, *c);
  return d;
}

/// The fixture carried by x -> x * s: f(x/s) on the scaled grid under
/// w(x/s). Both sides of the inequality scale by s^(n-1), so the required
/// constant is unchanged.
inline GnsFixture shrunk(const GnsFixture& fx, double s) {
  GnsFixture out{fx.name + "@" + weight_detail::fmt(s), dilated(fx.w, s), fx.f, fx.approximable};
  if (const auto* g = std::get_if<GridFunction>(&fx.f)) {
    std::vector<int> res;
    for (int a = 0; a < g->grid().dim(); ++a) res.push_back(g->grid().resolution(a));
    const Grid scaled(g->grid().domain().scaled(s), res);
    out.f = GridFunction(scaled, std::vector<double>(g->values().begin(), g->values().end()));
  } else {
    const auto& si = std::get<SetIndicator>(fx.f);
    std::vector<int> res;
    for (int a = 0; a < si.grid.dim(); ++a) res.push_back(si.grid.resolution(a));
    out.f = SetIndicator{si.set.scaled(s), Grid(si.grid.domain().scaled(s), res)};
  }
  return out;
}

}  // namespace wbv
