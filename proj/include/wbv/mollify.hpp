#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbv/bv1d.hpp"
#include "wbv/core/errors.hpp"
#include "wbv/core/extended.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"
#include "wbv/core/mollifier.hpp"
#include "wbv/core/parallel.hpp"
#include "wbv/core/quadrature.hpp"
#include "wbv/core/weight.hpp"
#include "wbv/variation.hpp"
#include "wbv/weights.hpp"

namespace wbv {

inline Mollifier standard_mollifier(double eps, int dim) { return Mollifier(eps, dim); }

// ---------------------------------------------------------------------------
// Pointwise bound eta_eps * w <= [w] w for A1 weights.

struct MollifierBoundReport {
  double eps = 0.0;
  double a1_used = 1.0;
  bool a1_known = false;
  double max_ratio = 0.0;
  std::size_t worst_cell = 0;
  std::vector<double> ratios;  ///< per cell; 0 where w is infinite
};

/// (eta_eps * w)(x) by quadrature over B(x, eps).
inline double mollified_weight_at(const Weight& w, const Mollifier& eta, const Point& x) {
  const int n = eta.dim();
  const double e = eta.eps();
  if (n == 1) {
    std::vector<double> cuts = bv1d_detail::weight_cuts(w, x[0] - e, x[0] + e);
    cuts.push_back(x[0]);
    return integrate_or_throw(
        [&](double y) { return measure_product(eta(x[0] - y), w(y)); }, x[0] - e, x[0] + e,
        "mollified weight", 1e-9, cuts);
  }
  return ball_integral(
      [&](const Point& y) {
        Point d{};
        for (int a = 0; a < n; ++a) d[a] = x[a] - y[a];
        return measure_product(eta(d), w(y));
      },
      x, e, n, 8);
}

/// sup over cell centres of (eta_eps * w)(x) / ([w] w(x)). [w] is the known
/// constant when the weight carries one, else the grid estimate.
inline MollifierBoundReport mollifier_weight_bound(const Weight& w, double eps, const Grid& grid,
                                                   std::optional<double> a1 = std::nullopt) {
  const Mollifier eta(eps, grid.dim());
  MollifierBoundReport r;
  r.eps = eps;
  r.a1_known = true;
  if (!a1) a1 = w.known_a1(grid.dim());
  if (!a1) {
    r.a1_known = false;
    a1 = estimate_a1_constant(w, grid,
                              grid.dim() == 1 ? BallFamily::all_intervals() : BallFamily::dyadic());
  }
  r.a1_used = *a1;
  r.ratios.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t c) {
    const Point x = grid.center(c);
    const double wx = w(x);
    if (is_inf(wx)) return;
    r.ratios[c] = extended_ratio(mollified_weight_at(w, eta, x), r.a1_used * wx);
  });
  for (std::size_t c = 0; c < grid.size(); ++c)
    if (r.ratios[c] > r.max_ratio) {
      r.max_ratio = r.ratios[c];
      r.worst_cell = c;
    }
  return r;
}

// ---------------------------------------------------------------------------
// Dyadic cover of a box by distance-to-boundary shells.

/// Piece k is the open shell dist(x, boundary) in (2^(-k-1) D, 2^(-k+1) D),
/// D the inradius; piece 1 is the core dist > D/4. In s = log2(D / dist) the
/// shells are (k-1, k+1) and each raw bump lives on (k-3/4, k+3/4), the core
/// bump on s < 7/4. Bumps are normalised by their sum, so the partition is
/// exact wherever some bump is positive. Any s lies in at most two bump
/// supports and at most three shells.
class CoverPartition {
 public:
  CoverPartition(BoxDomain domain, int depth) : domain_(std::move(domain)), depth_(depth) {
    if (depth < 1) throw std::invalid_argument("cover depth must be at least 1");
    scale_ = domain_.inradius();
  }

  const BoxDomain& domain() const noexcept { return domain_; }
  int depth() const noexcept { return depth_; }
  int piece_count() const noexcept { return depth_; }
  int overlap_bound() const noexcept { return 4; }
  double scale() const noexcept { return scale_; }

  /// Inner edge of shell k: dist > 2^(-k-1) D.
  double inner_distance(int k) const { return std::ldexp(scale_, -k - 1); }
  double outer_distance(int k) const {
    return k == 1 ? kInf : std::ldexp(scale_, -k + 1);
  }
  bool in_piece(int k, const Point& x) const {
    const double d = domain_.distance_to_boundary(x);
    return d > inner_distance(k) && d < outer_distance(k);
  }
  int membership(const Point& x) const {
    int m = 0;
    for (int k = 1; k <= depth_; ++k) m += in_piece(k, x) ? 1 : 0;
    return m;
  }

  /// zeta_1 .. zeta_depth at x (index k-1), all zero outside the covered set.
  std::vector<double> partition(const Point& x) const {
    std::vector<double> z(static_cast<std::size_t>(depth_), 0.0);
    const double s = level(x);
    if (!std::isfinite(s)) return z;
    double total = 0.0;
    for (int k = 1; k <= depth_; ++k) total += (z[k - 1] = raw(k, s).value);
    if (total > 0.0)
      for (double& v : z) v /= total;
    return z;
  }
  double zeta(int k, const Point& x) const { return partition(x).at(static_cast<std::size_t>(k - 1)); }

  /// Gradient of zeta_k at x (zero outside the covered set).
  Point gradient(int k, const Point& x) const {
    Point g{};
    const double s = level(x);
    if (!std::isfinite(s)) return g;
    double total = 0.0, dtotal = 0.0;
    Bump own{};
    for (int j = 1; j <= depth_; ++j) {
      const Bump b = raw(j, s);
      total += b.value;
      dtotal += b.slope;
      if (j == k) own = b;
    }
    if (!(total > 0.0)) return g;
    const double dzeta_ds = (own.slope * total - own.value * dtotal) / (total * total);
    // s = log2(D / d); d is the distance to the nearest face.
    const double d = domain_.distance_to_boundary(x);
    int axis = 0;
    double sign = 1.0;
    for (int a = 0; a < domain_.dim(); ++a) {
      if (x[a] - domain_.lower(a) == d) {
        axis = a;
        sign = 1.0;
        break;
      }
      if (domain_.upper(a) - x[a] == d) {
        axis = a;
        sign = -1.0;
        break;
      }
    }
    g[axis] = dzeta_ds * (-1.0 / (d * std::numbers::ln2)) * sign;
    return g;
  }

  /// True where the bumps sum to a positive value.
  bool covers(const Point& x) const {
    const double s = level(x);
    if (!std::isfinite(s)) return false;
    for (int k = 1; k <= depth_; ++k)
      if (raw(k, s).value > 0.0) return true;
    return false;
  }

 private:
  struct Bump {
    double value = 0.0;
    double slope = 0.0;  ///< d/ds
  };

  double level(const Point& x) const {
    const double d = domain_.distance_to_boundary(x);
    if (!(d > 0.0)) return kInf;
    return std::log2(scale_ / d);
  }

  static Bump raw(int k, double s) {
    const double hi = k + 0.75;
    if (!(s < hi)) return {};
    if (k == 1) {
      const double t = hi - s;
      const double v = std::exp(-1.0 / t);
      return {v, -v / (t * t)};
    }
    const double lo = k - 0.75;
    if (!(s > lo)) return {};
    const double a = s - lo, b = hi - s;
    const double v = std::exp(-1.0 / a - 1.0 / b);
    return {v, v * (1.0 / (a * a) - 1.0 / (b * b))};
  }

  BoxDomain domain_;
  int depth_;
  double scale_ = 1.0;
};

inline CoverPartition build_cover(const BoxDomain& domain, int depth) { return {domain, depth}; }

/// Cover of f's grid box; every cell where f is nonzero must be covered.
inline CoverPartition build_cover(const GridFunction& target, int depth) {
  CoverPartition cover(target.grid().domain(), depth);
  std::vector<std::size_t> missing;
  for (std::size_t c = 0; c < target.size(); ++c)
    if (target[c] != 0.0 && !cover.covers(target.grid().center(c))) missing.push_back(c);
  if (!missing.empty())
    throw CoverageError("cover of depth " + std::to_string(depth) + " misses " +
                            std::to_string(missing.size()) + " cells of the support",
                        std::move(missing));
  return cover;
}

// ---------------------------------------------------------------------------
// Grid convolution with the standard mollifier.

namespace mollify_detail {

struct Kernel {
  std::vector<Grid::Index> offsets;
  std::vector<double> weights;
  Grid::Index reach{};
};

/// Samples of eta_eps on the lattice offsets inside the open ball, rescaled
/// to unit discrete mass so constants are reproduced exactly.
inline Kernel discrete_kernel(const Grid& g, double eps) {
  const Mollifier eta(eps, g.dim());
  Kernel k;
  for (int a = 0; a < g.dim(); ++a) k.reach[a] = static_cast<int>(std::ceil(eps / g.spacing(a)));
  Grid::Index o{};
  const std::array<int, kMaxDim> lo{-k.reach[0], g.dim() > 1 ? -k.reach[1] : 0,
                                    g.dim() > 2 ? -k.reach[2] : 0};
  for (o[2] = lo[2]; o[2] <= -lo[2]; ++o[2])
    for (o[1] = lo[1]; o[1] <= -lo[1]; ++o[1])
      for (o[0] = lo[0]; o[0] <= -lo[0]; ++o[0]) {
        Point d{};
        for (int a = 0; a < g.dim(); ++a) d[a] = o[a] * g.spacing(a);
        const double v = eta(d);
        if (v > 0.0) {
          k.offsets.push_back(o);
          k.weights.push_back(v);
        }
      }
  double total = 0.0;
  for (double v : k.weights) total += v;
  for (double& v : k.weights) v /= total;
  return k;
}

/// out[i] = sum_o g[i - o] k[o]; cells beyond the grid contribute zero.
inline std::vector<double> convolve(const Grid& grid, const std::vector<double>& g, const Kernel& k) {
  const int n = grid.dim();
  Grid::Index lo{}, hi{};
  bool any = false;
  for (int a = 0; a < n; ++a) {
    lo[a] = grid.resolution(a);
    hi[a] = -1;
  }
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g[c] == 0.0) continue;
    any = true;
    const Grid::Index idx = grid.index(c);
    for (int a = 0; a < n; ++a) {
      lo[a] = std::min(lo[a], idx[a]);
      hi[a] = std::max(hi[a], idx[a]);
    }
  }
  std::vector<double> out(g.size(), 0.0);
  if (!any) return out;
  parallel_for(g.size(), [&](std::size_t c) {
    const Grid::Index idx = grid.index(c);
    for (int a = 0; a < n; ++a)
      if (idx[a] < lo[a] - k.reach[a] || idx[a] > hi[a] + k.reach[a]) return;
    double s = 0.0;
    for (std::size_t j = 0; j < k.offsets.size(); ++j) {
      Grid::Index src{};
      bool inside = true;
      for (int a = 0; a < n && inside; ++a) {
        src[a] = idx[a] - k.offsets[j][a];
        inside = src[a] >= 0 && src[a] < grid.resolution(a);
      }
      if (inside) s += g[grid.linear(src)] * k.weights[j];
    }
    out[c] = s;
  });
  return out;
}

}  // namespace mollify_detail

// ---------------------------------------------------------------------------
// Per-piece radii.

/// The five conditions on eps_k, measured at grid resolution.
struct PieceResidual {
  int k = 1;
  double eps_k = 0.0;
  int halvings = 0;
  bool empty = false;         ///< f zeta_k and f grad zeta_k vanish on the grid
  bool below_target = false;  ///< eps_k < eps
  bool contained = false;     ///< spt((f zeta_k) * eta) within piece k
  bool inside_domain = false; ///< eps_k-neighbourhood of piece k within the box
  double l1 = 0.0;            ///< ||(f zeta_k) * eta - f zeta_k||_L1(w)
  double grad_l1 = 0.0;       ///< ||(f grad zeta_k) * eta - f grad zeta_k||_L1(w)
  double threshold = 0.0;     ///< 2^-k eps

  bool satisfied() const {
    return below_target && contained && inside_domain && l1 < threshold && grad_l1 < threshold;
  }
};

struct EpsilonSchedule {
  double eps = 0.0;
  std::vector<PieceResidual> pieces;
};

namespace mollify_detail {

struct PieceResult {
  PieceResidual residual;
  std::vector<double> smoothed;
};

inline PieceResult fit_piece(const GridFunction& f, const GridFunction& ws,
                             const CoverPartition& cover, int k, double eps) {
  const Grid& grid = f.grid();
  const int n = grid.dim();
  const double vol = grid.cell_volume();
  std::vector<double> g(grid.size(), 0.0);
  std::array<std::vector<double>, kMaxDim> dg;
  for (int a = 0; a < n; ++a) dg[a].assign(grid.size(), 0.0);
  bool empty = true;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (f[c] == 0.0) continue;
    const Point x = grid.center(c);
    g[c] = f[c] * cover.zeta(k, x);
    const Point grad = cover.gradient(k, x);
    for (int a = 0; a < n; ++a) dg[a][c] = f[c] * grad[a];
    empty = empty && g[c] == 0.0;
    for (int a = 0; a < n; ++a) empty = empty && dg[a][c] == 0.0;
  }

  PieceResult out;
  PieceResidual& r = out.residual;
  r.k = k;
  r.empty = empty;
  r.threshold = std::ldexp(eps, -k);
  const double floor = 2.0 * grid.min_spacing();
  double e = eps / 2.0;
  for (int h = 0;; ++h, e /= 2.0) {
    r.eps_k = e;
    r.halvings = h;
    r.below_target = e < eps;
    r.inside_domain = e < cover.inner_distance(k);
    if (empty) {
      r.contained = true;
      r.l1 = r.grad_l1 = 0.0;
      if (r.inside_domain) {
        out.smoothed = std::move(g);
        return out;
      }
      continue;
    }
    if (e < floor) {
      std::ostringstream msg;
      msg << "piece " << k << " needs eps_k below the grid floor " << floor;
      if (h == 0)
        msg << " (eps/2 = " << e << " already is)";
      else
        msg << " (at eps_k " << 2.0 * e << ": l1 " << r.l1 << ", grad " << r.grad_l1
            << ", threshold " << r.threshold << ", contained " << r.contained << ", inside "
            << r.inside_domain << ")";
      msg << "; refine the grid";
      throw ResolutionError(msg.str());
    }
    if (!r.inside_domain) continue;
    const Kernel ker = discrete_kernel(grid, e);
    std::vector<double> s = convolve(grid, g, ker);
    r.contained = true;
    std::vector<double> l1(grid.size(), 0.0), gl1(grid.size(), 0.0);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      if (s[c] != 0.0 && !cover.in_piece(k, grid.center(c))) r.contained = false;
      l1[c] = measure_product(std::fabs(s[c] - g[c]), ws[c]) * vol;
    }
    std::array<std::vector<double>, kMaxDim> sg;
    for (int a = 0; a < n; ++a) sg[a] = convolve(grid, dg[a], ker);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      double q = 0.0;
      for (int a = 0; a < n; ++a) q += (sg[a][c] - dg[a][c]) * (sg[a][c] - dg[a][c]);
      gl1[c] = measure_product(std::sqrt(q), ws[c]) * vol;
    }
    r.l1 = pairwise_sum(l1);
    r.grad_l1 = pairwise_sum(gl1);
    if (r.satisfied()) {
      out.smoothed = std::move(s);
      return out;
    }
  }
}

inline std::vector<PieceResult> fit_all(const GridFunction& f, const Weight& w,
                                        const CoverPartition& cover, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("target eps must be positive");
  if (!(cover.domain() == f.grid().domain()))
    throw std::invalid_argument("cover and grid live on different boxes");
  if (!f.all_finite()) throw std::invalid_argument("f must be finite at every cell");
  const GridFunction ws = sample(w, f.grid());
  if (!std::isfinite(weighted_l1(f.map([](double v) { return std::fabs(v); }), ws)))
    throw std::invalid_argument("f is not in L1(w) on the grid");
  std::vector<std::size_t> missing;
  for (std::size_t c = 0; c < f.size(); ++c)
    if (f[c] != 0.0 && !cover.covers(f.grid().center(c))) missing.push_back(c);
  if (!missing.empty())
    throw CoverageError("cover of depth " + std::to_string(cover.depth()) + " misses " +
                            std::to_string(missing.size()) + " cells of the support",
                        std::move(missing));
  std::vector<PieceResult> out;
  for (int k = 1; k <= cover.depth(); ++k) out.push_back(fit_piece(f, ws, cover, k, eps));
  return out;
}

}  // namespace mollify_detail

/// Halves each eps_k from eps/2 until all five conditions hold; stops with a
/// ResolutionError once a nonempty piece would need eps_k below two cells.
inline EpsilonSchedule choose_epsilons(const GridFunction& f, const Weight& w,
                                       const CoverPartition& cover, double eps) {
  EpsilonSchedule s;
  s.eps = eps;
  for (auto& p : mollify_detail::fit_all(f, w, cover, eps)) s.pieces.push_back(p.residual);
  return s;
}

// ---------------------------------------------------------------------------
// Smooth approximation.

struct SmoothApproximation {
  GridFunction f_eps;
  EpsilonSchedule schedule;
  double l1_error = 0.0;  ///< ||f_eps - f||_L1(w), below eps by construction
  double tv = 0.0;        ///< weighted_tv(f_eps, w)
  double tv_f = 0.0;      ///< weighted_tv(f, w)
  double ratio = 0.0;     ///< tv / tv_f
};

/// f_eps = sum_k (f zeta_k) * eta_{eps_k}.
inline SmoothApproximation smooth_approximate(const GridFunction& f, const Weight& w, double eps,
                                              int depth) {
  const CoverPartition cover = build_cover(f, depth);
  std::vector<mollify_detail::PieceResult> parts = mollify_detail::fit_all(f, w, cover, eps);
  std::vector<double> sum(f.size(), 0.0);
  EpsilonSchedule sched;
  sched.eps = eps;
  for (auto& p : parts) {
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += p.smoothed[c];
    sched.pieces.push_back(p.residual);
  }
  SmoothApproximation out{GridFunction(f.grid(), std::move(sum)), std::move(sched)};
  const GridFunction ws = sample(w, f.grid());
  out.l1_error = weighted_l1(out.f_eps.plus(f.scaled(-1.0)).map([](double v) { return std::fabs(v); }), ws);
  out.tv = weighted_tv(out.f_eps, ws).value;
  out.tv_f = weighted_tv(f, ws).value;
  out.ratio = extended_ratio(out.tv, out.tv_f);
  return out;
}

struct SmoothingStep {
  double eps = 0.0;
  double tv = 0.0;
  double ratio = 0.0;
  double l1_error = 0.0;
};

/// smooth_approximate over a decreasing eps schedule; the last ratio is the
/// observed limit.
inline std::vector<SmoothingStep> smoothing_trace(const GridFunction& f, const Weight& w,
                                                  const std::vector<double>& eps, int depth) {
  std::vector<SmoothingStep> t;
  for (double e : eps) {
    const SmoothApproximation s = smooth_approximate(f, w, e, depth);
    t.push_back({e, s.tv, s.ratio, s.l1_error});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Approximability of grid functions.

/// Averages of |w - w(x)| over balls B(x, eps) shrinking by halves.
inline AtomProbe lebesgue_probe(const Weight& w, const Point& x, int dim, const ProbeOptions& opt = {}) {
  if (dim == 1) return lebesgue_probe(w, x[0], opt);
  AtomProbe p;
  p.at = x[0];
  const double wx = w(x);
  if (is_inf(wx)) {
    p.status = Verdict::not_approximable;
    return p;
  }
  const int halvings = std::min(opt.halvings, 20);
  for (int j = 0; j < halvings; ++j) {
    const double e = opt.eps_max * std::ldexp(1.0, -j);
    const double q =
        ball_integral([&](const Point& y) { return std::fabs(w(y) - wx); }, x, e, dim, 8);
    p.eps.push_back(e);
    p.averages.push_back(q / ball_volume(dim, e));
  }
  const std::size_t n = p.averages.size();
  const double last = p.averages.back();
  const double tol = opt.lebesgue_tol * std::max(1.0, std::fabs(wx));
  if (last <= tol) {
    p.lebesgue_point = true;
    p.status = Verdict::approximable;
  } else {
    const double a = p.averages[n - 3], b = p.averages[n - 2];
    const double hi = std::max({a, b, last}), lo = std::min({a, b, last});
    p.status = (hi - lo <= opt.plateau_rel * hi) ? Verdict::not_approximable : Verdict::inconclusive;
  }
  return p;
}

namespace mollify_detail {

inline ApproximabilityReport probe_grid(const GridFunction& f, const Weight& w,
                                        const ProbeOptions& opt, std::size_t max_atoms) {
  const Grid& g = f.grid();
  struct Face {
    Point at;
    double jump;
  };
  std::vector<Face> faces;
  for (std::size_t c = 0; c < g.size(); ++c)
    for (int a = 0; a < g.dim(); ++a) {
      if (!g.has_forward(c, a)) continue;
      const double j = f[c + g.stride(a)] - f[c];
      if (j != 0.0) faces.push_back({g.forward_face_center(c, a), j});
    }
  // Faces within a cell of a weight breakpoint always count; the rest are
  // thinned to an evenly spaced subset, deterministic in the face order.
  auto near_break = [&](const Point& x) {
    for (int a = 0; a < g.dim(); ++a)
      for (double b : w.breakpoints(a))
        if (std::fabs(x[a] - b) <= g.spacing(a)) return true;
    return false;
  };
  const std::size_t step = std::max<std::size_t>(1, (faces.size() + max_atoms - 1) / max_atoms);
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < faces.size(); ++i)
    if (i % step == 0 || near_break(faces[i].at)) chosen.push_back(i);
  ApproximabilityReport r;
  bool bad = false, unsure = false;
  for (std::size_t i : chosen) {
    AtomProbe p = lebesgue_probe(w, faces[i].at, g.dim(), opt);
    p.jump = faces[i].jump;
    bad = bad || p.status == Verdict::not_approximable;
    unsure = unsure || p.status == Verdict::inconclusive;
    r.atoms.push_back(std::move(p));
  }
  r.verdict = bad ? Verdict::not_approximable : (unsure ? Verdict::inconclusive : Verdict::approximable);
  return r;
}

}  // namespace mollify_detail

/// Probes w at the faces where f jumps (at most `max_atoms` of them) and
/// records the verdict for w^(1/2) alongside.
inline ApproximabilityReport approximability_probe(const GridFunction& f, const Weight& w,
                                                   const ProbeOptions& opt = {},
                                                   std::size_t max_atoms = 64) {
  if (max_atoms == 0) throw std::invalid_argument("max_atoms must be positive");
  ApproximabilityReport r = mollify_detail::probe_grid(f, w, opt, max_atoms);
  r.delta_half = mollify_detail::probe_grid(f, delta_weight(w, 0.5), opt, max_atoms).verdict;
  return r;
}

inline ApproximabilityReport approximability_probe(const PiecewiseFunction1D& f, const Weight& w,
                                                   const ProbeOptions& opt = {}) {
  ApproximabilityReport r = approximability_probe_1d(f, w, opt);
  r.delta_half = approximability_probe_1d(f, delta_weight(w, 0.5), opt).verdict;
  return r;
}

}  // namespace wbv
