#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wbv/core/errors.hpp"
#include "wbv/core/extended.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"
#include "wbv/core/measure.hpp"
#include "wbv/core/parallel.hpp"
#include "wbv/core/weight.hpp"

namespace wbv {

/// Balls over which averages are taken.
///
/// all_intervals (1-D only): every closed interval spanned by a contiguous run
/// of cells. dyadic: centres on the cell-centre lattice coarsened by `stride`,
/// radii h * 2^j up to the first radius reaching the domain diameter.
/// explicit_balls: the listed balls. With `uncentered` false only balls
/// centred at the evaluation cell count towards its maximal value.
struct BallFamily {
  enum class Kind { all_intervals, dyadic, explicit_balls };

  Kind kind = Kind::all_intervals;
  bool uncentered = true;
  int stride = 1;
  std::vector<Ball> balls;

  static BallFamily all_intervals(bool uncentered = true) {
    return BallFamily{Kind::all_intervals, uncentered, 1, {}};
  }
  static BallFamily dyadic(int stride = 1, bool uncentered = true) {
    if (stride < 1) throw std::invalid_argument("ball lattice stride must be positive");
    return BallFamily{Kind::dyadic, uncentered, stride, {}};
  }
  static BallFamily explicit_balls(std::vector<Ball> list) {
    if (list.empty()) throw std::invalid_argument("ball family is empty");
    for (const Ball& b : list)
      if (!(b.radius > 0.0)) throw std::invalid_argument("ball radii must be positive");
    return BallFamily{Kind::explicit_balls, true, 1, std::move(list)};
  }
};

inline const char* to_string(BallFamily::Kind k) {
  switch (k) {
    case BallFamily::Kind::all_intervals: return "all_intervals";
    case BallFamily::Kind::dyadic: return "dyadic";
    case BallFamily::Kind::explicit_balls: return "explicit";
  }
  return "unknown";
}

/// Cells whose centres lie in the closed ball.
inline std::vector<std::size_t> ball_cells(const Grid& grid, const Ball& b) {
  Grid::Index lo{}, hi{};
  for (int a = 0; a < grid.dim(); ++a) {
    const double h = grid.spacing(a), x0 = grid.domain().lower(a);
    lo[a] = std::max(0, static_cast<int>(std::floor((b.center[a] - b.radius - x0) / h - 0.5)));
    hi[a] = std::min(grid.resolution(a) - 1,
                     static_cast<int>(std::ceil((b.center[a] + b.radius - x0) / h - 0.5)));
    if (hi[a] < lo[a]) return {};
  }
  const double r = b.radius * (1.0 + 1e-12);
  std::vector<std::size_t> out;
  Grid::Index idx = lo;
  for (;;) {
    Point p{};
    for (int a = 0; a < grid.dim(); ++a) p[a] = grid.center(a, idx[a]);
    if (distance(p, b.center, grid.dim()) <= r) out.push_back(grid.linear(idx));
    int a = 0;
    for (; a < grid.dim(); ++a) {
      if (++idx[a] <= hi[a]) break;
      idx[a] = lo[a];
    }
    if (a == grid.dim()) break;
  }
  return out;
}

/// Mean and minimum of the samples in a ball; nullopt when no centre is inside.
struct BallStats {
  double mean = 0.0;
  double min = 0.0;
};

inline std::optional<BallStats> ball_stats(const GridFunction& w, const Ball& b) {
  const auto cells = ball_cells(w.grid(), b);
  if (cells.empty()) return std::nullopt;
  std::vector<double> v;
  v.reserve(cells.size());
  double mn = kInf;
  for (std::size_t c : cells) {
    v.push_back(w[c]);
    mn = std::min(mn, w[c]);
  }
  return BallStats{pairwise_sum(v) / static_cast<double>(v.size()), mn};
}

namespace weights_detail {

struct LatticeBall {
  Grid::Index center{};
  int radius_level = 0;
};

inline std::vector<double> dyadic_radii(const Grid& g) {
  std::vector<double> radii;
  const double diam = g.domain().diameter();
  for (double r = g.min_spacing();; r *= 2.0) {
    radii.push_back(r);
    if (r >= diam) break;
  }
  return radii;
}

/// Per-ball values v(ball) on the dyadic lattice, gathered to cells by max.
/// `ball_value` receives the ball and returns nullopt when the ball is void.
template <class BallValue>
std::vector<double> dyadic_gather(const Grid& g, const BallFamily& fam, BallValue&& ball_value) {
  const std::vector<double> radii = dyadic_radii(g);
  const int stride = fam.uncentered ? fam.stride : 1;
  std::vector<double> out(g.size(), -kInf);

  if (!fam.uncentered) {
    parallel_for(g.size(), [&](std::size_t c) {
      for (double r : radii)
        if (auto v = ball_value(Ball{g.center(c), r})) out[c] = std::max(out[c], *v);
    });
    return out;
  }

  // Lattice of centres: indices multiple of stride on each axis.
  Grid::Index lat{1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) lat[a] = (g.resolution(a) + stride - 1) / stride;
  std::size_t lattice_size = 1;
  for (int a = 0; a < g.dim(); ++a) lattice_size *= static_cast<std::size_t>(lat[a]);
  auto lattice_point = [&](std::size_t l) {
    Grid::Index idx{};
    for (int a = 0; a < g.dim(); ++a) {
      idx[a] = static_cast<int>(l % static_cast<std::size_t>(lat[a])) * stride;
      l /= static_cast<std::size_t>(lat[a]);
    }
    return idx;
  };

  const std::size_t nballs = lattice_size * radii.size();
  std::vector<double> value(nballs, -kInf);
  parallel_for(nballs, [&](std::size_t k) {
    const Grid::Index idx = lattice_point(k / radii.size());
    const double r = radii[k % radii.size()];
    if (auto v = ball_value(Ball{g.center(g.linear(idx)), r})) value[k] = *v;
  });

  parallel_for(g.size(), [&](std::size_t c) {
    const Point x = g.center(c);
    const Grid::Index ci = g.index(c);
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const double r = radii[j] * (1.0 + 1e-12);
      Grid::Index lo{}, hi{};
      for (int a = 0; a < g.dim(); ++a) {
        const int reach = static_cast<int>(std::ceil(radii[j] / g.spacing(a))) + 1;
        lo[a] = ci[a] - reach <= 0 ? 0 : (ci[a] - reach + stride - 1) / stride;
        hi[a] = std::min(lat[a] - 1, (ci[a] + reach) / stride);
      }
      Grid::Index li = lo;
      for (;;) {
        Grid::Index gi{};
        std::size_t l = 0, mult = 1;
        for (int a = 0; a < g.dim(); ++a) {
          gi[a] = li[a] * stride;
          l += static_cast<std::size_t>(li[a]) * mult;
          mult *= static_cast<std::size_t>(lat[a]);
        }
        if (distance(g.center(g.linear(gi)), x, g.dim()) <= r)
          out[c] = std::max(out[c], value[l * radii.size() + j]);
        int a = 0;
        for (; a < g.dim(); ++a) {
          if (++li[a] <= hi[a]) break;
          li[a] = lo[a];
        }
        if (a == g.dim()) break;
      }
    }
  });
  return out;
}

inline void require_covered(const std::vector<double>& m) {
  std::vector<std::size_t> uncovered;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] == -kInf) uncovered.push_back(i);
  if (!uncovered.empty())
    throw CoverageError("no family ball contains " + std::to_string(uncovered.size()) +
                            " evaluation point(s)",
                        std::move(uncovered));
}

/// Max over intervals [i, j] containing k of value(i, j), in O(N^2).
template <class IntervalValue>
std::vector<double> interval_gather(std::size_t n, bool uncentered, IntervalValue&& value) {
  std::vector<double> out(n, -kInf);
  if (!uncentered) {
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t k = 0; k <= std::min(c, n - 1 - c); ++k)
        out[c] = std::max(out[c], value(c - k, c + k));
    return out;
  }
  std::vector<double> suffix(n);
  for (std::size_t i = 0; i < n; ++i) {
    double run = -kInf;
    for (std::size_t j = n; j-- > i;) {
      run = std::max(run, value(i, j));
      suffix[j] = run;
    }
    for (std::size_t k = i; k < n; ++k) out[k] = std::max(out[k], suffix[k]);
  }
  return out;
}

}  // namespace weights_detail

/// Maximal function of sampled weight values over the family: at each cell,
/// the largest sampled ball mean over family balls containing its centre.
inline GridFunction maximal_function(const GridFunction& w, const BallFamily& fam) {
  const Grid& g = w.grid();
  std::vector<double> m;
  switch (fam.kind) {
    case BallFamily::Kind::all_intervals: {
      if (g.dim() != 1) throw std::invalid_argument("the interval family exists only in 1-D");
      std::vector<double> prefix(g.size() + 1, 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) prefix[i + 1] = prefix[i] + w[i];
      m = weights_detail::interval_gather(g.size(), fam.uncentered,
                                          [&](std::size_t i, std::size_t j) {
                                            const double s = prefix[j + 1] - prefix[i];
                                            return s / static_cast<double>(j - i + 1);
                                          });
      // Prefix sums lose inf - inf; any ball holding an infinite sample has infinite mean.
      for (std::size_t i = 0; i < g.size(); ++i)
        if (is_inf(w[i]) || std::isnan(m[i])) m[i] = kInf;
      break;
    }
    case BallFamily::Kind::dyadic:
      m = weights_detail::dyadic_gather(g, fam, [&](const Ball& b) -> std::optional<double> {
        if (auto s = ball_stats(w, b)) return s->mean;
        return std::nullopt;
      });
      break;
    case BallFamily::Kind::explicit_balls: {
      m.assign(g.size(), -kInf);
      for (const Ball& b : fam.balls) {
        const auto cells = ball_cells(g, b);
        if (cells.empty()) continue;
        const double mean = ball_stats(w, b)->mean;
        for (std::size_t c : cells)
          if (fam.uncentered || distance(g.center(c), b.center, g.dim()) < 1e-12 * b.radius)
            m[c] = std::max(m[c], mean);
      }
      break;
    }
  }
  weights_detail::require_covered(m);
  return {g, std::move(m)};
}

inline GridFunction maximal_function(const Weight& w, const Grid& grid, const BallFamily& fam) {
  return maximal_function(sample(w, grid), fam);
}

/// Maximal function of a measure: mu(B) / |B| with exact ball volumes.
inline GridFunction maximal_function(const Measure& mu, const Grid& g, const BallFamily& fam) {
  if (mu.dim() != g.dim()) throw std::invalid_argument("measure and grid dimensions differ");
  std::vector<double> m;
  switch (fam.kind) {
    case BallFamily::Kind::all_intervals: {
      if (g.dim() != 1) throw std::invalid_argument("the interval family exists only in 1-D");
      // mu([F_i, F_{j+1}]) = sum of half-open cell masses + atom mass at F_{j+1}.
      const std::size_t n = g.size();
      std::vector<double> face_mass(n + 1), cell_mass(n);
      for (std::size_t i = 0; i <= n; ++i) {
        const double f = g.face(0, static_cast<int>(i));
        face_mass[i] = mu.interval_mass(f, f);
      }
      parallel_for(n, [&](std::size_t i) {
        cell_mass[i] = mu.interval_mass(g.face(0, static_cast<int>(i)),
                                        g.face(0, static_cast<int>(i) + 1)) -
                       face_mass[i + 1];
      });
      std::vector<double> prefix(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + cell_mass[i];
      m = weights_detail::interval_gather(n, fam.uncentered, [&](std::size_t i, std::size_t j) {
        const double len = g.face(0, static_cast<int>(j) + 1) - g.face(0, static_cast<int>(i));
        return (prefix[j + 1] - prefix[i] + face_mass[j + 1]) / len;
      });
      for (double& v : m)
        if (std::isnan(v)) v = kInf;
      break;
    }
    case BallFamily::Kind::dyadic:
      m = weights_detail::dyadic_gather(g, fam, [&](const Ball& b) -> std::optional<double> {
        return mu.mass(b) / ball_volume(g.dim(), b.radius);
      });
      break;
    case BallFamily::Kind::explicit_balls: {
      m.assign(g.size(), -kInf);
      for (const Ball& b : fam.balls) {
        const double ratio = mu.mass(b) / ball_volume(g.dim(), b.radius);
        for (std::size_t c = 0; c < g.size(); ++c) {
          const double d = distance(g.center(c), b.center, g.dim());
          if (fam.uncentered ? d <= b.radius * (1.0 + 1e-12) : d < 1e-12 * b.radius)
            m[c] = std::max(m[c], ratio);
        }
      }
      break;
    }
  }
  weights_detail::require_covered(m);
  return {g, std::move(m)};
}

/// Sup over family balls of (sampled mean) / (sampled min). At least 1;
/// +inf when some ball has minimum 0.
inline double estimate_a1_constant(const GridFunction& w, const BallFamily& fam) {
  const Grid& g = w.grid();
  double best = 1.0;
  auto ratio = [](double mean, double mn) {
    if (mn == 0.0) return kInf;
    return std::max(1.0, extended_ratio(mean, mn));
  };
  switch (fam.kind) {
    case BallFamily::Kind::all_intervals: {
      if (g.dim() != 1) throw std::invalid_argument("the interval family exists only in 1-D");
      const std::size_t n = g.size();
      std::vector<double> row(n, 1.0);
      parallel_for(n, [&](std::size_t i) {
        double sum = 0.0, mn = kInf, r = 1.0;
        if (fam.uncentered) {
          for (std::size_t j = i; j < n; ++j) {
            sum += w[j];
            mn = std::min(mn, w[j]);
            r = std::max(r, ratio(sum / static_cast<double>(j - i + 1), mn));
          }
        } else {
          for (std::size_t k = 0; k <= std::min(i, n - 1 - i); ++k) {
            sum += w[i - k] + (k > 0 ? w[i + k] : 0.0);
            mn = std::min({mn, w[i - k], w[i + k]});
            r = std::max(r, ratio(sum / static_cast<double>(2 * k + 1), mn));
          }
        }
        row[i] = r;
      });
      for (double r : row) best = std::max(best, r);
      break;
    }
    case BallFamily::Kind::dyadic: {
      const auto m = weights_detail::dyadic_gather(g, fam, [&](const Ball& b) -> std::optional<double> {
        if (auto s = ball_stats(w, b)) return ratio(s->mean, s->min);
        return std::nullopt;
      });
      for (double r : m) best = std::max(best, r);
      break;
    }
    case BallFamily::Kind::explicit_balls:
      for (const Ball& b : fam.balls)
        if (auto s = ball_stats(w, b)) best = std::max(best, ratio(s->mean, s->min));
      break;
  }
  return best;
}

inline double estimate_a1_constant(const Weight& w, const Grid& grid, const BallFamily& fam) {
  return estimate_a1_constant(sample(w, grid), fam);
}

struct PointwiseA1Report {
  double a1_used = 1.0;
  bool a1_known = false;
  double max_ratio = 0.0;  ///< sup over cells of Mw / ([w] w)
  std::size_t worst_cell = 0;
  GridFunction ratios;
};

/// Sup over cell centres of Mw(x) / ([w] w(x)), with [w] the weight's known
/// constant or, failing that, the family estimate.
inline PointwiseA1Report check_pointwise_a1(const Weight& w, const Grid& grid,
                                            const BallFamily& fam,
                                            std::optional<double> a1 = std::nullopt) {
  const GridFunction s = sample(w, grid);
  bool known = false;
  if (!a1) {
    a1 = w.known_a1(grid.dim());
    known = a1.has_value();
  } else {
    known = true;
  }
  if (!a1) a1 = estimate_a1_constant(s, fam);
  const GridFunction m = maximal_function(s, fam);
  std::vector<double> r(grid.size());
  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    r[c] = extended_ratio(m[c], measure_product(*a1, s[c]));
    if (r[c] > worst) {
      worst = r[c];
      at = c;
    }
  }
  return {*a1, known, worst, at, GridFunction(grid, std::move(r))};
}

/// Pointwise power w^delta, 0 < delta < 1; a known A1 constant c becomes c^delta.
inline Weight delta_weight(const Weight& w, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  return Weight::delta_power(w, delta);
}

// ---------------------------------------------------------------------------
// Membership in the class of measures with a.e.-finite maximal function.

/// Geometric radii from r_min to r_max inclusive.
inline std::vector<double> geometric_schedule(double r_min, double r_max, int count) {
  if (!(r_min > 0.0) || !(r_max > r_min) || count < 2)
    throw std::invalid_argument("radius schedule needs 0 < r_min < r_max and count >= 2");
  std::vector<double> r(static_cast<std::size_t>(count));
  const double q = std::log(r_max / r_min) / (count - 1);
  for (int i = 0; i < count; ++i) r[static_cast<std::size_t>(i)] = r_min * std::exp(q * i);
  r.back() = r_max;
  return r;
}

struct MFProbe {
  Point at{};
  double maximal = 0.0;  ///< lower bound on M mu(at) over the candidate balls
  double limsup = 0.0;   ///< tail maximum of mu(B(at,R)) / |B(at,R)|
  bool diverges = false;
  std::vector<double> ratios;  ///< centred ratios along the schedule
};

struct MFReport {
  std::vector<MFProbe> probes;
  std::vector<double> radii;
  double K = 0.0;
  bool k_finite = true;
  /// Conditions: (1) M mu finite at the first probe; (2) finite limsup at the
  /// first probe; (3) one finite K shared by every probe; (4) M mu finite at
  /// every probe.
  std::array<bool, 4> conditions{};
  bool agree = false;
  bool member = false;
};

struct MFOptions {
  double tail_fraction = 0.1;   ///< share of the schedule treated as R -> inf
  double k_zero_floor = 1e-5;   ///< limsups below this are taken as K = 0
  double k_rel_tol = 1e-2;      ///< relative K-equality tolerance across probes
  double growth_factor = 10.0;  ///< tail growth that signals divergence
};

inline MFReport classify_mf(const Measure& mu, const std::vector<Point>& probes,
                            const std::vector<double>& radii, const MFOptions& opt = {}) {
  if (probes.size() < 2) throw std::invalid_argument("classify_mf needs at least two probes");
  if (radii.size() < 4) throw std::invalid_argument("radius schedule needs at least four radii");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument("radius schedule must be positive and increasing");
  const int n = mu.dim();
  MFReport rep;
  rep.radii = radii;
  rep.probes.resize(probes.size());

  parallel_for(probes.size(), [&](std::size_t p) {
    MFProbe& pr = rep.probes[p];
    const Point x = probes[p];
    pr.at = x;
    pr.ratios.resize(radii.size());
    double mx = 0.0;
    auto consider = [&](const Ball& b) {
      mx = std::max(mx, mu.mass(b) / ball_volume(n, b.radius));
    };
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const Ball b{x, radii[i]};
      pr.ratios[i] = mu.mass(b) / ball_volume(n, radii[i]);
      mx = std::max(mx, pr.ratios[i]);
      // Balls with x on their boundary, displaced along each axis.
      for (int a = 0; a < n; ++a)
        for (double sgn : {-1.0, 1.0}) {
          Ball u{x, radii[i]};
          u.center[a] += sgn * radii[i];
          consider(u);
        }
    }
    // Smallest balls holding both x and an atom.
    for (const Atom& a : mu.atoms()) {
      const double d = distance(a.at, x, n);
      if (d == 0.0) {
        mx = kInf;
        continue;
      }
      Point c{};
      for (int k = 0; k < kMaxDim; ++k) c[k] = 0.5 * (a.at[k] + x[k]);
      consider(Ball{c, 0.5 * d * (1.0 + 1e-12)});
    }
    pr.maximal = mx;

    const std::size_t tail = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(opt.tail_fraction * radii.size())));
    const std::size_t start = radii.size() - tail;
    double tail_max = 0.0, before_max = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!std::isfinite(pr.ratios[i])) finite = false;
      if (i >= start) tail_max = std::max(tail_max, pr.ratios[i]);
      else if (i >= start - std::min(start, tail)) before_max = std::max(before_max, pr.ratios[i]);
    }
    pr.diverges = !finite || (before_max > 0.0 && tail_max > opt.growth_factor * before_max);
    pr.limsup = pr.diverges ? kInf : tail_max;
  });

  auto k_of = [&](double v) { return v < opt.k_zero_floor ? 0.0 : v; };
  const MFProbe& first = rep.probes.front();
  rep.conditions[0] = std::isfinite(first.maximal);
  rep.conditions[1] = !first.diverges;
  bool all_finite = true, equal = true;
  const double k0 = k_of(first.limsup);
  for (const MFProbe& pr : rep.probes) {
    all_finite = all_finite && !pr.diverges;
    const double k = k_of(pr.limsup);
    const double scale = std::max(std::fabs(k0), std::fabs(k));
    if (!(std::fabs(k - k0) <= opt.k_rel_tol * scale)) equal = false;
  }
  rep.conditions[2] = all_finite && equal;
  rep.k_finite = all_finite;
  rep.K = all_finite ? k0 : kInf;
  bool fin_all = true;
  for (const MFProbe& pr : rep.probes) fin_all = fin_all && std::isfinite(pr.maximal);
  rep.conditions[3] = fin_all;
  rep.agree = std::all_of(rep.conditions.begin(), rep.conditions.end(),
                          [&](bool c) { return c == rep.conditions[0]; });
  rep.member = rep.agree && rep.conditions[0];
  return rep;
}

/// Probes spread along the diagonal of the grid box plus the default schedule
/// from h to 10^6 times the diameter.
inline std::vector<Point> default_probes(const BoxDomain& box, int count = 5) {
  static constexpr double frac[] = {0.137, 0.311, 0.523, 0.709, 0.887, 0.251, 0.643, 0.953};
  std::vector<Point> p;
  for (int i = 0; i < count && i < 8; ++i) {
    Point x{};
    for (int a = 0; a < box.dim(); ++a)
      x[a] = box.lower(a) + frac[(i + a) % 8] * box.width(a);
    p.push_back(x);
  }
  return p;
}

inline std::vector<double> default_schedule(const BoxDomain& box, double r_min) {
  return geometric_schedule(r_min, 1e6 * box.diameter(), 240);
}

/// (M mu)^delta sampled on the grid as a tabulated, lower semicontinuous weight.
inline Weight coifman_rochberg(const Measure& mu, double delta, const Grid& grid,
                               const BallFamily& fam) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
  const MFReport rep = classify_mf(mu, default_probes(grid.domain()),
                                   default_schedule(grid.domain(), grid.min_spacing()));
  if (!rep.member)
    throw ClassificationError("measure " + mu.name() +
                              " does not have an a.e. finite maximal function");
  const GridFunction m = maximal_function(mu, grid, fam);
  GridFunction v = m.map([&](double x) { return delta == 0.0 ? 1.0 : std::pow(x, delta); });
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0))
      throw SamplingError(i, "maximal function of " + mu.name() + " vanishes; weight undefined");
  return Weight::tabulated(v, "cr(" + mu.name() + ", delta=" + weight_detail::fmt(delta) + ")",
                           WeightKind::coifman_rochberg, true);
}

}  // namespace wbv
