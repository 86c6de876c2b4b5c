#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wbv/core/errors.hpp"
#include "wbv/core/expr.hpp"
#include "wbv/core/extended.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"
#include "wbv/core/parallel.hpp"
#include "wbv/core/quadrature.hpp"
#include "wbv/core/shape.hpp"
#include "wbv/core/weight.hpp"

namespace wbv {

enum class VariationMethod { gradient_sum, face_sum, boundary_quadrature, volume_quadrature, dual_bound };

inline const char* to_string(VariationMethod m) {
  switch (m) {
    case VariationMethod::gradient_sum: return "gradient-sum";
    case VariationMethod::face_sum: return "face-sum";
    case VariationMethod::boundary_quadrature: return "boundary-quadrature";
    case VariationMethod::volume_quadrature: return "volume-quadrature";
    case VariationMethod::dual_bound: return "dual-bound";
  }
  return "unknown";
}

/// A weighted variation or perimeter value in [0, inf].
struct VariationReport {
  double value = 0.0;
  VariationMethod method = VariationMethod::gradient_sum;
  std::vector<int> resolution;   ///< cells per axis; empty for grid-free methods
  std::vector<double> spacing;   ///< h per axis
  double error_estimate = 0.0;   ///< absolute quadrature error bound, 0 for exact sums
  std::vector<std::pair<double, double>> history;  ///< (h, value) under refinement
};

namespace variation_detail {

inline void describe_grid(VariationReport& r, const Grid& g) {
  for (int a = 0; a < g.dim(); ++a) {
    r.resolution.push_back(g.resolution(a));
    r.spacing.push_back(g.spacing(a));
  }
}

/// |grad_h f| at cell c with forward differences; 0 components on the last layer.
inline double gradient_norm(const GridFunction& f, std::size_t c) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    if (!g.has_forward(c, a)) continue;
    const double d = (f[c + g.stride(a)] - f[c]) / g.spacing(a);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace variation_detail

/// integral over the box of |grad f| w for a smooth expression f, by 8-point
/// Gauss-Legendre on a tensor partition: `panels` uniform cuts per axis plus
/// the weight's breakpoints.
inline VariationReport smooth_variation(const Expr& f, const Weight& w, const BoxDomain& box,
                                        int panels = 128) {
  if (panels < 1) throw std::invalid_argument("panel count must be positive");
  const int n = box.dim();
  std::array<std::vector<double>, kMaxDim> cuts;
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i <= panels; ++i)
      cuts[a].push_back(i == panels ? box.upper(a) : box.lower(a) + box.width(a) * i / panels);
    for (double b : w.breakpoints(a))
      if (b > box.lower(a) && b < box.upper(a)) cuts[a].push_back(b);
    std::sort(cuts[a].begin(), cuts[a].end());
    cuts[a].erase(std::unique(cuts[a].begin(), cuts[a].end()), cuts[a].end());
  }
  for (int a = n; a < kMaxDim; ++a) cuts[a] = {0.0, 1.0};
  const std::size_t c0 = cuts[0].size() - 1, c1 = cuts[1].size() - 1, c2 = cuts[2].size() - 1;
  const auto& gl = GaussLegendre<8>::rule();
  std::vector<double> cell(c0 * c1 * c2, 0.0);
  parallel_for(cell.size(), [&](std::size_t k) {
    const std::size_t i = k % c0, j = (k / c0) % c1, l = k / (c0 * c1);
    const double lo[3] = {cuts[0][i], cuts[1][j], cuts[2][l]};
    const double hi[3] = {cuts[0][i + 1], cuts[1][j + 1], cuts[2][l + 1]};
    const int m1 = n > 1 ? 8 : 1, m2 = n > 2 ? 8 : 1;
    double s = 0.0;
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < m1; ++b)
        for (int c = 0; c < m2; ++c) {
          Point p{};
          double wt = 1.0;
          const int q[3] = {a, b, c};
          for (int d = 0; d < n; ++d) {
            const double half = 0.5 * (hi[d] - lo[d]);
            p[d] = 0.5 * (lo[d] + hi[d]) + half * gl.nodes[q[d]];
            wt *= gl.weights[q[d]] * half;
          }
          double g2 = 0.0;
          for (int d = 0; d < n; ++d) {
            const double g = f.derivative(p, d, n);
            g2 += g * g;
          }
          s += wt * measure_product(std::sqrt(g2), w(p));
        }
    cell[k] = s;
  });
  VariationReport r;
  r.value = pairwise_sum(cell);
  r.method = VariationMethod::volume_quadrature;
  return r;
}

/// sum over cells of w(x_c) |grad_h f(x_c)| h^n. A cell adds +inf only when its
/// weight is +inf and its gradient is nonzero.
inline VariationReport weighted_tv(const GridFunction& f, const GridFunction& w) {
  if (!(f.grid() == w.grid())) throw std::invalid_argument("f and w are sampled on different grids");
  if (!f.all_finite()) throw std::invalid_argument("weighted_tv needs a finite-valued function");
  const Grid& g = f.grid();
  std::vector<double> terms(g.size());
  parallel_for(g.size(), [&](std::size_t c) {
    terms[c] = measure_product(w[c], variation_detail::gradient_norm(f, c)) * g.cell_volume();
  });
  VariationReport r;
  r.value = pairwise_sum(terms);
  r.method = VariationMethod::gradient_sum;
  variation_detail::describe_grid(r, g);
  return r;
}

inline VariationReport weighted_tv(const GridFunction& f, const Weight& w) {
  return weighted_tv(f, sample(w, f.grid()));
}

/// Weighted L1 norm sum |f| w h^n (0 * inf = 0).
inline double weighted_l1(const GridFunction& f, const GridFunction& w) {
  if (!(f.grid() == w.grid())) throw std::invalid_argument("f and w are sampled on different grids");
  std::vector<double> t(f.size());
  for (std::size_t c = 0; c < f.size(); ++c)
    t[c] = measure_product(std::fabs(f[c]), w[c]) * f.grid().cell_volume();
  return pairwise_sum(t);
}

/// Weighted perimeter of a discrete set {mask = 1}: sum over interior faces
/// separating the set from its complement of w(face centre) * face area.
inline VariationReport cell_set_perimeter(const GridFunction& mask, const Weight& w) {
  const Grid& g = mask.grid();
  std::vector<double> terms(g.size());
  parallel_for(g.size(), [&](std::size_t c) {
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      if (!g.has_forward(c, a)) continue;
      if ((mask[c] > 0.5) != (mask[c + g.stride(a)] > 0.5))
        s += w(g.forward_face_center(c, a)) * g.face_area(a);
    }
    terms[c] = s;
  });
  VariationReport r;
  r.value = pairwise_sum(terms);
  r.method = VariationMethod::face_sum;
  variation_detail::describe_grid(r, g);
  return r;
}

// ---------------------------------------------------------------------------
// Perimeter of shapes.

namespace variation_detail {

inline std::vector<double> axis_cuts(const BoxUnion& u, const Weight& w, const BoxDomain& dom,
                                     int axis) {
  std::vector<double> cuts{dom.lower(axis), dom.upper(axis)};
  auto add = [&](double x) {
    if (x > dom.lower(axis) && x < dom.upper(axis)) cuts.push_back(x);
  };
  for (const Box& b : u.boxes) {
    add(b.lower[axis]);
    add(b.upper[axis]);
  }
  for (double x : w.breakpoints(axis)) add(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

/// Integral of w over the axis-aligned facet {x_axis = pos} x prod [lo_b, hi_b].
inline QuadratureResult facet_integral(const Weight& w, int dim, int axis, double pos,
                                       const Point& lo, const Point& hi) {
  Point x{};
  x[axis] = pos;
  if (dim == 1) return {w(x), 0.0, true};
  if (dim == 2) {
    const int b = 1 - axis;
    return integrate(
        [&](double t) {
          Point p = x;
          p[b] = t;
          return w(p);
        },
        lo[b], hi[b], 1e-10);
  }
  // 3-D: tensor Gauss-Legendre on the rectangle (w smooth inside by construction).
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  const auto& gl = GaussLegendre<16>::rule();
  const double mb = 0.5 * (lo[b] + hi[b]), hb = 0.5 * (hi[b] - lo[b]);
  const double mc = 0.5 * (lo[c] + hi[c]), hc = 0.5 * (hi[c] - lo[c]);
  double s = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      Point p = x;
      p[b] = mb + hb * gl.nodes[i];
      p[c] = mc + hc * gl.nodes[j];
      s += gl.weights[i] * gl.weights[j] * w(p);
    }
  return {s * hb * hc, 0.0, true};
}

inline VariationReport box_union_perimeter(const ShapeSet& shape, const BoxUnion& u,
                                           const Weight& w, const BoxDomain& dom) {
  const int n = dom.dim();
  std::array<std::vector<double>, kMaxDim> cuts;
  for (int a = 0; a < n; ++a) cuts[a] = axis_cuts(u, w, dom, a);
  std::array<int, kMaxDim> cnt{1, 1, 1};
  for (int a = 0; a < n; ++a) cnt[a] = static_cast<int>(cuts[a].size()) - 1;
  auto mid = [&](int a, int i) { return 0.5 * (cuts[a][i] + cuts[a][i + 1]); };

  // Membership of each sub-cell of the rectilinear partition.
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(cnt[a]);
  auto unpack = [&](std::size_t l) {
    std::array<int, kMaxDim> idx{};
    for (int a = 0; a < n; ++a) {
      idx[a] = static_cast<int>(l % static_cast<std::size_t>(cnt[a]));
      l /= static_cast<std::size_t>(cnt[a]);
    }
    return idx;
  };
  auto pack = [&](const std::array<int, kMaxDim>& idx) {
    std::size_t l = 0, m = 1;
    for (int a = 0; a < n; ++a) {
      l += static_cast<std::size_t>(idx[a]) * m;
      m *= static_cast<std::size_t>(cnt[a]);
    }
    return l;
  };
  std::vector<char> in(total);
  for (std::size_t l = 0; l < total; ++l) {
    const auto idx = unpack(l);
    Point p{};
    for (int a = 0; a < n; ++a) p[a] = mid(a, idx[a]);
    in[l] = shape.contains(p) ? 1 : 0;
  }

  std::vector<double> vals, errs;
  bool converged = true;
  for (std::size_t l = 0; l < total; ++l) {
    const auto idx = unpack(l);
    for (int a = 0; a < n; ++a) {
      if (idx[a] + 1 >= cnt[a]) continue;  // faces on the box boundary are not in the open domain
      auto nb = idx;
      ++nb[a];
      if (in[l] == in[pack(nb)]) continue;
      Point lo{}, hi{};
      for (int b = 0; b < n; ++b) {
        lo[b] = cuts[b][idx[b]];
        hi[b] = cuts[b][idx[b] + 1];
      }
      const double pos = cuts[a][idx[a] + 1];
      const QuadratureResult q = facet_integral(w, n, a, pos, lo, hi);
      vals.push_back(q.value);
      errs.push_back(q.error);
      converged = converged && q.converged;
    }
  }
  VariationReport r;
  r.value = pairwise_sum(vals);
  r.error_estimate = pairwise_sum(errs);
  r.method = VariationMethod::face_sum;
  if (!converged && !is_inf(r.value))
    throw NumericError("facet quadrature did not converge for " + shape.name());
  return r;
}

inline VariationReport parametric_perimeter(const ShapeSet& shape, const ParametricBoundary& p,
                                            const Weight& w, const BoxDomain& dom) {
  std::vector<double> vals, errs;
  bool converged = true;
  if (dom.dim() == 2) {
    for (const Curve& c : p.curves) {
      auto integrand = [&](double t) {
        const Point x = c.position(t);
        if (!dom.contains(x)) return 0.0;
        const Point v = c.velocity(t);
        return measure_product(w(x), norm(v, 2));
      };
      const int panels = 16;
      for (int k = 0; k < panels; ++k) {
        const double a = c.t0 + (c.t1 - c.t0) * k / panels;
        const double b = c.t0 + (c.t1 - c.t0) * (k + 1) / panels;
        const QuadratureResult q = integrate(integrand, a, b, 1e-10);
        vals.push_back(q.value);
        errs.push_back(q.error);
        converged = converged && q.converged;
      }
    }
  } else if (dom.dim() == 3) {
    const auto& gl = GaussLegendre<16>::rule();
    for (const Sphere& s : p.spheres) {
      // cos(theta) panels x uniform phi; both rules are exact for smooth w to high order.
      const int tp = 8, m = 128;
      double sum = 0.0;
      for (int k = 0; k < tp; ++k) {
        const double u0 = -1.0 + 2.0 * k / tp, u1 = -1.0 + 2.0 * (k + 1) / tp;
        for (int i = 0; i < 16; ++i) {
          const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * gl.nodes[i];
          const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
          for (int j = 0; j < m; ++j) {
            const double ph = 2.0 * std::numbers::pi * (j + 0.5) / m;
            Point x = s.center;
            x[0] += s.radius * st * std::cos(ph);
            x[1] += s.radius * st * std::sin(ph);
            x[2] += s.radius * u;
            if (!dom.contains(x)) continue;
            sum += 0.5 * (u1 - u0) * gl.weights[i] * (2.0 * std::numbers::pi / m) * w(x);
          }
        }
      }
      vals.push_back(sum * s.radius * s.radius);
    }
  } else {
    throw std::invalid_argument("parametric boundaries exist in 2-D and 3-D only");
  }
  VariationReport r;
  r.value = pairwise_sum(vals);
  r.error_estimate = pairwise_sum(errs);
  r.method = VariationMethod::boundary_quadrature;
  if (!converged && !is_inf(r.value))
    throw NumericError("boundary quadrature did not converge for " + shape.name());
  return r;
}

/// Zero crossings of phi along the open interval, by sampling then bracketing.
inline std::vector<double> implicit_roots_1d(const ImplicitSet& s, double a, double b,
                                             int samples = 4096) {
  std::vector<double> roots;
  auto phi = [&](double x) { return s.phi(Point{x, 0.0, 0.0}); };
  double x0 = a, f0 = phi(a + 1e-12 * (b - a));
  for (int i = 1; i <= samples; ++i) {
    const double x1 = a + (b - a) * i / samples;
    const double f1 = phi(i == samples ? b - 1e-12 * (b - a) : x1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++it) {
        const double m = 0.5 * (lo + hi);
        if ((phi(m) < 0.0) == (flo < 0.0)) lo = m;
        else hi = m;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

/// Marching squares on a regular lattice: integral of w along {phi = 0}.
inline VariationReport implicit_perimeter_2d(const ImplicitSet& s, const Weight& w,
                                             const BoxDomain& dom, int res) {
  const double hx = dom.width(0) / res, hy = dom.width(1) / res;
  auto node = [&](int i, int j) { return Point{dom.lower(0) + i * hx, dom.lower(1) + j * hy, 0.0}; };
  std::vector<double> phi(static_cast<std::size_t>((res + 1) * (res + 1)));
  for (int j = 0; j <= res; ++j)
    for (int i = 0; i <= res; ++i) phi[static_cast<std::size_t>(j * (res + 1) + i)] = s.phi(node(i, j));
  auto at = [&](int i, int j) { return phi[static_cast<std::size_t>(j * (res + 1) + i)]; };
  auto cross = [](const Point& p, double fp, const Point& q, double fq) {
    const double t = fp / (fp - fq);
    return Point{p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), 0.0};
  };
  const auto& gl = GaussLegendre<4>::rule();
  std::vector<double> vals;
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      const Point c[4] = {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
      const double f[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      std::vector<Point> pts;
      for (int e = 0; e < 4; ++e) {
        const int k = (e + 1) % 4;
        if ((f[e] < 0.0) != (f[k] < 0.0)) pts.push_back(cross(c[e], f[e], c[k], f[k]));
      }
      for (std::size_t e = 0; e + 1 < pts.size(); e += 2) {
        const Point& p = pts[e];
        const Point& q = pts[e + 1];
        const double len = distance(p, q, 2);
        double sum = 0.0;
        for (int g = 0; g < 4; ++g) {
          const double t = 0.5 * (1.0 + gl.nodes[g]);
          const Point x{p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), 0.0};
          sum += 0.5 * gl.weights[g] * w(x);
        }
        vals.push_back(measure_product(sum, len));
      }
    }
  VariationReport r;
  r.value = pairwise_sum(vals);
  r.method = VariationMethod::boundary_quadrature;
  r.resolution = {res, res};
  r.spacing = {hx, hy};
  return r;
}

}  // namespace variation_detail

struct PerimeterOptions {
  int implicit_resolution = 1024;  ///< marching-squares lattice for implicit 2-D sets
};

/// Weighted perimeter of E relative to the open box: the part of the boundary
/// lying on the box boundary is not counted.
inline VariationReport weighted_perimeter(const ShapeSet& shape, const Weight& w,
                                          const BoxDomain& domain,
                                          const PerimeterOptions& opt = {}) {
  if (shape.dim() != domain.dim())
    throw std::invalid_argument("shape and domain dimensions differ");
  return std::visit(
      [&](const auto& rep) -> VariationReport {
        using R = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<R, BoxUnion>) {
          return variation_detail::box_union_perimeter(shape, rep, w, domain);
        } else if constexpr (std::is_same_v<R, ParametricBoundary>) {
          return variation_detail::parametric_perimeter(shape, rep, w, domain);
        } else {
          if (domain.dim() == 1) {
            std::vector<double> vals;
            for (double x : variation_detail::implicit_roots_1d(rep, domain.lower(0), domain.upper(0)))
              vals.push_back(w(x));
            VariationReport r;
            r.value = pairwise_sum(vals);
            r.method = VariationMethod::face_sum;
            return r;
          }
          if (domain.dim() == 2)
            return variation_detail::implicit_perimeter_2d(rep, w, domain, opt.implicit_resolution);
          throw std::invalid_argument("implicit sets are supported in 1-D and 2-D only");
        }
      },
      shape.representation());
}

// ---------------------------------------------------------------------------
// Duality.

/// A discrete vector field phi with one component per axis on each cell's
/// forward face. Component a of cell c is stored at a * size + c. Components on
/// the last layer along their axis are zero (compact support).
class TestField {
 public:
  TestField(Grid grid, std::vector<double> components)
      : grid_(std::move(grid)), phi_(std::move(components)) {
    if (phi_.size() != grid_.size() * static_cast<std::size_t>(grid_.dim()))
      throw std::invalid_argument("test field needs dim * cells components");
    for (int a = 0; a < grid_.dim(); ++a)
      for (std::size_t c = 0; c < grid_.size(); ++c)
        if (!grid_.has_forward(c, a) && component(a, c) != 0.0)
          throw std::invalid_argument("test field must vanish on boundary faces");
  }

  const Grid& grid() const noexcept { return grid_; }
  double component(int axis, std::size_t cell) const {
    return phi_[static_cast<std::size_t>(axis) * grid_.size() + cell];
  }
  double magnitude(std::size_t cell) const {
    double s = 0.0;
    for (int a = 0; a < grid_.dim(); ++a) s += component(a, cell) * component(a, cell);
    return std::sqrt(s);
  }

  /// max over cells of |phi_c| / w_c; feasible fields have certificate <= 1.
  double certificate(const GridFunction& w) const {
    double m = 0.0;
    for (std::size_t c = 0; c < grid_.size(); ++c) m = std::max(m, extended_ratio(magnitude(c), w[c]));
    return m;
  }

  /// Discrete divergence, the negative adjoint of the forward gradient.
  GridFunction divergence() const {
    std::vector<double> d(grid_.size(), 0.0);
    for (std::size_t c = 0; c < grid_.size(); ++c) {
      const auto idx = grid_.index(c);
      for (int a = 0; a < grid_.dim(); ++a) {
        const double back = idx[a] > 0 ? component(a, c - grid_.stride(a)) : 0.0;
        d[c] += (component(a, c) - back) / grid_.spacing(a);
      }
    }
    return {grid_, std::move(d)};
  }

  static TestField zero(const Grid& g) {
    return TestField(g, std::vector<double>(g.size() * static_cast<std::size_t>(g.dim()), 0.0));
  }

  /// Uniformly random direction per cell with |phi_c| = u w_c, u ~ U(0, 1).
  /// Cells with infinite weight get |phi_c| <= 1.
  static TestField random(const GridFunction& w, std::uint64_t seed) {
    const Grid& g = w.grid();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> phi(g.size() * static_cast<std::size_t>(g.dim()), 0.0);
    for (std::size_t c = 0; c < g.size(); ++c) {
      double v[kMaxDim] = {0, 0, 0}, s = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        if (!g.has_forward(c, a)) continue;
        v[a] = gauss(rng);
        s += v[a] * v[a];
      }
      const double len = unif(rng) * (is_inf(w[c]) ? 1.0 : w[c]);
      if (s == 0.0) continue;
      for (int a = 0; a < g.dim(); ++a)
        phi[static_cast<std::size_t>(a) * g.size() + c] = v[a] / std::sqrt(s) * len;
    }
    return TestField(g, std::move(phi));
  }

  /// phi_c = -w_c grad f / |grad f| where the gradient is nonzero. Attains the
  /// weighted TV exactly when w is finite where grad f is nonzero.
  static TestField optimal(const GridFunction& f, const GridFunction& w) {
    const Grid& g = f.grid();
    std::vector<double> phi(g.size() * static_cast<std::size_t>(g.dim()), 0.0);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double n = variation_detail::gradient_norm(f, c);
      if (n == 0.0 || is_inf(w[c])) continue;
      for (int a = 0; a < g.dim(); ++a) {
        if (!g.has_forward(c, a)) continue;
        const double d = (f[c + g.stride(a)] - f[c]) / g.spacing(a);
        phi[static_cast<std::size_t>(a) * g.size() + c] = -w[c] * d / n;
      }
    }
    return TestField(g, std::move(phi));
  }

 private:
  Grid grid_;
  std::vector<double> phi_;
};

/// sum f div_h(phi) h^n for a feasible phi; never exceeds weighted_tv(f, w).
inline double dual_lower_bound(const GridFunction& f, const GridFunction& w, const TestField& phi) {
  if (!(f.grid() == w.grid()) || !(f.grid() == phi.grid()))
    throw std::invalid_argument("f, w and phi live on different grids");
  const double cert = phi.certificate(w);
  if (cert > 1.0 + 1e-12) throw FeasibilityError(cert);
  const GridFunction d = phi.divergence();
  std::vector<double> t(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) t[c] = f[c] * d[c] * f.grid().cell_volume();
  return pairwise_sum(t);
}

inline double dual_lower_bound(const GridFunction& f, const Weight& w, const TestField& phi) {
  return dual_lower_bound(f, sample(w, f.grid()), phi);
}

// ---------------------------------------------------------------------------
// Lower semicontinuity.

struct LscOptions {
  double tolerance = 1e-9;
  /// Convergence is accepted when the last L1(w) gap is at most this share of
  /// the largest gap (or every gap is zero).
  double convergence_ratio = 0.25;
};

struct LscReport {
  std::vector<double> l1_gaps;
  std::vector<double> tvs;
  double tv_limit = 0.0;  ///< weighted TV of the limit f
  double liminf = 0.0;    ///< minimum over the second half of the sequence
  double gap = 0.0;       ///< liminf - tv_limit
  bool violation = false;
};

inline LscReport lsc_probe(const std::vector<GridFunction>& seq, const GridFunction& f,
                           const Weight& w, const LscOptions& opt = {}) {
  if (seq.size() < 2) throw std::invalid_argument("lsc_probe needs at least two terms");
  for (const GridFunction& fk : seq)
    if (!(fk.grid() == f.grid())) throw std::invalid_argument("sequence terms live on different grids");
  const GridFunction ws = sample(w, f.grid());
  LscReport r;
  double largest = 0.0;
  for (const GridFunction& fk : seq) {
    r.l1_gaps.push_back(weighted_l1(fk.plus(f.scaled(-1.0)), ws));
    largest = std::max(largest, r.l1_gaps.back());
  }
  if (!(r.l1_gaps.back() <= opt.convergence_ratio * largest))
    throw PreconditionError("sequence does not converge to f in L1(w)", r.l1_gaps);
  for (const GridFunction& fk : seq) r.tvs.push_back(weighted_tv(fk, ws).value);
  r.tv_limit = weighted_tv(f, ws).value;
  r.liminf = kInf;
  for (std::size_t k = seq.size() / 2; k < seq.size(); ++k) r.liminf = std::min(r.liminf, r.tvs[k]);
  r.gap = (is_inf(r.liminf) && is_inf(r.tv_limit)) ? 0.0 : r.liminf - r.tv_limit;
  r.violation = r.gap < -opt.tolerance;
  return r;
}

}  // namespace wbv
