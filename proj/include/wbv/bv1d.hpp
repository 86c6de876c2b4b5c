#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wbv/core/errors.hpp"
#include "wbv/core/expr.hpp"
#include "wbv/core/extended.hpp"
#include "wbv/core/mollifier.hpp"
#include "wbv/core/parallel.hpp"
#include "wbv/core/quadrature.hpp"
#include "wbv/core/weight.hpp"

namespace wbv {

/// A smooth piece with its derivative.
struct Piece {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::string description;

  static Piece constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, std::to_string(c)};
  }
  /// slope * x + intercept.
  static Piece linear(double slope, double intercept) {
    return {[=](double x) { return slope * x + intercept; }, [slope](double) { return slope; },
            std::to_string(slope) + "*x+" + std::to_string(intercept)};
  }
  static Piece expression(const Expr& e) {
    return {[e](double x) { return e(x); }, [e](double x) { return e.derivative(x); }, e.source()};
  }
};

/// A 1-D BV function: breakpoints x_1 < ... < x_m, m + 1 smooth pieces and the
/// jump f(x_j+) - f(x_j-) at each breakpoint. The value at a breakpoint is the
/// right limit.
class PiecewiseFunction1D {
 public:
  PiecewiseFunction1D(std::vector<double> breakpoints, std::vector<Piece> pieces)
      : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    validate_shape();
    for (std::size_t j = 0; j < breaks_.size(); ++j)
      jumps_.push_back(pieces_[j + 1].value(breaks_[j]) - pieces_[j].value(breaks_[j]));
  }
  /// With caller-supplied jumps, checked against the piece limits to 1e-10.
  PiecewiseFunction1D(std::vector<double> breakpoints, std::vector<Piece> pieces,
                      std::vector<double> jumps)
      : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)), jumps_(std::move(jumps)) {
    validate_shape();
    if (jumps_.size() != breaks_.size())
      throw std::invalid_argument("one jump height per breakpoint is required");
    for (std::size_t j = 0; j < breaks_.size(); ++j) {
      const double limit = pieces_[j + 1].value(breaks_[j]) - pieces_[j].value(breaks_[j]);
      if (!(std::fabs(limit - jumps_[j]) <= 1e-10 * std::max(1.0, std::fabs(limit))))
        throw std::invalid_argument("jump at " + std::to_string(breaks_[j]) + " is " +
                                    std::to_string(jumps_[j]) + " but the piece limits differ by " +
                                    std::to_string(limit));
    }
  }

  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  const std::vector<double>& jumps() const noexcept { return jumps_; }

  std::size_t piece_index(double x) const {
    return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) -
                                    breaks_.begin());
  }
  double operator()(double x) const { return pieces_[piece_index(x)].value(x); }
  double derivative(double x) const { return pieces_[piece_index(x)].derivative(x); }

  /// Characteristic function of (a, b).
  static PiecewiseFunction1D indicator(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("indicator needs a < b");
    return {{a, b}, {Piece::constant(0.0), Piece::constant(1.0), Piece::constant(0.0)}};
  }
  static PiecewiseFunction1D smooth(const Expr& e) { return {{}, {Piece::expression(e)}}; }
  static PiecewiseFunction1D from_expressions(std::vector<double> breaks,
                                              const std::vector<std::string>& exprs) {
    std::vector<Piece> p;
    for (const auto& s : exprs) p.push_back(Piece::expression(Expr(s)));
    return {std::move(breaks), std::move(p)};
  }
  /// Pieces slope_i * x + intercept_i.
  static PiecewiseFunction1D linear_pieces(std::vector<double> breaks,
                                           const std::vector<std::pair<double, double>>& lines) {
    std::vector<Piece> p;
    for (const auto& [m, c] : lines) p.push_back(Piece::linear(m, c));
    return {std::move(breaks), std::move(p)};
  }
  /// Continuous piecewise-linear interpolant of the nodes, constant outside them.
  static PiecewiseFunction1D interpolant(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
      throw std::invalid_argument("interpolant needs matching node lists of length >= 2");
    std::vector<Piece> p{Piece::constant(ys.front())};
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double m = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
      p.push_back(Piece::linear(m, ys[i] - m * xs[i]));
    }
    p.push_back(Piece::constant(ys.back()));
    return {xs, std::move(p)};
  }

 private:
  void validate_shape() const {
    if (pieces_.size() != breaks_.size() + 1)
      throw std::invalid_argument("m breakpoints need m + 1 pieces");
    for (std::size_t j = 1; j < breaks_.size(); ++j)
      if (!(breaks_[j] > breaks_[j - 1]))
        throw std::invalid_argument("breakpoints must be strictly increasing");
    for (const Piece& p : pieces_)
      if (!p.value || !p.derivative) throw std::invalid_argument("every piece needs value and derivative");
  }

  std::vector<double> breaks_;
  std::vector<Piece> pieces_;
  std::vector<double> jumps_;
};

namespace bv1d_detail {

inline std::vector<double> weight_cuts(const Weight& w, double lo, double hi) {
  std::vector<double> c;
  for (double x : w.breakpoints(0))
    if (x > lo && x < hi) c.push_back(x);
  return c;
}

}  // namespace bv1d_detail

/// Weighted variation over the open interval (lo, hi): the integral of |f'| w
/// over the pieces plus |jump| w(x_j) at every breakpoint inside. +inf when a
/// nonzero jump sits where w is infinite.
inline double variation_1d(const PiecewiseFunction1D& f, const Weight& w, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("variation_1d needs lo < hi");
  std::vector<double> jumps;
  for (std::size_t j = 0; j < f.breakpoints().size(); ++j) {
    const double x = f.breakpoints()[j];
    if (x > lo && x < hi) jumps.push_back(measure_product(std::fabs(f.jumps()[j]), w(x)));
  }
  const double atoms = pairwise_sum(jumps);
  if (is_inf(atoms)) return kInf;

  std::vector<double> cuts{lo};
  for (double x : f.breakpoints())
    if (x > lo && x < hi) cuts.push_back(x);
  cuts.push_back(hi);
  const std::vector<double> wcuts = bv1d_detail::weight_cuts(w, lo, hi);
  std::vector<double> smooth;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Piece& p = f.pieces()[f.piece_index(0.5 * (cuts[i] + cuts[i + 1]))];
    auto integrand = [&](double x) { return measure_product(std::fabs(p.derivative(x)), w(x)); };
    smooth.push_back(integrate_or_throw(integrand, cuts[i], cuts[i + 1],
                                        "|f'| w on piece '" + p.description + "'", 1e-8, wcuts));
  }
  return atoms + pairwise_sum(smooth);
}

/// Weighted perimeter of a finite union of disjoint open intervals:
/// the sum of w over all endpoints.
inline double perimeter_1d(std::vector<std::pair<double, double>> intervals, const Weight& w) {
  std::sort(intervals.begin(), intervals.end());
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (!(intervals[i].second > intervals[i].first))
      throw std::invalid_argument("interval must satisfy a < b");
    if (i > 0 && !(intervals[i].first > intervals[i - 1].second))
      throw std::invalid_argument("intervals overlap or share an endpoint");
  }
  std::vector<double> v;
  for (const auto& [a, b] : intervals) {
    v.push_back(w(a));
    v.push_back(w(b));
  }
  return pairwise_sum(v);
}

/// Weighted variation of eta_eps * chi_(a, b), whose derivative is
/// eta_eps(x - a) - eta_eps(x - b). (a, b, eps) = (-1/k, 1, 1/k) gives the
/// mollified indicators of (-1/k, 1).
inline double mollified_indicator_tv(double a, double b, const Weight& w, double eps) {
  if (!(eps > 0.0) || !(eps < (b - a) / 4.0))
    throw std::invalid_argument("mollified_indicator_tv needs 0 < eps < (b - a) / 4");
  const Mollifier eta(eps, 1);
  auto integrand = [&](double x) {
    return measure_product(std::fabs(eta(x - a) - eta(x - b)), w(x));
  };
  std::vector<double> parts;
  for (double c : {a, b}) {
    std::vector<double> cuts = bv1d_detail::weight_cuts(w, c - eps, c + eps);
    cuts.push_back(c);
    parts.push_back(integrate_or_throw(integrand, c - eps, c + eps, "mollified bump", 1e-12, cuts));
  }
  return pairwise_sum(parts);
}

enum class Verdict { approximable, not_approximable, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::approximable: return "approximable";
    case Verdict::not_approximable: return "not-approximable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct AtomProbe {
  double at = 0.0;
  double jump = 0.0;
  std::vector<double> eps;
  std::vector<double> averages;  ///< (1 / 2eps) * integral over B(at, eps) of |w - w(at)|
  bool lebesgue_point = false;
  Verdict status = Verdict::inconclusive;
};

struct ApproximabilityReport {
  Verdict verdict = Verdict::approximable;
  std::vector<AtomProbe> atoms;
  /// Verdict of the same probe with w replaced by w^(1/2); set by callers that
  /// run it.
  std::optional<Verdict> delta_half;
};

struct ProbeOptions {
  double eps_max = 0.1;
  int halvings = 27;          ///< eps down to ~1e-9
  double lebesgue_tol = 1e-6; ///< relative to max(1, w(x))
  double plateau_rel = 1e-2;  ///< last three averages within this spread
};

/// Average oscillation of w around x over shrinking balls.
inline AtomProbe lebesgue_probe(const Weight& w, double x, const ProbeOptions& opt = {}) {
  AtomProbe p;
  p.at = x;
  const double wx = w(x);
  if (is_inf(wx)) {
    p.status = Verdict::not_approximable;
    return p;
  }
  for (int j = 0; j < opt.halvings; ++j) {
    const double e = opt.eps_max * std::ldexp(1.0, -j);
    std::vector<double> cuts = bv1d_detail::weight_cuts(w, x - e, x + e);
    cuts.push_back(x);
    // Averages far below the Lebesgue tolerance need no relative accuracy.
    const double abs_tol = 1e-3 * opt.lebesgue_tol * std::max(1.0, std::fabs(wx)) * 2.0 * e;
    const QuadratureResult q = integrate([&](double y) { return std::fabs(w(y) - wx); }, x - e,
                                         x + e, 1e-10, cuts, abs_tol);
    p.eps.push_back(e);
    p.averages.push_back(q.value / (2.0 * e));
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

/// Checks that every atom of |Df| (a nonzero jump) is a Lebesgue point of w.
inline ApproximabilityReport approximability_probe_1d(const PiecewiseFunction1D& f, const Weight& w,
                                                      const ProbeOptions& opt = {}) {
  ApproximabilityReport r;
  bool any_inconclusive = false, any_bad = false;
  for (std::size_t j = 0; j < f.breakpoints().size(); ++j) {
    if (f.jumps()[j] == 0.0) continue;
    AtomProbe p = lebesgue_probe(w, f.breakpoints()[j], opt);
    p.jump = f.jumps()[j];
    any_bad = any_bad || p.status == Verdict::not_approximable;
    any_inconclusive = any_inconclusive || p.status == Verdict::inconclusive;
    r.atoms.push_back(std::move(p));
  }
  r.verdict = any_bad ? Verdict::not_approximable
                      : (any_inconclusive ? Verdict::inconclusive : Verdict::approximable);
  return r;
}

}  // namespace wbv
