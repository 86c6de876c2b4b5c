#pragma once

// Mini-language for weights, measures, sets and functions in configs and
// flags. A spec is a call `name(arg, key=value, ...)`; values are numbers,
// expressions, nested calls or bracketed lists `[a, b]`.
//
//   weights   const(1)  power(alpha=-0.5)  step(threshold=0, low=1, high=2, axis=0)
//             radial(profile=if(r<=1, 1, r^-1.5), breaks=[1])  expr(x^2+2)
//             cr(measure=dirac(0), delta=0.5)  product(w1, w2)  pow(w, delta=0.5)
//             any weight also takes a1=<constant> to record a known A1 constant
//   measures  lebesgue  dirac(at=[0])  atoms(at=[0, 1], mass=[1, 2])  geometric(base=2)
//   sets      interval(0, 1)  intervals([0, 1], [2, 3])  box(lower=[..], upper=[..])
//             disk(center=[0, 0], radius=1)  ellipse(center=[..], a=1, b=2)
//             ball(center=[0, 0, 0], radius=1)  implicit(x^2+y^2-1)  empty
//   1-D       indicator(0, 1)  tent(center=0, half_width=1)  smooth(<expr>)
//             pieces(breaks=[-1, 1], exprs=[0, 1-x^2, 0])  interpolant(xs=[..], ys=[..])
//   grid      expr(<expr>)  or any set spec (its indicator)

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wbv/bv1d.hpp"
#include "wbv/core/expr.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"
#include "wbv/core/measure.hpp"
#include "wbv/core/shape.hpp"
#include "wbv/core/weight.hpp"
#include "wbv/weights.hpp"

namespace wbv::cli {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Call {
  std::string name;
  std::vector<std::string> positional;
  std::map<std::string, std::string> named;
  std::string source;

  bool has(const std::string& key) const { return named.count(key) != 0; }
  /// named[key], else positional[index], else nullopt.
  std::optional<std::string> arg(const std::string& key, std::size_t index = SIZE_MAX) const {
    if (auto it = named.find(key); it != named.end()) return it->second;
    if (index < positional.size()) return positional[index];
    return std::nullopt;
  }
  std::string require(const std::string& key, std::size_t index = SIZE_MAX) const {
    if (auto v = arg(key, index)) return *v;
    throw SpecError("'" + source + "': missing argument '" + key + "'");
  }
};

namespace spec_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

/// Splits on commas at bracket depth zero.
inline std::vector<std::string> split_top(const std::string& s, const std::string& whole) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (depth < 0) throw SpecError("'" + whole + "': unbalanced brackets");
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) throw SpecError("'" + whole + "': unbalanced brackets");
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

/// Position of a top-level '=' that is not part of a comparison.
inline std::size_t assignment(const std::string& s) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c != '=' || depth != 0) continue;
    const char prev = i > 0 ? s[i - 1] : ' ';
    const char next = i + 1 < s.size() ? s[i + 1] : ' ';
    if (prev == '<' || prev == '>' || prev == '=' || prev == '!' || next == '=') continue;
    const std::string key = trim(s.substr(0, i));
    bool ident = !key.empty();
    for (char k : key) ident = ident && (std::isalnum(static_cast<unsigned char>(k)) || k == '_');
    if (ident) return i;
  }
  return std::string::npos;
}

}  // namespace spec_detail

inline Call parse_call(const std::string& text) {
  const std::string s = spec_detail::trim(text);
  Call c;
  c.source = s;
  const std::size_t open = s.find('(');
  if (open == std::string::npos) {
    c.name = s;
  } else {
    if (s.back() != ')') throw SpecError("'" + s + "': expected ')' at the end");
    c.name = spec_detail::trim(s.substr(0, open));
    for (const std::string& part : spec_detail::split_top(s.substr(open + 1, s.size() - open - 2), s)) {
      if (part.empty()) throw SpecError("'" + s + "': empty argument");
      const std::size_t eq = spec_detail::assignment(part);
      if (eq == std::string::npos) {
        c.positional.push_back(part);
      } else {
        const std::string key = spec_detail::trim(part.substr(0, eq));
        if (c.named.count(key)) throw SpecError("'" + s + "': argument '" + key + "' given twice");
        c.named[key] = spec_detail::trim(part.substr(eq + 1));
      }
    }
  }
  for (char ch : c.name)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'))
      throw SpecError("'" + s + "': bad name '" + c.name + "'");
  if (c.name.empty()) throw SpecError("empty spec");
  return c;
}

/// A constant expression such as -1/2 or 2*pi.
inline double parse_number(const std::string& text) {
  try {
    const double v = Expr(text)(Point{}, 1);
    if (std::isnan(v)) throw SpecError("'" + text + "' is not a number");
    return v;
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    throw SpecError("'" + text + "' is not a number: " + e.what());
  }
}

inline std::vector<std::string> parse_list_items(const std::string& text) {
  const std::string s = spec_detail::trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    return {s};
  return spec_detail::split_top(s.substr(1, s.size() - 2), s);
}

inline std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> v;
  for (const std::string& item : parse_list_items(text)) v.push_back(parse_number(item));
  return v;
}

inline Point parse_point(const std::string& text, int dim) {
  const std::vector<double> v = parse_numbers(text);
  if (static_cast<int>(v.size()) != dim)
    throw SpecError("'" + text + "': expected " + std::to_string(dim) + " coordinates");
  Point p{};
  for (int a = 0; a < dim; ++a) p[a] = v[a];
  return p;
}

namespace spec_detail {

inline void reject_unknown(const Call& c, std::initializer_list<const char*> keys, std::size_t max_pos) {
  for (const auto& [k, v] : c.named) {
    bool ok = false;
    for (const char* allowed : keys) ok = ok || k == allowed;
    if (!ok) throw SpecError("'" + c.source + "': unknown argument '" + k + "'");
  }
  if (c.positional.size() > max_pos)
    throw SpecError("'" + c.source + "': too many positional arguments");
}

}  // namespace spec_detail

inline Measure parse_measure(const std::string& text, int dim) {
  const Call c = parse_call(text);
  if (c.name == "lebesgue") {
    spec_detail::reject_unknown(c, {}, 0);
    return Measure::lebesgue(dim);
  }
  if (c.name == "dirac") {
    spec_detail::reject_unknown(c, {"at"}, 1);
    const auto at = c.arg("at", 0);
    return Measure::dirac(dim, at ? parse_point(*at, dim) : Point{});
  }
  if (c.name == "atoms") {
    spec_detail::reject_unknown(c, {"at", "mass"}, 0);
    if (dim != 1) throw SpecError("atoms(...) lists 1-D locations; use dirac in higher dimensions");
    const std::vector<double> at = parse_numbers(c.require("at"));
    const std::vector<double> mass = parse_numbers(c.require("mass"));
    if (at.size() != mass.size()) throw SpecError("'" + c.source + "': at and mass differ in length");
    std::vector<Atom> list;
    for (std::size_t i = 0; i < at.size(); ++i) list.push_back(Atom{Point{at[i], 0, 0}, mass[i]});
    return Measure::atoms(dim, std::move(list));
  }
  if (c.name == "geometric") {
    spec_detail::reject_unknown(c, {"base"}, 1);
    const auto base = c.arg("base", 0);
    return Measure::geometric_atoms(dim, base ? parse_number(*base) : 2.0);
  }
  throw SpecError("unknown measure '" + c.name + "' (lebesgue, dirac, atoms, geometric)");
}

/// `grid` is needed only by cr(...), which tabulates (M mu)^delta on it.
inline Weight parse_weight(const std::string& text, const Grid* grid = nullptr) {
  const Call c = parse_call(text);
  Weight w = [&]() -> Weight {
    if (c.name == "const") {
      spec_detail::reject_unknown(c, {"value", "a1"}, 1);
      return Weight::constant(parse_number(c.require("value", 0)));
    }
    if (c.name == "power") {
      spec_detail::reject_unknown(c, {"alpha", "center", "a1"}, 1);
      const auto center = c.arg("center");
      Point p{};
      if (center) {
        const std::vector<double> v = parse_numbers(*center);
        for (std::size_t a = 0; a < v.size() && a < 3; ++a) p[a] = v[a];
      }
      return Weight::power(parse_number(c.require("alpha", 0)), p);
    }
    if (c.name == "step") {
      spec_detail::reject_unknown(c, {"threshold", "low", "high", "axis", "a1"}, 4);
      const auto axis = c.arg("axis", 3);
      return Weight::step(parse_number(c.require("threshold", 0)), parse_number(c.require("low", 1)),
                          parse_number(c.require("high", 2)),
                          axis ? static_cast<int>(parse_number(*axis)) : 0);
    }
    if (c.name == "radial") {
      spec_detail::reject_unknown(c, {"profile", "breaks", "a1"}, 1);
      const std::string profile = c.require("profile", 0);
      const Expr e(profile);
      const auto breaks = c.arg("breaks");
      return Weight::radial([e](double r) { return e(Point{r, 0, 0}, 1); }, profile, breaks ? parse_numbers(*breaks) : std::vector<double>{});
    }
    if (c.name == "expr") {
      spec_detail::reject_unknown(c, {"value", "a1"}, 1);
      return Weight::expression(Expr(c.require("value", 0)));
    }
    if (c.name == "cr") {
      spec_detail::reject_unknown(c, {"measure", "delta", "a1"}, 2);
      if (!grid) throw SpecError("'" + c.source + "': cr(...) needs a grid");
      const Measure mu = parse_measure(c.require("measure", 0), grid->dim());
      const double delta = parse_number(c.require("delta", 1));
      return coifman_rochberg(mu, delta, *grid,
                              grid->dim() == 1 ? BallFamily::all_intervals() : BallFamily::dyadic());
    }
    if (c.name == "product") {
      spec_detail::reject_unknown(c, {"a1"}, 2);
      if (c.positional.size() != 2) throw SpecError("'" + c.source + "': product takes two weights");
      return Weight::product(parse_weight(c.positional[0], grid), parse_weight(c.positional[1], grid));
    }
    if (c.name == "pow") {
      spec_detail::reject_unknown(c, {"delta", "a1"}, 2);
      return delta_weight(parse_weight(c.require("weight", 0), grid),
                          parse_number(c.require("delta", 1)));
    }
    throw SpecError("unknown weight '" + c.name + "' (const, power, step, radial, expr, cr, product, pow)");
  }();
  if (const auto a1 = c.arg("a1")) {
    const double v = parse_number(*a1);
    for (int n = 1; n <= kMaxDim; ++n) w = w.with_known_a1(n, v);
  }
  return w;
}

inline ShapeSet parse_shape(const std::string& text, int dim) {
  const Call c = parse_call(text);
  auto need_dim = [&](int d) {
    if (dim != d)
      throw SpecError("'" + c.source + "' is a " + std::to_string(d) + "-D set but the grid is " +
                      std::to_string(dim) + "-D");
  };
  if (c.name == "empty") return ShapeSet::empty(dim);
  if (c.name == "interval") {
    need_dim(1);
    spec_detail::reject_unknown(c, {"a", "b"}, 2);
    return ShapeSet::interval(parse_number(c.require("a", 0)), parse_number(c.require("b", 1)));
  }
  if (c.name == "intervals") {
    need_dim(1);
    spec_detail::reject_unknown(c, {}, SIZE_MAX);
    std::vector<std::pair<double, double>> parts;
    for (const std::string& p : c.positional) {
      const std::vector<double> ab = parse_numbers(p);
      if (ab.size() != 2) throw SpecError("'" + p + "': an interval is [a, b]");
      parts.emplace_back(ab[0], ab[1]);
    }
    return ShapeSet::intervals(parts);
  }
  if (c.name == "box") {
    spec_detail::reject_unknown(c, {"lower", "upper"}, 2);
    return ShapeSet::box(dim, parse_point(c.require("lower", 0), dim), parse_point(c.require("upper", 1), dim));
  }
  if (c.name == "disk" || c.name == "ellipse") {
    need_dim(2);
    spec_detail::reject_unknown(c, {"center", "radius", "a", "b"}, 0);
    const auto center = c.arg("center");
    const Point p = center ? parse_point(*center, 2) : Point{};
    if (c.name == "disk") return ShapeSet::disk(p, parse_number(c.require("radius")));
    return ShapeSet::ellipse(p, parse_number(c.require("a")), parse_number(c.require("b")));
  }
  if (c.name == "ball") {
    need_dim(3);
    spec_detail::reject_unknown(c, {"center", "radius"}, 0);
    const auto center = c.arg("center");
    return ShapeSet::ball(center ? parse_point(*center, 3) : Point{}, parse_number(c.require("radius")));
  }
  if (c.name == "implicit") {
    spec_detail::reject_unknown(c, {"phi"}, 1);
    const std::string src = c.require("phi", 0);
    const Expr e(src);
    return ShapeSet::implicit(dim, [e, dim](const Point& x) { return e(x, dim); }, "implicit(" + src + ")");
  }
  throw SpecError("unknown set '" + c.name + "' (interval, intervals, box, disk, ellipse, ball, implicit, empty)");
}

inline PiecewiseFunction1D parse_function_1d(const std::string& text) {
  const Call c = parse_call(text);
  if (c.name == "indicator") {
    spec_detail::reject_unknown(c, {"a", "b"}, 2);
    return PiecewiseFunction1D::indicator(parse_number(c.require("a", 0)), parse_number(c.require("b", 1)));
  }
  if (c.name == "tent") {
    spec_detail::reject_unknown(c, {"center", "half_width", "height"}, 0);
    const double m = c.has("center") ? parse_number(c.require("center")) : 0.0;
    const double h = c.has("half_width") ? parse_number(c.require("half_width")) : 1.0;
    const double top = c.has("height") ? parse_number(c.require("height")) : 1.0;
    return PiecewiseFunction1D::interpolant({m - h, m, m + h}, {0.0, top, 0.0});
  }
  if (c.name == "smooth") {
    spec_detail::reject_unknown(c, {"value"}, 1);
    return PiecewiseFunction1D::smooth(Expr(c.require("value", 0)));
  }
  if (c.name == "pieces") {
    spec_detail::reject_unknown(c, {"breaks", "exprs"}, 0);
    return PiecewiseFunction1D::from_expressions(parse_numbers(c.require("breaks")),
                                                 parse_list_items(c.require("exprs")));
  }
  if (c.name == "interpolant") {
    spec_detail::reject_unknown(c, {"xs", "ys"}, 0);
    return PiecewiseFunction1D::interpolant(parse_numbers(c.require("xs")), parse_numbers(c.require("ys")));
  }
  throw SpecError("unknown 1-D function '" + c.name + "' (indicator, tent, smooth, pieces, interpolant)");
}

/// expr(<f>) sampled at cell centres, a 1-D piecewise spec sampled likewise,
/// or the indicator of a set spec.
inline GridFunction parse_grid_function(const std::string& text, const Grid& grid) {
  const Call c = parse_call(text);
  if (c.name == "expr") {
    spec_detail::reject_unknown(c, {"value"}, 1);
    const Expr e(c.require("value", 0));
    const int dim = grid.dim();
    return sample([&](const Point& x) { return e(x, dim); }, grid);
  }
  if (grid.dim() == 1 && (c.name == "indicator" || c.name == "tent" || c.name == "smooth" ||
                          c.name == "pieces" || c.name == "interpolant")) {
    const PiecewiseFunction1D f = parse_function_1d(text);
    return sample([&](const Point& x) { return f(x[0]); }, grid);
  }
  return indicator(parse_shape(text, grid.dim()), grid);
}

}  // namespace wbv::cli
