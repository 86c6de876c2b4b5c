#pragma once

// Small arithmetic expression language used by configs and fixtures.
//
//   expr    := cmp
//   cmp     := sum (('<' | '<=' | '>' | '>=') sum)?
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?
//   atom    := number | name | name '(' args ')' | '(' expr ')'
//
// Variables: x, y, z (coordinates), r (Euclidean norm). Constants: pi, e, inf.
// Functions: abs sqrt exp log sin cos tan min max pow if(c, a, b).
// Comparisons evaluate to 1 or 0. Evaluation is templated so the same tree
// yields values (double) and directional derivatives (Dual).

#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "wbv/core/geometry.hpp"

namespace wbv {

/// Forward-mode dual number v + d*eps.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

namespace expr_detail {

inline double value_of(double a) { return a; }
inline double value_of(Dual a) { return a.v; }
template <class T>
T constant(double c) {
  if constexpr (std::is_same_v<T, Dual>) return Dual{c, 0.0};
  else return c;
}

inline double fabs_(double a) { return std::fabs(a); }
inline Dual fabs_(Dual a) { return a.v < 0 ? -a : (a.v > 0 ? a : Dual{0.0, 0.0}); }
inline double sqrt_(double a) { return std::sqrt(a); }
inline Dual sqrt_(Dual a) {
  const double s = std::sqrt(a.v);
  return {s, s > 0 ? a.d / (2.0 * s) : 0.0};
}
inline double exp_(double a) { return std::exp(a); }
inline Dual exp_(Dual a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
inline double log_(double a) { return std::log(a); }
inline Dual log_(Dual a) { return {std::log(a.v), a.d / a.v}; }
inline double sin_(double a) { return std::sin(a); }
inline Dual sin_(Dual a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline double cos_(double a) { return std::cos(a); }
inline Dual cos_(Dual a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
inline double tan_(double a) { return std::tan(a); }
inline Dual tan_(Dual a) {
  const double c = std::cos(a.v);
  return {std::tan(a.v), a.d / (c * c)};
}
inline double pow_(double a, double b) { return std::pow(a, b); }
inline Dual pow_(Dual a, Dual b) {
  const double p = std::pow(a.v, b.v);
  double d = 0.0;
  if (a.d != 0.0) d += b.v * std::pow(a.v, b.v - 1.0) * a.d;
  if (b.d != 0.0 && a.v > 0.0) d += p * std::log(a.v) * b.d;
  return {p, d};
}

enum class Op {
  number, var_x, var_y, var_z, var_r, add, sub, mul, div, neg, pow,
  lt, le, gt, ge, abs, sqrt, exp, log, sin, cos, tan, min, max, cond
};

struct Node {
  Op op;
  double number = 0.0;
  std::vector<std::shared_ptr<const Node>> args;
};

using NodePtr = std::shared_ptr<const Node>;

template <class T>
T eval(const Node& n, const T* vars) {
  auto arg = [&](std::size_t i) { return eval<T>(*n.args[i], vars); };
  switch (n.op) {
    case Op::number: return constant<T>(n.number);
    case Op::var_x: return vars[0];
    case Op::var_y: return vars[1];
    case Op::var_z: return vars[2];
    case Op::var_r: return vars[3];
    case Op::add: return arg(0) + arg(1);
    case Op::sub: return arg(0) - arg(1);
    case Op::mul: return arg(0) * arg(1);
    case Op::div: return arg(0) / arg(1);
    case Op::neg: return -arg(0);
    case Op::pow: return pow_(arg(0), arg(1));
    case Op::lt: return constant<T>(value_of(arg(0)) < value_of(arg(1)) ? 1.0 : 0.0);
    case Op::le: return constant<T>(value_of(arg(0)) <= value_of(arg(1)) ? 1.0 : 0.0);
    case Op::gt: return constant<T>(value_of(arg(0)) > value_of(arg(1)) ? 1.0 : 0.0);
    case Op::ge: return constant<T>(value_of(arg(0)) >= value_of(arg(1)) ? 1.0 : 0.0);
    case Op::abs: return fabs_(arg(0));
    case Op::sqrt: return sqrt_(arg(0));
    case Op::exp: return exp_(arg(0));
    case Op::log: return log_(arg(0));
    case Op::sin: return sin_(arg(0));
    case Op::cos: return cos_(arg(0));
    case Op::tan: return tan_(arg(0));
    case Op::min: {
      T a = arg(0), b = arg(1);
      return value_of(a) <= value_of(b) ? a : b;
    }
    case Op::max: {
      T a = arg(0), b = arg(1);
      return value_of(a) >= value_of(b) ? a : b;
    }
    case Op::cond: return value_of(arg(0)) != 0.0 ? arg(1) : arg(2);
  }
  return constant<T>(0.0);
}

class Parser {
 public:
  explicit Parser(const std::string& src) : s_(src) {}

  NodePtr parse() {
    NodePtr n = comparison();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression '" + s_ + "': " + msg + " at offset " +
                                std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(const char* tok) {
    skip();
    const std::string t(tok);
    if (s_.compare(pos_, t.size(), t) == 0) {
      pos_ += t.size();
      return true;
    }
    return false;
  }
  static NodePtr make(Op op, std::vector<NodePtr> args = {}, double number = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    n->number = number;
    return n;
  }

  NodePtr comparison() {
    NodePtr lhs = sum();
    if (accept("<=")) return make(Op::le, {lhs, sum()});
    if (accept(">=")) return make(Op::ge, {lhs, sum()});
    if (accept("<")) return make(Op::lt, {lhs, sum()});
    if (accept(">")) return make(Op::gt, {lhs, sum()});
    return lhs;
  }
  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept("+")) n = make(Op::add, {n, product()});
      else if (accept("-")) n = make(Op::sub, {n, product()});
      else return n;
    }
  }
  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept("*")) n = make(Op::mul, {n, unary()});
      else if (accept("/")) n = make(Op::div, {n, unary()});
      else return n;
    }
  }
  NodePtr unary() {
    if (accept("-")) return make(Op::neg, {unary()});
    if (accept("+")) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (accept("^")) return make(Op::pow, {base, unary()});
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = comparison();
      if (!accept(")")) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return make(Op::number, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (accept("(")) return call(name);
      if (name == "x") return make(Op::var_x);
      if (name == "y") return make(Op::var_y);
      if (name == "z") return make(Op::var_z);
      if (name == "r") return make(Op::var_r);
      if (name == "pi") return make(Op::number, {}, std::numbers::pi);
      if (name == "e") return make(Op::number, {}, std::numbers::e);
      if (name == "inf") return make(Op::number, {}, std::numeric_limits<double>::infinity());
      fail("unknown name '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
  NodePtr call(const std::string& name) {
    std::vector<NodePtr> args;
    if (!accept(")")) {
      do {
        args.push_back(comparison());
      } while (accept(","));
      if (!accept(")")) fail("expected ')' after arguments of " + name);
    }
    struct Fn {
      const char* name;
      Op op;
      std::size_t arity;
    };
    static constexpr Fn table[] = {
        {"abs", Op::abs, 1}, {"sqrt", Op::sqrt, 1}, {"exp", Op::exp, 1},
        {"log", Op::log, 1}, {"sin", Op::sin, 1},   {"cos", Op::cos, 1},
        {"tan", Op::tan, 1}, {"min", Op::min, 2},   {"max", Op::max, 2},
        {"pow", Op::pow, 2}, {"if", Op::cond, 3},
    };
    for (const Fn& f : table) {
      if (name == f.name) {
        if (args.size() != f.arity)
          fail(name + " expects " + std::to_string(f.arity) + " arguments");
        return make(f.op, std::move(args));
      }
    }
    fail("unknown function '" + name + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace expr_detail

/// A parsed expression in the variables x, y, z, r.
class Expr {
 public:
  explicit Expr(const std::string& source)
      : source_(source), root_(expr_detail::Parser(source).parse()) {}

  const std::string& source() const noexcept { return source_; }

  double operator()(const Point& p, int dim = kMaxDim) const {
    const double vars[4] = {p[0], p[1], p[2], norm(p, dim)};
    return expr_detail::eval<double>(*root_, vars);
  }
  double operator()(double x) const { return (*this)(Point{x, 0.0, 0.0}, 1); }

  /// Partial derivative along `axis` by forward-mode differentiation.
  double derivative(const Point& p, int axis, int dim = kMaxDim) const {
    Dual vars[4] = {{p[0], 0.0}, {p[1], 0.0}, {p[2], 0.0}, {norm(p, dim), 0.0}};
    vars[axis].d = 1.0;
    if (vars[3].v > 0.0) vars[3].d = p[axis] / vars[3].v;
    return expr_detail::eval<Dual>(*root_, vars).d;
  }
  double derivative(double x) const { return derivative(Point{x, 0.0, 0.0}, 0, 1); }

 private:
  std::string source_;
  expr_detail::NodePtr root_;
};

}  // namespace wbv
