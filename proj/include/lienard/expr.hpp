#pragma once

#include <cmath>
#include <concepts>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "lienard/errors.hpp"

namespace lienard {

enum class Op {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Abs,
  Sign,
  Exp,
  Ln,
  Sqrt,
  Sin,
  Cos,
};

/// Independent variables. Problem functions only use `U`; `T` exists for
/// user-supplied generator components xi(t,u), eta(t,u).
enum class Var { U, T };

class Expr;

namespace detail {
struct Node;
}

/// Immutable expression tree in u (and optionally t).
///
/// Construction goes through the free functions and operators below, which
/// fold constants and drop the identities e+0, e*1, e*0, e^1, e^0. Nothing
/// else is rewritten, so evaluation of a built tree follows exactly the
/// structure written by the caller.
class Expr {
 public:
  Expr();  // constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor)

  static Expr constant(double value);
  static Expr variable(Var v = Var::U);

  Op op() const;
  double value() const;  // Constant only
  Var var() const;       // Variable only
  Expr lhs() const;
  Expr rhs() const;
  Expr arg() const { return lhs(); }

  bool is_constant() const { return op() == Op::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }
  bool depends_on(Var v) const;
  std::size_t size() const;

  const detail::Node& node() const { return *node_; }

  /// Structural identity (same tree shape, same constants).
  friend bool same_structure(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  friend struct ExprAccess;

  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  Op op = Op::Constant;
  double value = 0.0;
  Var var = Var::U;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};
}  // namespace detail

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr abs(const Expr& e);
Expr sign(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sqrt(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);

/// Parses the grammar: decimal/scientific numbers, `u` (and `t` when
/// `allow_t`), + - * / ^, unary minus, parentheses, and the functions
/// abs, sign, exp, ln, sqrt, sin, cos. `^` is right-associative and binds
/// tighter than unary minus.
Expr parse(std::string_view text, bool allow_t = false);

/// Textual form accepted by `parse`; constants are printed with 17
/// significant digits so the round trip is exact.
std::string to_string(const Expr& e);

/// d e / d v. Sign differentiates to 0; Abs to sign(inner) * inner'.
Expr differentiate(const Expr& e, Var v = Var::U);

/// Constant folding and identity elimination over an existing tree.
Expr simplify(const Expr& e);

namespace detail {

template <class Scalar>
Scalar checked(Scalar r, const char* what) {
  using std::isfinite;
  if (!isfinite(r)) throw DomainError(std::string("non-finite result in ") + what);
  return r;
}

template <class Scalar>
Scalar eval_node(const Node& n, Scalar u, Scalar t) {
  switch (n.op) {
    case Op::Constant:
      return static_cast<Scalar>(n.value);
    case Op::Variable:
      return n.var == Var::U ? u : t;
    case Op::Add:
      return checked(eval_node(*n.lhs, u, t) + eval_node(*n.rhs, u, t), "addition");
    case Op::Sub:
      return checked(eval_node(*n.lhs, u, t) - eval_node(*n.rhs, u, t), "subtraction");
    case Op::Mul:
      return checked(eval_node(*n.lhs, u, t) * eval_node(*n.rhs, u, t), "multiplication");
    case Op::Div: {
      const Scalar d = eval_node(*n.rhs, u, t);
      if (d == Scalar(0)) throw DomainError("division by zero");
      return checked(eval_node(*n.lhs, u, t) / d, "division");
    }
    case Op::Pow: {
      const Scalar b = eval_node(*n.lhs, u, t);
      const Scalar x = eval_node(*n.rhs, u, t);
      using std::trunc;
      if (b < Scalar(0) && trunc(x) != x) throw DomainError("fractional power of a negative base");
      if (b == Scalar(0) && x < Scalar(0)) throw DomainError("zero to a negative power");
      using std::pow;
      return checked(pow(b, x), "power");
    }
    case Op::Neg:
      return -eval_node(*n.lhs, u, t);
    case Op::Abs: {
      using std::abs;
      return abs(eval_node(*n.lhs, u, t));
    }
    case Op::Sign: {
      const Scalar x = eval_node(*n.lhs, u, t);
      return x > Scalar(0) ? Scalar(1) : (x < Scalar(0) ? Scalar(-1) : Scalar(0));
    }
    case Op::Exp: {
      using std::exp;
      return checked(exp(eval_node(*n.lhs, u, t)), "exp");
    }
    case Op::Ln: {
      const Scalar x = eval_node(*n.lhs, u, t);
      if (!(x > Scalar(0))) throw DomainError("ln of a non-positive value");
      using std::log;
      return log(x);
    }
    case Op::Sqrt: {
      const Scalar x = eval_node(*n.lhs, u, t);
      if (x < Scalar(0)) throw DomainError("sqrt of a negative value");
      using std::sqrt;
      return sqrt(x);
    }
    case Op::Sin: {
      using std::sin;
      return checked(sin(eval_node(*n.lhs, u, t)), "sin");
    }
    case Op::Cos: {
      using std::cos;
      return checked(cos(eval_node(*n.lhs, u, t)), "cos");
    }
  }
  throw DomainError("unknown node");
}

}  // namespace detail

/// Value of `e` at (u, t). Throws DomainError when any partial result is
/// non-finite (ln of a non-positive value, 0^negative, division by zero,
/// fractional power of a negative base).
template <std::floating_point Scalar = double>
Scalar evaluate(const Expr& e, Scalar u, Scalar t = Scalar(0)) {
  return detail::eval_node<Scalar>(e.node(), u, t);
}

/// Pointwise evaluation over a sample array.
template <class Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> evaluate(
    const Expr& e, const Eigen::ArrayBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = detail::eval_node<Scalar>(e.node(), u[i], Scalar(0));
  return out;
}

}  // namespace lienard
