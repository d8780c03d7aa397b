#include "lienard/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>

namespace lienard {

struct ExprAccess {
  static Expr wrap(std::shared_ptr<const detail::Node> n) { return Expr(std::move(n)); }
  static const std::shared_ptr<const detail::Node>& ptr(const Expr& e) { return e.node_; }
};

namespace {

Expr make(Op op, const Expr& a, const Expr& b = Expr()) {
  auto n = std::make_shared<detail::Node>();
  n->op = op;
  n->lhs = ExprAccess::ptr(a);
  if (op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Pow)
    n->rhs = ExprAccess::ptr(b);
  return ExprAccess::wrap(std::move(n));
}

// Folds a constant only when the evaluation rules would accept it.
std::optional<Expr> fold(const Expr& e) {
  try {
    return Expr::constant(evaluate(e, 0.0));
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

bool both_constant(const Expr& a, const Expr& b) { return a.is_constant() && b.is_constant(); }

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::Constant;
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::variable(Var v) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::Variable;
  n->var = v;
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
Var Expr::var() const { return node_->var; }
Expr Expr::lhs() const { return Expr(node_->lhs); }
Expr Expr::rhs() const { return Expr(node_->rhs); }

bool Expr::depends_on(Var v) const {
  switch (op()) {
    case Op::Constant:
      return false;
    case Op::Variable:
      return var() == v;
    default:
      break;
  }
  if (node_->lhs && lhs().depends_on(v)) return true;
  return node_->rhs && rhs().depends_on(v);
}

std::size_t Expr::size() const {
  std::size_t s = 1;
  if (node_->lhs) s += lhs().size();
  if (node_->rhs) s += rhs().size();
  return s;
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Constant:
      return a.value() == b.value();
    case Op::Variable:
      return a.var() == b.var();
    default:
      break;
  }
  if (!same_structure(a.lhs(), b.lhs())) return false;
  const bool binary = a.node().rhs != nullptr;
  return !binary || same_structure(a.rhs(), b.rhs());
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  Expr e = make(Op::Add, a, b);
  if (both_constant(a, b))
    if (auto f = fold(e)) return *f;
  return e;
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  Expr e = make(Op::Sub, a, b);
  if (both_constant(a, b))
    if (auto f = fold(e)) return *f;
  return e;
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  Expr e = make(Op::Mul, a, b);
  if (both_constant(a, b))
    if (auto f = fold(e)) return *f;
  return e;
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(1.0)) return a;
  Expr e = make(Op::Div, a, b);
  if (both_constant(a, b))
    if (auto f = fold(e)) return *f;
  return e;
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.value());
  if (a.op() == Op::Neg) return a.arg();
  return make(Op::Neg, a);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant(1.0)) return base;
  if (exponent.is_constant(0.0)) return Expr(1.0);
  Expr e = make(Op::Pow, base, exponent);
  if (both_constant(base, exponent))
    if (auto f = fold(e)) return *f;
  return e;
}

namespace {
Expr unary(Op op, const Expr& a) {
  Expr e = make(op, a);
  if (a.is_constant())
    if (auto f = fold(e)) return *f;
  return e;
}
}  // namespace

Expr abs(const Expr& e) { return unary(Op::Abs, e); }
Expr sign(const Expr& e) { return unary(Op::Sign, e); }
Expr exp(const Expr& e) { return unary(Op::Exp, e); }
Expr ln(const Expr& e) { return unary(Op::Ln, e); }
Expr sqrt(const Expr& e) { return unary(Op::Sqrt, e); }
Expr sin(const Expr& e) { return unary(Op::Sin, e); }
Expr cos(const Expr& e) { return unary(Op::Cos, e); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, bool allow_t) : text_(text), allow_t_(allow_t) {}

  Expr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(0, "empty expression");
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError(pos_, "unbalanced ')'");
      throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::size_t clamp(std::size_t p) const { return text_.empty() ? 0 : std::min(p, text_.size() - 1); }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      if (accept('+'))
        e = make(Op::Add, e, parse_product());
      else if (accept('-'))
        e = make(Op::Sub, e, parse_product());
      else
        return e;
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*'))
        e = make(Op::Mul, e, parse_unary());
      else if (accept('/'))
        e = make(Op::Div, e, parse_unary());
      else
        return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return make(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return make(Op::Pow, base, parse_unary());
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(clamp(pos_), "unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      const std::size_t open = pos_++;
      Expr e = parse_sum();
      if (!accept(')')) throw ParseError(open, "unbalanced '('");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (c == ')') throw ParseError(pos_, "unbalanced ')'");
    throw ParseError(pos_, std::string("unknown token '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        digits();
      }
    }
    double value = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ParseError(start, "malformed number");
    return Expr(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "u") return Expr::variable(Var::U);
    if (name == "t") {
      if (!allow_t_) throw ParseError(start, "variable 't' is not allowed here");
      return Expr::variable(Var::T);
    }
    Op op;
    if (name == "abs")
      op = Op::Abs;
    else if (name == "sign")
      op = Op::Sign;
    else if (name == "exp")
      op = Op::Exp;
    else if (name == "ln")
      op = Op::Ln;
    else if (name == "sqrt")
      op = Op::Sqrt;
    else if (name == "sin")
      op = Op::Sin;
    else if (name == "cos")
      op = Op::Cos;
    else
      throw ParseError(start, "unknown identifier '" + std::string(name) + "'");

    if (!accept('('))
      throw ParseError(clamp(pos_), "expected '(' after function '" + std::string(name) + "'");
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ')')
      throw ParseError(pos_, "function '" + std::string(name) + "' takes exactly one argument");
    Expr arg = parse_sum();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ',')
      throw ParseError(pos_, "function '" + std::string(name) + "' takes exactly one argument");
    if (!accept(')')) throw ParseError(clamp(pos_), "unbalanced '(' in call to '" + std::string(name) + "'");
    return make(op, arg);
  }

  std::string_view text_;
  bool allow_t_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, bool allow_t) { return simplify(Parser(text, allow_t).run()); }

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength used to decide parenthesization.
int level(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Constant:
      return e.value() < 0 || std::signbit(e.value()) ? 3 : 5;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print(const Expr& e);

std::string wrap_if(const Expr& e, bool cond) { return cond ? "(" + print(e) + ")" : print(e); }

const char* func_name(Op op) {
  switch (op) {
    case Op::Abs:
      return "abs";
    case Op::Sign:
      return "sign";
    case Op::Exp:
      return "exp";
    case Op::Ln:
      return "ln";
    case Op::Sqrt:
      return "sqrt";
    case Op::Sin:
      return "sin";
    case Op::Cos:
      return "cos";
    default:
      return "?";
  }
}

std::string print(const Expr& e) {
  switch (e.op()) {
    case Op::Constant:
      return number(e.value());
    case Op::Variable:
      return e.var() == Var::U ? "u" : "t";
    case Op::Add:
      return print(e.lhs()) + " + " + wrap_if(e.rhs(), level(e.rhs()) <= 1 || level(e.rhs()) == 3);
    case Op::Sub:
      return print(e.lhs()) + " - " + wrap_if(e.rhs(), level(e.rhs()) <= 1 || level(e.rhs()) == 3);
    case Op::Mul:
      return wrap_if(e.lhs(), level(e.lhs()) < 2) + "*" + wrap_if(e.rhs(), level(e.rhs()) <= 3);
    case Op::Div:
      return wrap_if(e.lhs(), level(e.lhs()) < 2) + "/" + wrap_if(e.rhs(), level(e.rhs()) <= 3);
    case Op::Neg:
      return "-" + wrap_if(e.arg(), level(e.arg()) <= 3);
    case Op::Pow:
      return wrap_if(e.lhs(), level(e.lhs()) < 5) + "^" + wrap_if(e.rhs(), level(e.rhs()) < 5);
    default:
      return std::string(func_name(e.op())) + "(" + print(e.arg()) + ")";
  }
}

}  // namespace

std::string to_string(const Expr& e) { return print(e); }

// ---------------------------------------------------------------------------
// Differentiation and simplification

Expr differentiate(const Expr& e, Var v) {
  switch (e.op()) {
    case Op::Constant:
      return Expr(0.0);
    case Op::Variable:
      return Expr(e.var() == v ? 1.0 : 0.0);
    case Op::Add:
      return differentiate(e.lhs(), v) + differentiate(e.rhs(), v);
    case Op::Sub:
      return differentiate(e.lhs(), v) - differentiate(e.rhs(), v);
    case Op::Mul: {
      const Expr a = e.lhs(), b = e.rhs();
      return differentiate(a, v) * b + a * differentiate(b, v);
    }
    case Op::Div: {
      const Expr a = e.lhs(), b = e.rhs();
      const Expr db = differentiate(b, v);
      const Expr da = differentiate(a, v);
      if (db.is_constant(0.0)) return da / b;
      return da / b - a * db / (b * b);
    }
    case Op::Pow: {
      const Expr base = e.lhs(), x = e.rhs();
      const Expr dx = differentiate(x, v);
      const Expr db = differentiate(base, v);
      if (dx.is_constant(0.0)) return x * pow(base, x - Expr(1.0)) * db;
      return e * (dx * ln(base) + x * db / base);
    }
    case Op::Neg:
      return -differentiate(e.arg(), v);
    case Op::Abs:
      return sign(e.arg()) * differentiate(e.arg(), v);
    case Op::Sign:
      return Expr(0.0);
    case Op::Exp:
      return e * differentiate(e.arg(), v);
    case Op::Ln:
      return differentiate(e.arg(), v) / e.arg();
    case Op::Sqrt:
      return differentiate(e.arg(), v) / (Expr(2.0) * e);
    case Op::Sin:
      return cos(e.arg()) * differentiate(e.arg(), v);
    case Op::Cos:
      return -(sin(e.arg()) * differentiate(e.arg(), v));
  }
  return Expr(0.0);
}

Expr simplify(const Expr& e) {
  switch (e.op()) {
    case Op::Constant:
    case Op::Variable:
      return e;
    case Op::Add:
      return simplify(e.lhs()) + simplify(e.rhs());
    case Op::Sub:
      return simplify(e.lhs()) - simplify(e.rhs());
    case Op::Mul:
      return simplify(e.lhs()) * simplify(e.rhs());
    case Op::Div:
      return simplify(e.lhs()) / simplify(e.rhs());
    case Op::Pow:
      return pow(simplify(e.lhs()), simplify(e.rhs()));
    case Op::Neg:
      return -simplify(e.arg());
    case Op::Abs:
      return abs(simplify(e.arg()));
    case Op::Sign:
      return sign(simplify(e.arg()));
    case Op::Exp:
      return exp(simplify(e.arg()));
    case Op::Ln:
      return ln(simplify(e.arg()));
    case Op::Sqrt:
      return sqrt(simplify(e.arg()));
    case Op::Sin:
      return sin(simplify(e.arg()));
    case Op::Cos:
      return cos(simplify(e.arg()));
  }
  return e;
}

}  // namespace lienard
