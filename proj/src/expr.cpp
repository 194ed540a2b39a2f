#include "jetlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace jetlab {

struct Expr::Node {
  Kind kind;
  double value = 0.0;       // Constant payload or Pow exponent
  std::size_t index = 0;    // Variable index
  std::string name;         // Variable name
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

double checked(double v) {
  if (!std::isfinite(v)) throw EvalError("non-finite result");
  return v;
}

double eval_pow(double base, double exponent) {
  double k;
  if (std::modf(exponent, &k) == 0.0 && std::abs(exponent) <= 8.0) {
    // integer exponent, expanded by repeated multiplication
    int e = static_cast<int>(exponent);
    bool inv = e < 0;
    e = std::abs(e);
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    if (inv) {
      if (r == 0.0) throw EvalError("division by zero in negative power");
      r = 1.0 / r;
    }
    return r;
  }
  if (std::modf(exponent, &k) != 0.0 && base <= 0.0)
    throw EvalError("non-integer power of non-positive base");
  return std::pow(base, exponent);
}

}  // namespace

Expr::Expr() : Expr(constant(0.0).node_) {}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr::Kind Expr::kind() const { return node_->kind; }

bool Expr::is_constant(double* value) const {
  if (node_->kind != Kind::Constant) return false;
  if (value) *value = node_->value;
  return true;
}

bool Expr::depends_on(std::size_t index) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Constant:
      return false;
    case Kind::Variable:
      return n->index == index;
    default:
      if (n->a && Expr(n->a).depends_on(index)) return true;
      if (n->b && Expr(n->b).depends_on(index)) return true;
      return false;
  }
}

std::size_t Expr::max_variable_index() const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Constant:
      return 0;
    case Kind::Variable:
      return n->index;
    default: {
      std::size_t m = 0;
      if (n->a) m = std::max(m, Expr(n->a).max_variable_index());
      if (n->b) m = std::max(m, Expr(n->b).max_variable_index());
      return m;
    }
  }
}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(n);
}

Expr Expr::variable(std::size_t index, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->index = index;
  n->name = std::move(name);
  return Expr(n);
}

namespace {

NodePtr make_unary(Expr::Kind k, NodePtr a) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Expr::Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Expr Expr::operator-() const {
  double c;
  if (is_constant(&c)) return constant(-c);
  if (node_->kind == Kind::Neg) return Expr(node_->a);
  return Expr(make_unary(Kind::Neg, node_));
}

Expr operator+(const Expr& a, const Expr& b) {
  double ca, cb;
  if (a.is_constant(&ca) && b.is_constant(&cb)) return Expr::constant(ca + cb);
  if (a.is_constant(&ca) && ca == 0.0) return b;
  if (b.is_constant(&cb) && cb == 0.0) return a;
  return Expr(make_binary(Expr::Kind::Add, a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b) {
  double ca, cb;
  if (a.is_constant(&ca) && b.is_constant(&cb)) return Expr::constant(ca - cb);
  if (b.is_constant(&cb) && cb == 0.0) return a;
  if (a.is_constant(&ca) && ca == 0.0) return -b;
  return Expr(make_binary(Expr::Kind::Sub, a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b) {
  double ca, cb;
  if (a.is_constant(&ca) && b.is_constant(&cb)) return Expr::constant(ca * cb);
  if (a.is_constant(&ca)) {
    if (ca == 0.0) return Expr::constant(0.0);
    if (ca == 1.0) return b;
  }
  if (b.is_constant(&cb)) {
    if (cb == 0.0) return Expr::constant(0.0);
    if (cb == 1.0) return a;
  }
  return Expr(make_binary(Expr::Kind::Mul, a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b) {
  double ca, cb;
  if (b.is_constant(&cb) && cb != 0.0) {
    if (a.is_constant(&ca)) return Expr::constant(ca / cb);
    if (cb == 1.0) return a;
  }
  if (a.is_constant(&ca) && ca == 0.0 && !b.is_constant(&cb))
    return Expr::constant(0.0);
  return Expr(make_binary(Expr::Kind::Div, a.node_, b.node_));
}

Expr Expr::pow(double exponent) const {
  if (exponent == 0.0) return constant(1.0);
  if (exponent == 1.0) return *this;
  double c;
  if (is_constant(&c)) {
    try {
      return constant(checked(eval_pow(c, exponent)));
    } catch (const EvalError&) {
      // keep the node; the error surfaces at eval time
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->value = exponent;
  n->a = node_;
  return Expr(n);
}

#define JETLAB_UNARY(NAME, KIND, FN, DOMAIN_OK)                      \
  Expr Expr::NAME(const Expr& a) {                                   \
    double c;                                                        \
    if (a.is_constant(&c) && (DOMAIN_OK)) {                          \
      double v = FN(c);                                              \
      if (std::isfinite(v)) return constant(v);                      \
    }                                                                \
    return Expr(make_unary(Kind::KIND, a.node_));                    \
  }

JETLAB_UNARY(sin, Sin, std::sin, true)
JETLAB_UNARY(cos, Cos, std::cos, true)
JETLAB_UNARY(tan, Tan, std::tan, true)
JETLAB_UNARY(exp, Exp, std::exp, true)
JETLAB_UNARY(log, Log, std::log, c > 0.0)
JETLAB_UNARY(sqrt, Sqrt, std::sqrt, c >= 0.0)
#undef JETLAB_UNARY

double Expr::eval(std::span<const double> values) const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Constant:
      return n->value;
    case Kind::Variable:
      if (n->index >= values.size())
        throw EvalError("assignment does not cover variable '" + n->name + "'");
      return values[n->index];
    case Kind::Neg:
      return -Expr(n->a).eval(values);
    case Kind::Add:
      return checked(Expr(n->a).eval(values) + Expr(n->b).eval(values));
    case Kind::Sub:
      return checked(Expr(n->a).eval(values) - Expr(n->b).eval(values));
    case Kind::Mul:
      return checked(Expr(n->a).eval(values) * Expr(n->b).eval(values));
    case Kind::Div: {
      double num = Expr(n->a).eval(values);
      double den = Expr(n->b).eval(values);
      if (den == 0.0) throw EvalError("division by zero");
      return checked(num / den);
    }
    case Kind::Pow:
      return checked(eval_pow(Expr(n->a).eval(values), n->value));
    case Kind::Sin:
      return checked(std::sin(Expr(n->a).eval(values)));
    case Kind::Cos:
      return checked(std::cos(Expr(n->a).eval(values)));
    case Kind::Tan:
      return checked(std::tan(Expr(n->a).eval(values)));
    case Kind::Exp:
      return checked(std::exp(Expr(n->a).eval(values)));
    case Kind::Log: {
      double v = Expr(n->a).eval(values);
      if (v <= 0.0) throw EvalError("log of non-positive value");
      return checked(std::log(v));
    }
    case Kind::Sqrt: {
      double v = Expr(n->a).eval(values);
      if (v < 0.0) throw EvalError("sqrt of negative value");
      return checked(std::sqrt(v));
    }
  }
  throw EvalError("corrupt expression node");
}

Expr Expr::diff(std::size_t index) const {
  const Node* n = node_.get();
  Expr a = n->a ? Expr(n->a) : Expr();
  Expr b = n->b ? Expr(n->b) : Expr();
  switch (n->kind) {
    case Kind::Constant:
      return constant(0.0);
    case Kind::Variable:
      return constant(n->index == index ? 1.0 : 0.0);
    case Kind::Neg:
      return -a.diff(index);
    case Kind::Add:
      return a.diff(index) + b.diff(index);
    case Kind::Sub:
      return a.diff(index) - b.diff(index);
    case Kind::Mul:
      return a.diff(index) * b + a * b.diff(index);
    case Kind::Div:
      return (a.diff(index) * b - a * b.diff(index)) / (b * b);
    case Kind::Pow:
      return constant(n->value) * a.pow(n->value - 1.0) * a.diff(index);
    case Kind::Sin:
      return cos(a) * a.diff(index);
    case Kind::Cos:
      return -(sin(a) * a.diff(index));
    case Kind::Tan: {
      Expr c = cos(a);
      return a.diff(index) / (c * c);
    }
    case Kind::Exp:
      return exp(a) * a.diff(index);
    case Kind::Log:
      return a.diff(index) / a;
    case Kind::Sqrt:
      return a.diff(index) / (constant(2.0) * sqrt(a));
  }
  throw EvalError("corrupt expression node");
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string Expr::str() const {
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Constant: {
      if (n->value < 0.0) return "(0-" + fmt_double(-n->value) + ")";
      return fmt_double(n->value);
    }
    case Kind::Variable:
      return n->name;
    case Kind::Neg:
      return "(-" + Expr(n->a).str() + ")";
    case Kind::Add:
      return "(" + Expr(n->a).str() + "+" + Expr(n->b).str() + ")";
    case Kind::Sub:
      return "(" + Expr(n->a).str() + "-" + Expr(n->b).str() + ")";
    case Kind::Mul:
      return "(" + Expr(n->a).str() + "*" + Expr(n->b).str() + ")";
    case Kind::Div:
      return "(" + Expr(n->a).str() + "/" + Expr(n->b).str() + ")";
    case Kind::Pow: {
      std::string e = n->value < 0.0 ? "(0-" + fmt_double(-n->value) + ")"
                                     : fmt_double(n->value);
      return "(" + Expr(n->a).str() + "^" + e + ")";
    }
    case Kind::Sin:
      return "sin(" + Expr(n->a).str() + ")";
    case Kind::Cos:
      return "cos(" + Expr(n->a).str() + ")";
    case Kind::Tan:
      return "tan(" + Expr(n->a).str() + ")";
    case Kind::Exp:
      return "exp(" + Expr(n->a).str() + ")";
    case Kind::Log:
      return "log(" + Expr(n->a).str() + ")";
    case Kind::Sqrt:
      return "sqrt(" + Expr(n->a).str() + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
  Parser(std::string_view src, const std::vector<std::string>& vars)
      : src_(src), vars_(vars) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) throw SyntaxError(pos_, "end of input");
    return e;
  }

private:
  std::string_view src_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+'))
        e = e + parse_term();
      else if (accept('-'))
        e = e - parse_term();
      else
        return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*'))
        e = e * parse_unary();
      else if (accept('/'))
        e = e / parse_unary();
      else
        return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) {
      std::size_t at = pos_;
      Expr exponent = parse_unary();
      double c;
      if (!exponent.is_constant(&c))
        throw SyntaxError(at, "constant exponent");
      return base.pow(c);
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size())
      throw SyntaxError(pos_, "number, identifier, or '('");
    char c = src_[pos_];
    if (accept('(')) {
      Expr e = parse_expr();
      if (!accept(')')) throw SyntaxError(pos_, "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_ident();
    throw SyntaxError(pos_, "number, identifier, or '('");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
        ++pos_;
      if (pos_ >= src_.size() ||
          !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        pos_ = mark;  // 'e' was not an exponent marker
      } else {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          ++pos_;
      }
    }
    if (pos_ == start || (pos_ == start + 1 && src_[start] == '.'))
      throw SyntaxError(start, "numeric literal");
    std::string text(src_.substr(start, pos_ - start));
    return Expr::constant(std::strtod(text.c_str(), nullptr));
  }

  Expr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (peek('(')) {
      ++pos_;
      Expr arg = parse_expr();
      if (!accept(')')) throw SyntaxError(pos_, "')'");
      if (name == "sin") return Expr::sin(arg);
      if (name == "cos") return Expr::cos(arg);
      if (name == "tan") return Expr::tan(arg);
      if (name == "exp") return Expr::exp(arg);
      if (name == "log") return Expr::log(arg);
      if (name == "sqrt") return Expr::sqrt(arg);
      throw SyntaxError(start, "function name (sin cos tan exp log sqrt)");
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return Expr::variable(i, name);
    throw UnknownVariable(name);
  }
};

}  // namespace

Expr parse(std::string_view source, const std::vector<std::string>& variables) {
  return Parser(source, variables).run();
}

}  // namespace jetlab
