#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jetlab/errors.hpp"

namespace jetlab {

// Immutable arithmetic expression tree over a fixed, ordered variable list.
// Values are shared handles; copying is cheap and trees may be evaluated
// concurrently. Construction folds constants and the x+0 / x*0 / x*1
// family; no further rewriting is done, so tree growth under repeated
// differentiation stays bounded and evaluation is bit-reproducible.
class Expr {
public:
  enum class Kind {
    Constant,
    Variable,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // fixed real exponent, stored in the node
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
  };

  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr variable(std::size_t index, std::string name);

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

  Expr pow(double exponent) const;
  static Expr sin(const Expr& a);
  static Expr cos(const Expr& a);
  static Expr tan(const Expr& a);
  static Expr exp(const Expr& a);
  static Expr log(const Expr& a);
  static Expr sqrt(const Expr& a);

  // IEEE double evaluation; `values[i]` is the value of variable index i.
  // Throws EvalError on division by zero, log of a non-positive value,
  // sqrt of a negative value, or a non-finite intermediate result.
  double eval(std::span<const double> values) const;

  // Exact symbolic partial derivative with respect to variable `index`.
  Expr diff(std::size_t index) const;

  Kind kind() const;
  bool is_constant(double* value = nullptr) const;
  bool depends_on(std::size_t index) const;
  std::size_t max_variable_index() const;  // 0 when none; check depends first

  // Fully parenthesized text form; parse(str(), vars) evaluates identically.
  std::string str() const;

  struct Node;  // implementation detail, defined in expr.cpp

private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// Recursive-descent parser for the grammar
//   expr  := term (("+"|"-") term)*
//   term  := unary (("*"|"/") unary)*
//   unary := "-" unary | power
//   power := atom ("^" unary)?
//   atom  := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
// ^ is right-associative and its exponent must fold to a constant.
// IDENT is either a unary function name (sin cos tan exp log sqrt) when
// followed by "(", or a declared variable.
Expr parse(std::string_view source, const std::vector<std::string>& variables);

}  // namespace jetlab
