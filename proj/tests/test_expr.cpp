#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "jetlab/errors.hpp"
#include "jetlab/expr.hpp"
#include "jetlab/sampling.hpp"

using namespace jetlab;

namespace {
const std::vector<std::string> vars = {"x1", "x2", "x3"};

double eval_at(const Expr& e, std::vector<double> x) { return e.eval(x); }
}  // namespace

TEST_CASE("arithmetic, precedence and functions") {
  CHECK(eval_at(parse("2 + 3 * x1", vars), {4, 0, 0}) == doctest::Approx(14));
  CHECK(eval_at(parse("(2 + 3) * x1", vars), {4, 0, 0}) == doctest::Approx(20));
  CHECK(eval_at(parse("-x1 ^ 2", vars), {3, 0, 0}) == doctest::Approx(-9));
  CHECK(eval_at(parse("2 ^ 3 ^ 2", vars), {0, 0, 0}) == doctest::Approx(512));
  CHECK(eval_at(parse("x1 / x2 - x3", vars), {6, 3, 1}) == doctest::Approx(1));
  CHECK(eval_at(parse("sin(x1) ^ 2 + cos(x1) ^ 2", vars), {0.73, 0, 0}) ==
        doctest::Approx(1));
  CHECK(eval_at(parse("exp(log(x1))", vars), {2.5, 0, 0}) ==
        doctest::Approx(2.5));
  CHECK(eval_at(parse("sqrt(x1 * x1)", vars), {1.3, 0, 0}) ==
        doctest::Approx(1.3));
  CHECK(eval_at(parse("tan(x1)", vars), {0.4, 0, 0}) ==
        doctest::Approx(std::tan(0.4)));
  CHECK(eval_at(parse("1e-2 + 2.5E3", vars), {0, 0, 0}) ==
        doctest::Approx(2500.01));
}

TEST_CASE("positioned syntax errors") {
  CHECK_THROWS_AS(parse("2 +", vars), SyntaxError);
  CHECK_THROWS_AS(parse("2 $ 3", vars), SyntaxError);
  // an IDENT without "(" is a variable reference, even for function names
  CHECK_THROWS_AS(parse("sin 2", vars), UnknownVariable);
  CHECK_THROWS_AS(parse("(1 + 2", vars), SyntaxError);
  CHECK_THROWS_AS(parse("x1 ^ x2", vars), SyntaxError);  // non-constant power
  CHECK_THROWS_AS(parse("y7", vars), UnknownVariable);

  try {
    parse("1 + &", vars);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(eval_at(parse("1 / x1", vars), {0, 0, 0}), EvalError);
  CHECK_THROWS_AS(eval_at(parse("log(x1)", vars), {-1, 0, 0}), EvalError);
  CHECK_THROWS_AS(eval_at(parse("sqrt(x1)", vars), {-1, 0, 0}), EvalError);
  CHECK_THROWS_AS(eval_at(parse("x1 ^ 0.5", vars), {-1, 0, 0}), EvalError);
}

TEST_CASE("text form round-trips") {
  SplitMix64 rng{11};
  const char* sources[] = {
      "2 + 3 * x1 - x2 / (1 + x3 ^ 2)",
      "sin(x1) * cos(x2) + exp(-x3)",
      "sqrt(1 + x1 ^ 2) - log(2 + x2 ^ 4)",
  };
  for (const char* s : sources) {
    Expr e = parse(s, vars);
    Expr back = parse(e.str(), vars);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> x = {rng.uniform(-2, 2), rng.uniform(-2, 2),
                               rng.uniform(-2, 2)};
      CHECK(e.eval(x) == back.eval(x));
    }
  }
}

namespace {

// random expression tree over safe operations (no poles, no domain edges)
Expr random_expr(SplitMix64& rng, int depth) {
  if (depth == 0 || rng.uniform01() < 0.3) {
    if (rng.uniform01() < 0.4) return Expr::constant(rng.uniform(-2.0, 2.0));
    int i = static_cast<int>(rng.uniform(0.0, 3.0));
    if (i > 2) i = 2;
    return Expr::variable(i, vars[i]);
  }
  double pick = rng.uniform01();
  Expr a = random_expr(rng, depth - 1);
  Expr b = random_expr(rng, depth - 1);
  if (pick < 0.25) return a + b;
  if (pick < 0.45) return a - b;
  if (pick < 0.70) return a * b;
  if (pick < 0.80) return Expr::sin(a);
  if (pick < 0.90) return Expr::cos(a);
  if (pick < 0.95) return Expr::exp(Expr::sin(a));
  return (Expr::sin(a) + Expr::constant(2.5)).pow(2.0);
}

}  // namespace

TEST_CASE("symbolic derivatives match central differences: 100 seeded trees") {
  SplitMix64 rng{20260826};
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Expr e = random_expr(rng, 4);
    std::vector<double> x = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                             rng.uniform(-1.5, 1.5)};
    for (std::size_t v = 0; v < 3; ++v) {
      Expr de = e.diff(v);
      double sym = de.eval(x);
      const double h = 1e-5;
      auto xp = x, xm = x;
      xp[v] += h;
      xm[v] -= h;
      double fdv = (e.eval(xp) - e.eval(xm)) / (2.0 * h);
      CHECK(std::abs(sym - fdv) / std::max(1.0, std::abs(sym)) <= 1e-5);
      ++checked;
    }
  }
  CHECK(checked == 300);
}

TEST_CASE("derivative structure") {
  Expr e = parse("x1 ^ 3 * sin(x2)", vars);
  std::vector<double> x = {1.2, 0.7, 0.0};
  CHECK(e.diff(0).eval(x) ==
        doctest::Approx(3 * 1.2 * 1.2 * std::sin(0.7)).epsilon(1e-12));
  CHECK(e.diff(1).eval(x) ==
        doctest::Approx(std::pow(1.2, 3) * std::cos(0.7)).epsilon(1e-12));
  CHECK(e.diff(2).eval(x) == 0.0);
  CHECK(!e.depends_on(2));
  CHECK(e.depends_on(0));
  double cval = 0.0;
  CHECK(parse("2 * 3 + 1", vars).is_constant(&cval));
  CHECK(cval == doctest::Approx(7));
}
