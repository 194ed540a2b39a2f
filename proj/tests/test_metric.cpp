#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "jetlab/errors.hpp"
#include "jetlab/metric.hpp"

using namespace jetlab;
using namespace th;

TEST_CASE("one-dimensional Christoffel symbol is h'/(2h)") {
  // h(t) = 1 + t^2
  Expr t = V(0, "t1");
  MetricField h({"t1"}, {{C(1.0) + t * t}});
  std::vector<double> t0v = {0.5};
  const double t0 = t0v[0];
  Tensor3 g = h.christoffel(t0v);
  CHECK(g[0][0][0] == doctest::Approx(t0 / (1 + t0 * t0)).epsilon(1e-12));
  CHECK(h.det(t0v) == doctest::Approx(1.25));
  CHECK(h.sqrt_det(t0v) == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("sphere Christoffel symbols at the 45th parallel") {
  MetricField g = sphere_metric();
  std::vector<double> x = {0.7853981633974483, 1.0};  // theta = pi/4
  Tensor3 gam = g.christoffel(x);
  CHECK(gam[0][1][1] == doctest::Approx(-0.5).epsilon(1e-12));  // -sin th cos th
  CHECK(gam[1][0][1] == doctest::Approx(1.0).epsilon(1e-12));   // cot th
  CHECK(gam[1][1][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gam[0][0][0] == doctest::Approx(0.0));
}

TEST_CASE("Christoffel symbols match a finite-difference oracle") {
  MetricField g = sphere_metric();
  SplitMix64 rng{5};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x = {rng.uniform(0.4, 2.7), rng.uniform(-3.0, 3.0)};
    Tensor3 gam = g.christoffel(x);
    Matrix ginv = g.inverse_at(x);
    // oracle: Gamma^k_ij = g^{kl} (d_i g_lj + d_j g_li - d_l g_ij)/2 with
    // metric derivatives by central differences
    const double h = 1e-6;
    Tensor3 dg = make_tensor3(2, 2, 2);  // [l][i][j] = d_l g_ij
    for (int l = 0; l < 2; ++l) {
      auto xp = x, xm = x;
      xp[l] += h;
      xm[l] -= h;
      Matrix gp = g.value_at(xp), gm = g.value_at(xm);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2 * h);
    }
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double want = 0.0;
          for (int l = 0; l < 2; ++l)
            want +=
                0.5 * ginv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
          CHECK(rel_err(gam[k][i][j], want) <= 1e-7);
        }
  }
}

TEST_CASE("Christoffel derivatives match a finite-difference oracle") {
  MetricField g = sphere_metric();
  SplitMix64 rng{6};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x = {rng.uniform(0.4, 2.7), rng.uniform(-3.0, 3.0)};
    Tensor4 dgam = g.christoffel_derivatives(x);  // [k][i][j][m]
    const double h = 1e-5;
    for (int m = 0; m < 2; ++m) {
      auto xp = x, xm = x;
      xp[m] += h;
      xm[m] -= h;
      Tensor3 gp = g.christoffel(xp), gm = g.christoffel(xm);
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            double want = (gp[k][i][j] - gm[k][i][j]) / (2 * h);
            CHECK(rel_err(dgam[k][i][j][m], want) <= 1e-6);
          }
    }
  }
}

TEST_CASE("unit sphere curvature: Ricci equals the metric, scalar equals 2") {
  MetricField g = sphere_metric();
  SplitMix64 rng{7};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x = {rng.uniform(0.4, 2.7), rng.uniform(-3.0, 3.0)};
    CurvatureBundle cb = curvature(g, x);
    Matrix gv = g.value_at(x);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(cb.ricci[i][j] == doctest::Approx(gv[i][j]).epsilon(1e-9));
    CHECK(cb.scalar == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("flat metric has zero curvature") {
  MetricField g = identity_metric({"x1", "x2", "x3"});
  std::vector<double> x = {0.3, -0.4, 1.1};
  CurvatureBundle cb = curvature(g, x);
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) CHECK(cb.riemann[l][i][j][k] == 0.0);
  CHECK(cb.scalar == 0.0);
}

TEST_CASE("matrix inversion and degeneracy") {
  Matrix a = {{2.0, 1.0}, {1.0, 2.0}};
  Matrix inv = invert(a);
  CHECK(inv[0][0] == doctest::Approx(2.0 / 3));
  CHECK(inv[0][1] == doctest::Approx(-1.0 / 3));
  Matrix sing = {{1.0, 2.0}, {2.0, 4.0}};
  CHECK_THROWS_AS(invert(sing), SingularMetric);
}

TEST_CASE("positive definiteness probe") {
  MetricField g = sphere_metric();
  std::vector<double> x1 = {1.0, 0.0}, x2 = {0.0};
  CHECK(g.positive_definite_at(x1));
  MetricField bad({"x1"}, {{C(-1.0)}});
  CHECK(!bad.positive_definite_at(x2));
}

TEST_CASE("constancy detection") {
  CHECK(identity_metric({"x1", "x2"}).is_constant());
  CHECK(!sphere_metric().is_constant());
}
