#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "jetlab/jetgeom.hpp"

using namespace jetlab;
using namespace th;

namespace {

// test system with curved base and fibre metrics and mixed dependence,
// over variables (t1, t2, x1, x2)
SystemSpec curved_system() {
  Expr t1 = V(0, "t1"), t2 = V(1, "t2"), x1 = V(2, "x1"), x2 = V(3, "x2");
  MetricField h({"t1", "t2"},
                {{C(1.0), C(0.0)}, {C(0.0), Expr::exp(t1 + t1)}});
  MetricField phi = sphere_metric();
  std::vector<std::vector<Expr>> X = {
      {Expr::sin(x2) + t2 * C(0.5), Expr::cos(t1) * x1},
      {x1 * x2, Expr::exp(Expr::sin(t2)) + x2 * C(0.25)}};
  return SystemSpec(h, phi, std::move(X));
}

JetPoint curved_point(SplitMix64& rng) {
  JetPoint pt;
  pt.t = {rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)};
  pt.x = {rng.uniform(0.5, 2.5), rng.uniform(-1.0, 1.0)};
  pt.xdot = {{rng.uniform(-1, 1), rng.uniform(-1, 1)},
             {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
  return pt;
}

Tensor3 dx_at(const SystemSpec& sys, std::vector<double> t,
              std::vector<double> x) {
  JetPoint pt;
  pt.t = std::move(t);
  pt.x = std::move(x);
  pt.xdot = make_matrix(sys.n(), sys.p());
  return cov_derivatives(sys, pt).Dx;
}

// curvature by central differences of the Christoffel symbols, mirroring
// the engine's sign convention
Tensor4 fd_curvature(const MetricField& g, const std::vector<double>& x) {
  const int d = g.dim();
  const double h = 1e-5;
  Tensor3 gam = g.christoffel(x);
  Tensor4 dgam = make_tensor4(d, d, d, d);  // [l][i][k][m] = d_m Gamma^l_ik
  for (int m = 0; m < d; ++m) {
    auto xp = x, xm = x;
    xp[m] += h;
    xm[m] -= h;
    Tensor3 gp = g.christoffel(xp), gm = g.christoffel(xm);
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
          dgam[l][i][k][m] = (gp[l][i][k] - gm[l][i][k]) / (2 * h);
  }
  Tensor4 out = make_tensor4(d, d, d, d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double v = dgam[l][i][k][j] - dgam[l][i][j][k];
          for (int m = 0; m < d; ++m)
            v += gam[l][j][m] * gam[m][i][k] - gam[l][k][m] * gam[m][i][j];
          out[l][i][j][k] = v;
        }
  return out;
}

JetPoint rotation_point() {
  JetPoint pt;
  pt.t = {0.3};
  pt.x = {1.0, 0.0};
  pt.xdot = {{0.0}, {1.0}};
  return pt;
}

}  // namespace

TEST_CASE("rotation reference values") {
  SystemSpec sys = rotation_system();
  JetPoint pt = rotation_point();

  ElectrodynamicsData ed = electrodynamics_data(sys, pt);
  CHECK(ed.Uskew[0][0][1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ed.U[0][0] == doctest::Approx(-2.0 * -pt.x[1]).epsilon(1e-12));
  CHECK(ed.U[0][1] == doctest::Approx(-2.0 * pt.x[0]).epsilon(1e-12));
  CHECK(ed.Phi == doctest::Approx(pt.x[0] * pt.x[0] + pt.x[1] * pt.x[1]));

  SprayData sp = spray(sys, pt);
  CHECK(sp.G[0][0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sp.H[0][0][0] == 0.0);  // flat base

  auto conns = nonlinear_connection(sys, pt);
  CHECK(conns.second.N[0][0][1] == doctest::Approx(1.0).epsilon(1e-12));

  Tensor3 hel = helicity(sys, pt);
  CHECK(hel[0][1][0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(hel[1][0][0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("covariant Jacobians match finite differences of the raw formulas") {
  SystemSpec sys = sphere_orbit_system();
  SplitMix64 rng{31};
  for (int trial = 0; trial < 20; ++trial) {
    JetPoint pt;
    pt.t = {rng.uniform(0.0, 2.0)};
    pt.x = {rng.uniform(0.5, 2.6), rng.uniform(-2.0, 2.0)};
    pt.xdot = {{rng.uniform(-1, 1)}, {rng.uniform(-1, 1)}};
    CovDerivatives cd = cov_derivatives(sys, pt);
    Tensor3 gam = sys.phi().christoffel(pt.x);
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        // X^i_{||j} = dX^i/dx^j + X^m Gamma^i_{mj}, with dX by central FD
        auto xp = pt.x, xm = pt.x;
        xp[j] += h;
        xm[j] -= h;
        JetPoint pp = pt, pm = pt;
        pp.x = xp;
        pm.x = xm;
        double want =
            (sys.X_at(pp)[i][0] - sys.X_at(pm)[i][0]) / (2 * h);
        for (int m = 0; m < 2; ++m)
          want += sys.X_at(pt)[m][0] * gam[i][m][j];
        CHECK(rel_err(cd.Dx[i][0][j], want) <= 1e-6);
      }
  }
}

TEST_CASE("second covariant derivatives match a finite-difference oracle") {
  SystemSpec sys = curved_system();
  SplitMix64 rng{32};
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    JetPoint pt = curved_point(rng);
    SecondCovDerivatives sd = second_cov_derivatives(sys, pt);
    Tensor3 Dx = cov_derivatives(sys, pt).Dx;
    Tensor3 Hg = sys.h().christoffel(pt.t);
    Tensor3 gam = sys.phi().christoffel(pt.x);

    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 2; ++a)
        for (int j = 0; j < 2; ++j) {
          for (int b = 0; b < 2; ++b) {
            auto tp = pt.t, tm = pt.t;
            tp[b] += h;
            tm[b] -= h;
            double want = (dx_at(sys, tp, pt.x)[i][a][j] -
                           dx_at(sys, tm, pt.x)[i][a][j]) /
                          (2 * h);
            for (int m = 0; m < 2; ++m) want -= Dx[i][m][j] * Hg[m][a][b];
            CHECK(rel_err(sd.Dxt[i][a][j][b], want) <= 1e-6);
          }
          for (int k = 0; k < 2; ++k) {
            auto xp = pt.x, xm = pt.x;
            xp[k] += h;
            xm[k] -= h;
            double want = (dx_at(sys, pt.t, xp)[i][a][j] -
                           dx_at(sys, pt.t, xm)[i][a][j]) /
                          (2 * h);
            for (int m = 0; m < 2; ++m) {
              want += gam[i][m][k] * Dx[m][a][j];
              want -= gam[m][j][k] * Dx[i][a][m];
            }
            CHECK(rel_err(sd.Dxx[i][a][j][k], want) <= 1e-6);
          }
        }
  }
}

TEST_CASE("torsion tensors match a finite-difference oracle") {
  SystemSpec sys = curved_system();
  SplitMix64 rng{33};
  const int p = 2, n = 2;
  for (int trial = 0; trial < 50; ++trial) {
    JetPoint pt = curved_point(rng);
    TorsionData td = torsion(sys, pt);
    Tensor4 Rh = fd_curvature(sys.h(), pt.t);
    Tensor4 Rphi = fd_curvature(sys.phi(), pt.x);
    Matrix phi = sys.phi().value_at(pt.x);
    Matrix phiinv = invert(phi);
    SecondCovDerivatives sd = second_cov_derivatives(sys, pt);

    for (int i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a) {
        for (int b = 0; b < p; ++b)
          for (int g = 0; g < p; ++g) {
            double want = 0.0;
            for (int m = 0; m < p; ++m)
              want -= Rh[m][a][b][g] * pt.xdot[i][m];
            CHECK(rel_err(td.Rtt[i][a][b][g], want) <= 1e-6);
          }
        for (int b = 0; b < p; ++b)
          for (int j = 0; j < n; ++j) {
            double want = sd.Dxt[i][a][j][b];
            for (int r = 0; r < n; ++r)
              for (int s = 0; s < n; ++s)
                want -= phiinv[i][r] * sd.Dxt[s][a][r][b] * phi[s][j];
            CHECK(rel_err(td.Rtj[i][a][b][j], 0.5 * want) <= 1e-6);
          }
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double want = 0.0;
            for (int m = 0; m < n; ++m)
              want += Rphi[i][j][k][m] * pt.xdot[m][a];
            double w = sd.Dxx[i][a][j][k];
            for (int r = 0; r < n; ++r)
              for (int s = 0; s < n; ++s)
                w -= phiinv[i][r] * sd.Dxx[s][a][r][k] * phi[s][j];
            CHECK(rel_err(td.Rjk[i][a][j][k], want - 0.5 * w) <= 1e-6);
          }
      }
  }
}

TEST_CASE("flat base metric forces vanishing temporal torsion") {
  SystemSpec sys = rotation_system();
  SplitMix64 rng{34};
  for (int trial = 0; trial < 10; ++trial) {
    JetPoint pt;
    pt.t = {rng.uniform(0, 2)};
    pt.x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    pt.xdot = {{rng.uniform(-1, 1)}, {rng.uniform(-1, 1)}};
    TorsionData td = torsion(sys, pt);
    for (int i = 0; i < 2; ++i) CHECK(td.Rtt[i][0][0][0] == 0.0);
  }
}

TEST_CASE("adapted frame and coframe are dual") {
  SystemSpec sys = curved_system();
  SplitMix64 rng{35};
  JetPoint pt = curved_point(rng);
  auto conns = nonlinear_connection(sys, pt);
  for (const ConnectionPair& cp : {conns.first, conns.second}) {
    AdaptedFrame fr = adapted_frame(cp, 2, 2);
    const int d = 2 + 2 + 4;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += fr.coframe[i][k] * fr.frame[k][j];
        CHECK(std::abs(s - (i == j ? 1 : 0)) <= 1e-12);
      }
  }
}

TEST_CASE("integrability residual vanishes identically for one time") {
  SystemSpec sys = rotation_system();
  SplitMix64 rng{36};
  for (int trial = 0; trial < 5; ++trial) {
    JetPoint pt;
    pt.t = {rng.uniform(0, 2)};
    pt.x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    pt.xdot = {{0.0}, {0.0}};
    Tensor3 r = integrability_residual(sys, pt);
    for (int i = 0; i < 2; ++i) CHECK(r[i][0][0] == 0.0);
  }
}

TEST_CASE("closed forms are pinned to the engine up to the resolved sign") {
  // induced spatial connection equals the Christoffel part minus helicity;
  // the closed-form drift equals the negative of the spray bracket force
  for (SystemSpec sys : {rotation_system(), sphere_orbit_system()}) {
    SplitMix64 rng{37};
    for (int trial = 0; trial < 20; ++trial) {
      JetPoint pt;
      pt.t = {rng.uniform(0, 2)};
      pt.x = {rng.uniform(0.5, 2.5), rng.uniform(-1, 1)};
      pt.xdot = {{rng.uniform(-1, 1)}, {rng.uniform(-1, 1)}};

      auto conns = nonlinear_connection(sys, pt);
      Tensor3 closed = connection_closed_form(sys, pt, -1.0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          CHECK(std::abs(conns.second.N[i][0][j] - closed[i][0][j]) <= 1e-10);

      SprayData sp = spray(sys, pt);
      auto closed_drift = drift_closed_form(sys, pt);
      for (int i = 0; i < 2; ++i)
        CHECK(std::abs(sp.F[i] + closed_drift[i]) <= 1e-10);
    }
  }
}
