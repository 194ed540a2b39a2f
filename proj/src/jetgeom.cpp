#include "jetlab/jetgeom.hpp"

#include <cmath>

namespace jetlab {

namespace {

// Shared pointwise evaluations used by most operations.
struct Eval {
  int p, n;
  std::vector<double> txv;
  Matrix h, hinv, phi, phiinv;
  Tensor3 Hg;     // Christoffels of h
  Tensor3 gamma;  // Christoffels of phi
  Matrix Xv;      // [i][a]

  Eval(const SystemSpec& sys, const JetPoint& pt)
      : p(sys.p()), n(sys.n()), txv(sys.tx(pt)) {
    h = sys.h().value_at(pt.t);
    hinv = invert(h);
    phi = sys.phi().value_at(pt.x);
    phiinv = invert(phi);
    Hg = sys.h().christoffel(pt.t);
    gamma = sys.phi().christoffel(pt.x);
    Xv = sys.X_at(pt);
  }
};

Matrix dhinv_dt(const Eval& ev, const SystemSpec& sys, const JetPoint& pt,
                int b) {
  Matrix dh = sys.h().d1_at(b, pt.t);
  Matrix out = make_matrix(ev.p, ev.p);
  for (int a = 0; a < ev.p; ++a)
    for (int m = 0; m < ev.p; ++m) {
      double s = 0.0;
      for (int u = 0; u < ev.p; ++u)
        for (int v = 0; v < ev.p; ++v)
          s += ev.hinv[a][u] * dh[u][v] * ev.hinv[v][m];
      out[a][m] = -s;
    }
  return out;
}

}  // namespace

CovDerivatives cov_derivatives(const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  CovDerivatives out;
  out.Dt = make_tensor3(ev.n, ev.p, ev.p);
  out.Dx = make_tensor3(ev.n, ev.p, ev.n);
  for (int i = 0; i < ev.n; ++i)
    for (int a = 0; a < ev.p; ++a) {
      for (int b = 0; b < ev.p; ++b) {
        double v = sys.dXdt(i, a, b).eval(ev.txv);
        for (int m = 0; m < ev.p; ++m) v -= ev.Xv[i][m] * ev.Hg[m][a][b];
        out.Dt[i][a][b] = v;
      }
      for (int j = 0; j < ev.n; ++j) {
        double v = sys.dXdx(i, a, j).eval(ev.txv);
        for (int m = 0; m < ev.n; ++m) v += ev.Xv[m][a] * ev.gamma[i][m][j];
        out.Dx[i][a][j] = v;
      }
    }
  return out;
}

SecondCovDerivatives second_cov_derivatives(const SystemSpec& sys,
                                            const JetPoint& pt) {
  Eval ev(sys, pt);
  CovDerivatives cd = cov_derivatives(sys, pt);
  Tensor4 dgamma = sys.phi().christoffel_derivatives(pt.x);  // [i][m][j][k]
  SecondCovDerivatives out;
  out.Dxt = make_tensor4(ev.n, ev.p, ev.n, ev.p);
  out.Dxx = make_tensor4(ev.n, ev.p, ev.n, ev.n);
  for (int i = 0; i < ev.n; ++i)
    for (int a = 0; a < ev.p; ++a)
      for (int j = 0; j < ev.n; ++j) {
        for (int b = 0; b < ev.p; ++b) {
          // d(Dx)/dt^b: gamma has no t-dependence
          double v = sys.d2Xxt(i, a, j, b).eval(ev.txv);
          for (int m = 0; m < ev.n; ++m)
            v += sys.dXdt(m, a, b).eval(ev.txv) * ev.gamma[i][m][j];
          for (int m = 0; m < ev.p; ++m) v -= cd.Dx[i][m][j] * ev.Hg[m][a][b];
          out.Dxt[i][a][j][b] = v;
        }
        for (int k = 0; k < ev.n; ++k) {
          double v = sys.d2Xxx(i, a, j, k).eval(ev.txv);
          for (int m = 0; m < ev.n; ++m) {
            v += sys.dXdx(m, a, k).eval(ev.txv) * ev.gamma[i][m][j];
            v += ev.Xv[m][a] * dgamma[i][m][j][k];
            v += cd.Dx[m][a][j] * ev.gamma[i][m][k];
            v -= cd.Dx[i][a][m] * ev.gamma[m][j][k];
          }
          out.Dxx[i][a][j][k] = v;
        }
      }
  return out;
}

Tensor3 helicity(const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  CovDerivatives cd = cov_derivatives(sys, pt);
  Tensor3 out = make_tensor3(ev.n, ev.n, ev.p);  // [i][j][a]
  for (int i = 0; i < ev.n; ++i)
    for (int j = 0; j < ev.n; ++j)
      for (int a = 0; a < ev.p; ++a) {
        double v = cd.Dx[i][a][j];
        for (int r = 0; r < ev.n; ++r)
          for (int s = 0; s < ev.n; ++s)
            v -= ev.phiinv[i][r] * cd.Dx[s][a][r] * ev.phi[s][j];
        out[i][j][a] = 0.5 * v;
      }
  return out;
}

ElectrodynamicsData electrodynamics_data(const SystemSpec& sys,
                                         const JetPoint& pt) {
  Eval ev(sys, pt);
  CovDerivatives cd = cov_derivatives(sys, pt);
  ElectrodynamicsData out;
  out.U = make_matrix(ev.p, ev.n);
  for (int a = 0; a < ev.p; ++a)
    for (int i = 0; i < ev.n; ++i) {
      double v = 0.0;
      for (int m = 0; m < ev.p; ++m)
        for (int k = 0; k < ev.n; ++k)
          v += ev.hinv[a][m] * ev.phi[i][k] * ev.Xv[k][m];
      out.U[a][i] = -2.0 * v;
    }
  out.Phi = 0.0;
  for (int m = 0; m < ev.p; ++m)
    for (int v = 0; v < ev.p; ++v)
      for (int r = 0; r < ev.n; ++r)
        for (int s = 0; s < ev.n; ++s)
          out.Phi += ev.hinv[m][v] * ev.phi[r][s] * ev.Xv[r][m] * ev.Xv[s][v];
  out.Uskew = make_tensor3(ev.p, ev.n, ev.n);
  for (int a = 0; a < ev.p; ++a)
    for (int i = 0; i < ev.n; ++i)
      for (int j = 0; j < ev.n; ++j) {
        double v = 0.0;
        for (int m = 0; m < ev.p; ++m)
          for (int k = 0; k < ev.n; ++k)
            v += ev.hinv[a][m] *
                 (ev.phi[i][k] * cd.Dx[k][m][j] - ev.phi[j][k] * cd.Dx[k][m][i]);
        out.Uskew[a][i][j] = -2.0 * v;
      }
  return out;
}

namespace {

// The bracket B_l of the proof's spatial spray formula:
//   B_l = Uskew^{(m)}_{(l)j} xdot^j_m + dU^{(m)}_{(l)}/dt^m
//       + U^{(m)}_{(l)} H^g_{mg} - dPhi/dx^l
std::vector<double> spray_bracket(const Eval& ev, const SystemSpec& sys,
                                  const JetPoint& pt,
                                  const ElectrodynamicsData& ed) {
  const int p = ev.p, n = ev.n;
  std::vector<double> B(n, 0.0);
  for (int l = 0; l < n; ++l) {
    double v = 0.0;
    for (int m = 0; m < p; ++m)
      for (int j = 0; j < n; ++j) v += ed.Uskew[m][l][j] * pt.xdot[j][m];
    for (int m = 0; m < p; ++m) {
      // dU^{(m)}_{(l)}/dt^m with U = -2 h^{ma} phi_{lk} X^k_a
      Matrix dhinv = dhinv_dt(ev, sys, pt, m);
      for (int a = 0; a < p; ++a)
        for (int k = 0; k < n; ++k)
          v += -2.0 * (dhinv[m][a] * ev.phi[l][k] * ev.Xv[k][a] +
                       ev.hinv[m][a] * ev.phi[l][k] *
                           sys.dXdt(k, a, m).eval(ev.txv));
      for (int g = 0; g < p; ++g) v += ed.U[m][l] * ev.Hg[g][m][g];
    }
    // dPhi/dx^l
    Matrix dphi = sys.phi().d1_at(l, pt.x);
    for (int m = 0; m < p; ++m)
      for (int w = 0; w < p; ++w)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s)
            v -= ev.hinv[m][w] *
                 (dphi[r][s] * ev.Xv[r][m] * ev.Xv[s][w] +
                  2.0 * ev.phi[r][s] * sys.dXdx(r, m, l).eval(ev.txv) *
                      ev.Xv[s][w]);
    B[l] = v;
  }
  return B;
}

}  // namespace

SprayData spray(const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  ElectrodynamicsData ed = electrodynamics_data(sys, pt);
  std::vector<double> B = spray_bracket(ev, sys, pt, ed);
  const int p = ev.p, n = ev.n;
  SprayData out;
  out.H = make_tensor3(n, p, p);
  out.G = make_tensor3(n, p, p);
  out.F.assign(n, 0.0);
  out.Gsum.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) out.F[i] += ev.phiinv[i][l] * B[l] / (4.0 * p);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        double hv = 0.0;
        for (int g = 0; g < p; ++g) hv += ev.Hg[g][a][b] * pt.xdot[i][g];
        out.H[i][a][b] = -0.5 * hv;
        double gv = 0.0;
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            gv += 0.5 * ev.gamma[i][j][k] * pt.xdot[j][a] * pt.xdot[k][b];
        out.G[i][a][b] = gv + ev.h[a][b] * out.F[i];
      }
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) out.Gsum[i] += ev.hinv[a][b] * out.G[i][a][b];
  return out;
}

std::pair<ConnectionPair, ConnectionPair> nonlinear_connection(
    const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  const int p = ev.p, n = ev.n;
  ConnectionPair canonical{make_tensor3(n, p, p), make_tensor3(n, p, n),
                           ConnectionPair::Flavor::Canonical};
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        double v = 0.0;
        for (int m = 0; m < p; ++m) v -= ev.Hg[m][a][b] * pt.xdot[i][m];
        canonical.M[i][a][b] = v;
      }
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int m = 0; m < n; ++m) v += ev.gamma[i][j][m] * pt.xdot[m][a];
        canonical.N[i][a][j] = v;
      }
    }

  SprayData sp = spray(sys, pt);
  ElectrodynamicsData ed = electrodynamics_data(sys, pt);
  ConnectionPair induced{make_tensor3(n, p, p), make_tensor3(n, p, n),
                         ConnectionPair::Flavor::Induced};
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) induced.M[i][a][b] = 2.0 * sp.H[i][a][b];
  // N^(i)_(a)j = (dG^i/dxdot^j_g) h_{ag}; the spray scalar G^i is quadratic
  // in xdot through the Christoffel term and linear through the Uskew term,
  // so the derivative is exact:
  //   dG^i/dxdot^j_g = gamma^i_jk h^{gb} xdot^k_b + (1/4) phi^{il} Uskew^(g)_(l)j
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int g = 0; g < p; ++g) {
          double d = 0.0;
          for (int k = 0; k < n; ++k)
            for (int b = 0; b < p; ++b)
              d += ev.gamma[i][j][k] * ev.hinv[g][b] * pt.xdot[k][b];
          for (int l = 0; l < n; ++l)
            d += 0.25 * ev.phiinv[i][l] * ed.Uskew[g][l][j];
          v += d * ev.h[a][g];
        }
        induced.N[i][a][j] = v;
      }
  return {canonical, induced};
}

std::pair<Tensor3, Tensor3> cartan_connection(const SystemSpec& sys,
                                              const JetPoint& pt) {
  return {sys.h().christoffel(pt.t), sys.phi().christoffel(pt.x)};
}

TorsionData torsion(const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  SecondCovDerivatives sd = second_cov_derivatives(sys, pt);
  CurvatureBundle hc = curvature(sys.h(), pt.t);
  CurvatureBundle pc = curvature(sys.phi(), pt.x);
  const int p = ev.p, n = ev.n;
  TorsionData out;
  out.Rtt = make_tensor4(n, p, p, p);
  out.Rtj = make_tensor4(n, p, p, n);
  out.Rjk = make_tensor4(n, p, n, n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b)
        for (int g = 0; g < p; ++g) {
          double v = 0.0;
          for (int m = 0; m < p; ++m)
            v -= hc.riemann[m][a][b][g] * pt.xdot[i][m];
          out.Rtt[i][a][b][g] = v;
        }
      for (int b = 0; b < p; ++b)
        for (int j = 0; j < n; ++j) {
          double v = sd.Dxt[i][a][j][b];
          for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
              v -= ev.phiinv[i][r] * sd.Dxt[s][a][r][b] * ev.phi[s][j];
          out.Rtj[i][a][b][j] = 0.5 * v;
        }
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double v = 0.0;
          for (int m = 0; m < n; ++m)
            v += pc.riemann[i][j][k][m] * pt.xdot[m][a];
          double w = sd.Dxx[i][a][j][k];
          for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
              w -= ev.phiinv[i][r] * sd.Dxx[s][a][r][k] * ev.phi[s][j];
          out.Rjk[i][a][j][k] = v - 0.5 * w;
        }
    }
  return out;
}

AdaptedFrame adapted_frame(const ConnectionPair& conn, int p, int n) {
  const int N = p + n + n * p;
  auto jet = [&](int i, int a) { return p + n + i * p + a; };
  AdaptedFrame out;
  out.frame = make_matrix(N, N);
  out.coframe = make_matrix(N, N);
  for (int a = 0; a < p; ++a) {
    out.frame[a][a] = 1.0;
    out.coframe[a][a] = 1.0;
    for (int j = 0; j < n; ++j)
      for (int b = 0; b < p; ++b) out.frame[jet(j, b)][a] = -conn.M[j][b][a];
  }
  for (int i = 0; i < n; ++i) {
    out.frame[p + i][p + i] = 1.0;
    out.coframe[p + i][p + i] = 1.0;
    for (int j = 0; j < n; ++j)
      for (int b = 0; b < p; ++b)
        out.frame[jet(j, b)][p + i] = -conn.N[j][b][i];
  }
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a) {
      out.frame[jet(i, a)][jet(i, a)] = 1.0;
      out.coframe[jet(i, a)][jet(i, a)] = 1.0;
      for (int b = 0; b < p; ++b) out.coframe[jet(i, a)][b] = conn.M[i][a][b];
      for (int j = 0; j < n; ++j)
        out.coframe[jet(i, a)][p + j] = conn.N[i][a][j];
    }
  return out;
}

Tensor3 integrability_residual(const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  const int p = ev.p, n = ev.n;
  Tensor3 out = make_tensor3(n, p, p);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        double v = sys.dXdt(i, a, b).eval(ev.txv) -
                   sys.dXdt(i, b, a).eval(ev.txv);
        for (int m = 0; m < n; ++m)
          v += sys.dXdx(i, a, m).eval(ev.txv) * ev.Xv[m][b] -
               sys.dXdx(i, b, m).eval(ev.txv) * ev.Xv[m][a];
        out[i][a][b] = v;
      }
  return out;
}

std::vector<double> drift_closed_form(const SystemSpec& sys,
                                      const JetPoint& pt) {
  Eval ev(sys, pt);
  CovDerivatives cd = cov_derivatives(sys, pt);
  const int p = ev.p, n = ev.n;
  std::vector<double> F(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int m = 0; m < p; ++m)
      for (int w = 0; w < p; ++w) {
        double term = 0.0;
        for (int l = 0; l < n; ++l)
          for (int s = 0; s < n; ++s)
            for (int r = 0; r < n; ++r)
              term += ev.phiinv[i][l] * cd.Dx[s][w][l] * ev.phi[s][r] *
                      (ev.Xv[r][m] - pt.xdot[r][m]);
        for (int k = 0; k < n; ++k) term += cd.Dx[i][w][k] * pt.xdot[k][m];
        term += cd.Dt[i][w][m];
        v += ev.hinv[m][w] * term;
      }
    F[i] = v / (2.0 * p);
  }
  return F;
}

Tensor3 connection_closed_form(const SystemSpec& sys, const JetPoint& pt,
                               double sign) {
  Eval ev(sys, pt);
  Tensor3 hel = helicity(sys, pt);
  const int p = ev.p, n = ev.n;
  Tensor3 out = make_tensor3(n, p, n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int m = 0; m < n; ++m) v += ev.gamma[i][j][m] * pt.xdot[m][a];
        out[i][a][j] = v + sign * hel[i][j][a];
      }
  return out;
}

}  // namespace jetlab
