#include "jetlab/lsqsolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "jetlab/jetgeom.hpp"

namespace jetlab {

namespace {

struct PointData {
  std::vector<double> txv;
  Matrix hinv, phi;
  double sqh;
  Matrix Xv;  // n x p
};

PointData point_data(const SystemSpec& sys, const JetPoint& pt) {
  PointData d;
  d.txv = sys.tx(pt);
  Matrix hm = sys.h().value_at(pt.t);
  d.hinv = invert(hm);
  d.sqh = std::sqrt(sys.h().det(pt.t));
  d.phi = sys.phi().value_at(pt.x);
  d.Xv = sys.X_at(pt);
  return d;
}

// U^(a)_(i) = -2 h^{am} phi_ij X^(j)_(m), Phi = h^{mn} phi_rs X^r_m X^s_n.
void drift_terms(const PointData& d, int p, int n, Matrix& U, double& Phi) {
  U = make_matrix(p, n);
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int m = 0; m < p; ++m)
        for (int j = 0; j < n; ++j)
          s += d.hinv[a][m] * d.phi[i][j] * d.Xv[j][m];
      U[a][i] = -2.0 * s;
    }
  Phi = 0.0;
  for (int m = 0; m < p; ++m)
    for (int nu = 0; nu < p; ++nu)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          Phi += d.hinv[m][nu] * d.phi[r][s] * d.Xv[r][m] * d.Xv[s][nu];
}

double density_expanded(const SystemSpec& sys, const JetPoint& pt,
                        const PointData& d) {
  const int p = sys.p(), n = sys.n();
  Matrix U;
  double Phi;
  drift_terms(d, p, n, U, Phi);
  double L = Phi;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          L += d.hinv[a][b] * d.phi[i][j] * pt.xdot[i][a] * pt.xdot[j][b];
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i) L += U[a][i] * pt.xdot[i][a];
  return L;
}

double density_defect(const SystemSpec& sys, const JetPoint& pt,
                      const PointData& d) {
  const int p = sys.p(), n = sys.n();
  double L = 0.0;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          L += d.hinv[a][b] * d.phi[i][j] * (pt.xdot[i][a] - d.Xv[i][a]) *
               (pt.xdot[j][b] - d.Xv[j][b]);
  return L;
}

// Integrand of the energy at one node: w * sqrt(det h) * L.
double node_energy(const SystemSpec& sys, const GridMap& map,
                   const std::vector<int>& mi) {
  JetPoint pt = map.jet_at(mi);
  PointData d = point_data(sys, pt);
  return map.weight(mi) * d.sqh * density_defect(sys, pt, d);
}

// sqrt(h) * dL/dx^i (exact partials of metric and source trees) and the
// momentum sqrt(h) * dL/dx^i_a, for the gradient and the oracle.
void node_grad_terms(const SystemSpec& sys, const GridMap& map,
                     const std::vector<int>& mi, std::vector<double>& dLdx,
                     Matrix& mom) {
  const int p = sys.p(), n = sys.n();
  JetPoint pt = map.jet_at(mi);
  PointData d = point_data(sys, pt);
  Tensor3 dphi = make_tensor3(n, n, n);  // [i][j][k] = d_k phi_ij
  for (int k = 0; k < n; ++k) {
    Matrix dk = sys.phi().d1_at(k, pt.x);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dphi[i][j][k] = dk[i][j];
  }

  // dX^j_m / dx^i
  Tensor3 dX = make_tensor3(n, p, n);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < p; ++m)
      for (int i = 0; i < n; ++i) dX[j][m][i] = sys.dXdx(j, m, i).eval(d.txv);

  dLdx.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    // quadratic term through d phi
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            s += d.hinv[a][b] * dphi[j][k][i] * pt.xdot[j][a] * pt.xdot[k][b];
    // linear term: d_i U^(a)_(j) x^j_a
    for (int a = 0; a < p; ++a)
      for (int j = 0; j < n; ++j) {
        double dU = 0.0;
        for (int m = 0; m < p; ++m)
          for (int l = 0; l < n; ++l)
            dU += d.hinv[a][m] *
                  (dphi[j][l][i] * d.Xv[l][m] + d.phi[j][l] * dX[l][m][i]);
        s += -2.0 * dU * pt.xdot[j][a];
      }
    // scalar term: d_i Phi
    for (int m = 0; m < p; ++m)
      for (int nu = 0; nu < p; ++nu)
        for (int r = 0; r < n; ++r)
          for (int q = 0; q < n; ++q)
            s += d.hinv[m][nu] * (dphi[r][q][i] * d.Xv[r][m] * d.Xv[q][nu] +
                                  2.0 * d.phi[r][q] * dX[r][m][i] * d.Xv[q][nu]);
    dLdx[i] = d.sqh * s;
  }

  Matrix U;
  double Phi;
  drift_terms(d, p, n, U, Phi);
  mom = make_matrix(p, n);
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i) {
      double s = U[a][i];
      for (int b = 0; b < p; ++b)
        for (int j = 0; j < n; ++j)
          s += 2.0 * d.hinv[a][b] * d.phi[i][j] * pt.xdot[j][b];
      mom[a][i] = d.sqh * s;
    }
}

// Second derivatives x^i_{ab} by central stencils (interior nodes only).
Tensor3 node_xdd(const GridMap& map, const std::vector<int>& mi, int n,
                 int p) {
  Tensor3 xdd = make_tensor3(n, p, p);
  auto nb = mi;
  for (int a = 0; a < p; ++a) {
    const double ha = map.spacing(a);
    long f0 = map.flatten(mi);
    nb = mi;
    nb[a] = mi[a] - 1;
    long fm = map.flatten(nb);
    nb[a] = mi[a] + 1;
    long fp = map.flatten(nb);
    for (int i = 0; i < n; ++i)
      xdd[i][a][a] =
          (map.value(fm, i) - 2.0 * map.value(f0, i) + map.value(fp, i)) /
          (ha * ha);
    for (int b = a + 1; b < p; ++b) {
      const double hb = map.spacing(b);
      nb = mi;
      nb[a] = mi[a] + 1;
      nb[b] = mi[b] + 1;
      long fpp = map.flatten(nb);
      nb[b] = mi[b] - 1;
      long fpm = map.flatten(nb);
      nb[a] = mi[a] - 1;
      long fmm = map.flatten(nb);
      nb[b] = mi[b] + 1;
      long fmp = map.flatten(nb);
      for (int i = 0; i < n; ++i) {
        double v = (map.value(fpp, i) - map.value(fpm, i) -
                    map.value(fmp, i) + map.value(fmm, i)) /
                   (4.0 * ha * hb);
        xdd[i][a][b] = v;
        xdd[i][b][a] = v;
      }
    }
  }
  return xdd;
}

// Harmonic-form EL residual at an interior node.
void node_el_residual(const SystemSpec& sys, const GridMap& map,
                      const std::vector<int>& mi, double* out) {
  const int p = sys.p(), n = sys.n();
  JetPoint pt = map.jet_at(mi);
  Tensor3 xdd = node_xdd(map, mi, n, p);
  SprayData sp = spray(sys, pt);
  Matrix hinv = sys.h().inverse_at(pt.t);
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        r += hinv[a][b] *
             (xdd[i][a][b] + 2.0 * sp.H[i][a][b] + 2.0 * sp.G[i][a][b]);
    out[i] = r;
  }
}

std::vector<double> el_residual_impl(const SystemSpec& sys, const GridMap& map,
                                     bool parallel) {
  map.validate();
  const long total = map.total();
  const int n = sys.n();
  std::vector<double> res(total * n, 0.0);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < total; ++idx) {
      auto mi = map.unflatten(idx);
      if (map.interior(mi)) node_el_residual(sys, map, mi, &res[idx * n]);
    }
  } else {
    for (long idx = 0; idx < total; ++idx) {
      auto mi = map.unflatten(idx);
      if (map.interior(mi)) node_el_residual(sys, map, mi, &res[idx * n]);
    }
  }
  return res;
}

// Sobolev inner product solve: (I + sum_a D_a^T D_a) d = g componentwise,
// with d forced to zero on pinned nodes. D_a is the forward difference
// along axis a divided by the spacing.
class SobolevSolver {
public:
  SobolevSolver(const GridMap& map) : map_(map) {
    const long total = map.total();
    pinned_.resize(total);
    for (long idx = 0; idx < total; ++idx)
      pinned_[idx] = map.pinned(map.unflatten(idx));
  }

  // y = (I + D^T D) x on free nodes, y = x on pinned nodes (their x is 0).
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const long total = map_.total();
    const int n = map_.n;
    y = x;
    for (int a = 0; a < map_.p; ++a) {
      const double w = 1.0 / (map_.spacing(a) * map_.spacing(a));
      for (long idx = 0; idx < total; ++idx) {
        auto mi = map_.unflatten(idx);
        if (mi[a] == map_.shape[a] - 1) continue;
        auto nb = mi;
        nb[a] = mi[a] + 1;
        long jdx = map_.flatten(nb);
        for (int i = 0; i < n; ++i) {
          double diff = w * (x[jdx * n + i] - x[idx * n + i]);
          if (!pinned_[idx]) y[idx * n + i] -= diff;
          if (!pinned_[jdx]) y[jdx * n + i] += diff;
        }
      }
    }
    for (long idx = 0; idx < total; ++idx)
      if (pinned_[idx])
        for (int i = 0; i < n; ++i) y[idx * n + i] = x[idx * n + i];
  }

  std::vector<double> solve(const std::vector<double>& g) const {
    std::vector<double> rhs = g;
    const int n = map_.n;
    for (long idx = 0; idx < map_.total(); ++idx)
      if (pinned_[idx])
        for (int i = 0; i < n; ++i) rhs[idx * n + i] = 0.0;
    if (map_.p == 1) return solve_tridiagonal(rhs);
    return solve_cg(rhs);
  }

private:
  // p == 1: the operator is tridiagonal per component; Thomas algorithm
  // with pinned rows replaced by the identity.
  std::vector<double> solve_tridiagonal(const std::vector<double>& rhs) const {
    const int s = map_.shape[0], n = map_.n;
    const double w = 1.0 / (map_.spacing(0) * map_.spacing(0));
    std::vector<double> out(rhs.size());
    std::vector<double> diag(s), lower(s), upper(s), cp(s), dp(s);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < s; ++k) {
        double deg = (k == 0 || k == s - 1) ? 1.0 : 2.0;
        diag[k] = 1.0 + deg * w;
        lower[k] = (k > 0) ? -w : 0.0;
        upper[k] = (k < s - 1) ? -w : 0.0;
        if (pinned_[k]) {
          diag[k] = 1.0;
          lower[k] = upper[k] = 0.0;
        } else {
          if (k > 0 && pinned_[k - 1]) lower[k] = 0.0;
          if (k < s - 1 && pinned_[k + 1]) upper[k] = 0.0;
        }
      }
      cp[0] = upper[0] / diag[0];
      dp[0] = rhs[0 * n + i] / diag[0];
      for (int k = 1; k < s; ++k) {
        double m = diag[k] - lower[k] * cp[k - 1];
        cp[k] = upper[k] / m;
        dp[k] = (rhs[k * n + i] - lower[k] * dp[k - 1]) / m;
      }
      out[(s - 1) * n + i] = dp[s - 1];
      for (int k = s - 2; k >= 0; --k)
        out[k * n + i] = dp[k] - cp[k] * out[(k + 1) * n + i];
    }
    return out;
  }

  std::vector<double> solve_cg(const std::vector<double>& rhs) const {
    const long m = static_cast<long>(rhs.size());
    std::vector<double> x(m, 0.0), r = rhs, pdir = rhs, ap(m);
    auto dot = [m](const std::vector<double>& u, const std::vector<double>& v) {
      double s = 0.0;
      for (long k = 0; k < m; ++k) s += u[k] * v[k];
      return s;
    };
    double rr = dot(r, r);
    const double tol2 = rr * 1e-20;
    for (long it = 0; it < 4 * m && rr > tol2; ++it) {
      apply(pdir, ap);
      double alpha = rr / dot(pdir, ap);
      for (long k = 0; k < m; ++k) {
        x[k] += alpha * pdir[k];
        r[k] -= alpha * ap[k];
      }
      double rr2 = dot(r, r);
      double beta = rr2 / rr;
      rr = rr2;
      for (long k = 0; k < m; ++k) pdir[k] = r[k] + beta * pdir[k];
    }
    return x;
  }

  const GridMap& map_;
  std::vector<char> pinned_;
};

}  // namespace

double lagrangian_at(const SystemSpec& sys, const JetPoint& pt) {
  PointData d = point_data(sys, pt);
  return density_defect(sys, pt, d);
}

std::pair<double, double> lagrangian_forms(const SystemSpec& sys,
                                           const JetPoint& pt) {
  PointData d = point_data(sys, pt);
  return {density_expanded(sys, pt, d), density_defect(sys, pt, d)};
}

double energy(const SystemSpec& sys, const GridMap& map) {
  map.validate();
  const long total = map.total();
  std::vector<double> buf(total);
#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < total; ++idx)
    buf[idx] = node_energy(sys, map, map.unflatten(idx));
  // Sequential node-order reduction keeps the result bitwise reproducible
  // and identical to the serial kernel.
  double E = 0.0;
  for (long idx = 0; idx < total; ++idx) E += buf[idx];
  return E;
}

double energy_serial(const SystemSpec& sys, const GridMap& map) {
  map.validate();
  const long total = map.total();
  std::vector<double> buf(total);
  for (long idx = 0; idx < total; ++idx)
    buf[idx] = node_energy(sys, map, map.unflatten(idx));
  double E = 0.0;
  for (long idx = 0; idx < total; ++idx) E += buf[idx];
  return E;
}

std::vector<double> el_residual(const SystemSpec& sys, const GridMap& map) {
  return el_residual_impl(sys, map, true);
}

std::vector<double> el_residual_serial(const SystemSpec& sys,
                                       const GridMap& map) {
  return el_residual_impl(sys, map, false);
}

std::vector<double> el_oracle_residual(const SystemSpec& sys,
                                       const GridMap& map) {
  map.validate();
  const long total = map.total();
  const int n = sys.n(), p = sys.p();
  std::vector<double> res(total * n, 0.0);

  // sqrt(h) dL/dx^i - d_a(sqrt(h) dL/dx^i_a), with the total derivative d_a
  // expanded by the chain rule in the same discrete jet data the residual
  // uses: d_a f = f_t + f_x xdot + f_xdot xddot. Everything is assembled
  // from metric and source derivative trees directly.
  for (long idx = 0; idx < total; ++idx) {
    auto mi = map.unflatten(idx);
    if (!map.interior(mi)) continue;
    JetPoint pt = map.jet_at(mi);
    Tensor3 xdd = node_xdd(map, mi, n, p);
    std::vector<double> txv = sys.tx(pt);

    Matrix hm = sys.h().value_at(pt.t);
    Matrix hinv = invert(hm);
    const double sqh = std::sqrt(sys.h().det(pt.t));
    Matrix phi = sys.phi().value_at(pt.x);
    Matrix Xv = sys.X_at(pt);

    // metric derivatives
    Tensor3 dh = make_tensor3(p, p, p);  // [a][b][c] = d_c h_ab
    for (int c = 0; c < p; ++c) {
      Matrix dc = sys.h().d1_at(c, pt.t);
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) dh[a][b][c] = dc[a][b];
    }
    Tensor3 dhinv = make_tensor3(p, p, p);  // [a][b][c] = d_c h^{ab}
    for (int c = 0; c < p; ++c)
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) {
          double s = 0.0;
          for (int u = 0; u < p; ++u)
            for (int v = 0; v < p; ++v)
              s -= hinv[a][u] * dh[u][v][c] * hinv[v][b];
          dhinv[a][b][c] = s;
        }
    std::vector<double> dsqh(p);  // d_c sqrt(h) = sqrt(h)/2 tr(h^{-1} dh_c)
    for (int c = 0; c < p; ++c) {
      double tr = 0.0;
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) tr += hinv[a][b] * dh[b][a][c];
      dsqh[c] = 0.5 * sqh * tr;
    }
    Tensor3 dphi = make_tensor3(n, n, n);  // [i][j][k] = d_k phi_ij
    for (int k = 0; k < n; ++k) {
      Matrix dk = sys.phi().d1_at(k, pt.x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dphi[i][j][k] = dk[i][j];
    }
    // source derivatives
    Tensor3 dXt = make_tensor3(n, p, p);  // d X^j_m / d t^c
    Tensor3 dXx = make_tensor3(n, p, n);  // d X^j_m / d x^k
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < p; ++m) {
        for (int c = 0; c < p; ++c) dXt[j][m][c] = sys.dXdt(j, m, c).eval(txv);
        for (int k = 0; k < n; ++k) dXx[j][m][k] = sys.dXdx(j, m, k).eval(txv);
      }

    // U^a_i and its partials
    Matrix U = make_matrix(p, n);
    Tensor3 dUt = make_tensor3(p, n, p), dUx = make_tensor3(p, n, n);
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i) {
        for (int m = 0; m < p; ++m)
          for (int l = 0; l < n; ++l) {
            U[a][i] += -2.0 * hinv[a][m] * phi[i][l] * Xv[l][m];
            for (int c = 0; c < p; ++c)
              dUt[a][i][c] += -2.0 * (dhinv[a][m][c] * phi[i][l] * Xv[l][m] +
                                      hinv[a][m] * phi[i][l] * dXt[l][m][c]);
            for (int k = 0; k < n; ++k)
              dUx[a][i][k] += -2.0 * (hinv[a][m] * dphi[i][l][k] * Xv[l][m] +
                                      hinv[a][m] * phi[i][l] * dXx[l][m][k]);
          }
      }

    for (int i = 0; i < n; ++i) {
      // sqrt(h) dL/dx^i
      double dLdx = 0.0;
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              dLdx +=
                  hinv[a][b] * dphi[j][k][i] * pt.xdot[j][a] * pt.xdot[k][b];
      for (int a = 0; a < p; ++a)
        for (int j = 0; j < n; ++j) dLdx += dUx[a][j][i] * pt.xdot[j][a];
      for (int m = 0; m < p; ++m)
        for (int nu = 0; nu < p; ++nu)
          for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
              dLdx += hinv[m][nu] * (dphi[r][s][i] * Xv[r][m] * Xv[s][nu] +
                                     2.0 * phi[r][s] * dXx[r][m][i] * Xv[s][nu]);
      dLdx *= sqh;

      // d_a (sqrt(h) P^a_i), P^a_i = 2 h^{ab} phi_ij xdot^j_b + U^a_i
      double div = 0.0;
      for (int a = 0; a < p; ++a) {
        double P = U[a][i];
        for (int b = 0; b < p; ++b)
          for (int j = 0; j < n; ++j)
            P += 2.0 * hinv[a][b] * phi[i][j] * pt.xdot[j][b];
        div += dsqh[a] * P;

        double dPdt = dUt[a][i][a];  // explicit t^a dependence
        for (int b = 0; b < p; ++b)
          for (int j = 0; j < n; ++j)
            dPdt += 2.0 * dhinv[a][b][a] * phi[i][j] * pt.xdot[j][b];
        double dPdx = 0.0;  // chain through x^k xdot^k_a
        for (int k = 0; k < n; ++k) {
          double t = dUx[a][i][k];
          for (int b = 0; b < p; ++b)
            for (int j = 0; j < n; ++j)
              t += 2.0 * hinv[a][b] * dphi[i][j][k] * pt.xdot[j][b];
          dPdx += t * pt.xdot[k][a];
        }
        double dPdv = 0.0;  // chain through xdot^j_b xddot^j_{ba}
        for (int b = 0; b < p; ++b)
          for (int j = 0; j < n; ++j)
            dPdv += 2.0 * hinv[a][b] * phi[i][j] * xdd[j][b][a];
        div += sqh * (dPdt + dPdx + dPdv);
      }
      res[idx * n + i] = dLdx - div;
    }
  }
  return res;
}

std::vector<double> energy_gradient(const SystemSpec& sys,
                                    const GridMap& map) {
  map.validate();
  const long total = map.total();
  const int n = sys.n(), p = sys.p();
  std::vector<std::vector<double>> dLdx(total);
  std::vector<Matrix> mom(total);
  std::vector<double> w(total);
#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < total; ++idx) {
    auto mi = map.unflatten(idx);
    node_grad_terms(sys, map, mi, dLdx[idx], mom[idx]);
    w[idx] = map.weight(mi);
  }

  // dE/dx(node) = w * sqrt(h) dL/dx at the node, plus the transposed
  // first-derivative stencils scattering each node's momentum term.
  std::vector<double> grad(total * n, 0.0);
  for (long idx = 0; idx < total; ++idx) {
    auto mi = map.unflatten(idx);
    for (int i = 0; i < n; ++i) grad[idx * n + i] += w[idx] * dLdx[idx][i];
    for (int a = 0; a < p; ++a) {
      auto st = map.d1_stencil(a, mi[a]);
      auto nb = mi;
      for (auto [pos, c] : st) {
        nb[a] = pos;
        long f = map.flatten(nb);
        for (int i = 0; i < n; ++i)
          grad[f * n + i] += w[idx] * mom[idx][a][i] * c;
      }
    }
  }
  for (long idx = 0; idx < total; ++idx)
    if (map.pinned(map.unflatten(idx)))
      for (int i = 0; i < n; ++i) grad[idx * n + i] = 0.0;
  return grad;
}

SolveResult minimize(const SystemSpec& sys, const GridMap& init,
                     const SolveOptions& opts) {
  init.validate();
  if (opts.preconditioner != "sobolev" && opts.preconditioner != "none")
    throw ConfigError("unknown preconditioner: " + opts.preconditioner);

  SolveResult out;
  out.map = init;
  SobolevSolver sob(out.map);

  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  double E = energy(sys, out.map);
  double carry_step = opts.initial_step;
  for (int it = 0; it < opts.max_iterations; ++it) {
    out.energy_trace.push_back(E);
    std::vector<double> g = energy_gradient(sys, out.map);
    out.final_gradient_norm = inf_norm(g);
    if (out.final_gradient_norm <= opts.grad_tol) {
      out.converged = true;
      return out;
    }

    std::vector<double> dir =
        opts.preconditioner == "sobolev" ? sob.solve(g) : g;
    double slope = 0.0;  // <g, -dir>, negative for a descent direction
    for (size_t k = 0; k < g.size(); ++k) slope -= g[k] * dir[k];

    // Armijo line search starting from the previously accepted step. A step
    // that passes is grown while the sufficient-decrease test keeps passing,
    // so the accepted step adapts to the preconditioner's scaling and grid.
    GridMap trial = out.map;
    double Et = 0.0;
    auto accepts = [&](double s) {
      for (size_t k = 0; k < g.size(); ++k)
        trial.values[k] = out.map.values[k] - s * dir[k];
      Et = energy(sys, trial);
      return Et <= E + opts.armijo_c * s * slope;
    };

    double step = carry_step;
    if (accepts(step)) {
      double Ebest = Et;
      while (step < 1e15 && accepts(2.0 * step) && Et <= Ebest) {
        step *= 2.0;
        Ebest = Et;
      }
      accepts(step);  // restore the accepted iterate in `trial`
    } else {
      do {
        step *= opts.backtrack;
        if (step < opts.min_step)
          throw LineSearchFailure("backtracking stalled below minimum step");
      } while (!accepts(step));
    }
    out.map.values = trial.values;
    E = Et;
    carry_step = step;
    out.iterations = it + 1;
  }
  out.energy_trace.push_back(E);
  std::vector<double> g = energy_gradient(sys, out.map);
  out.final_gradient_norm = inf_norm(g);
  out.converged = out.final_gradient_norm <= opts.grad_tol;
  return out;
}

// ---- prolongation ----

std::vector<std::vector<int>> multi_indices(int p, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  // nondecreasing sequences over {0..p-1}
  std::function<void(int)> rec = [&](int lo) {
    if (static_cast<int>(cur.size()) == order) {
      out.push_back(cur);
      return;
    }
    for (int a = lo; a < p; ++a) {
      cur.push_back(a);
      rec(a);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

namespace {

long binom(int a, int b) {
  if (b < 0 || b > a) return 0;
  long r = 1;
  for (int k = 1; k <= b; ++k) r = r * (a - b + k) / k;
  return r;
}

std::string jet_name(const std::string& base, const std::vector<int>& mi) {
  if (mi.empty()) return base;
  std::string s = base + "_";
  for (int a : mi) s += std::to_string(a + 1);
  return s;
}

}  // namespace

ProlongResult prolong(const HigherOrderSpec& spec) {
  const int r = spec.r, p = spec.p, n = spec.n;
  if (r < 1) throw InvalidOrder("system order must be at least 1");
  if (static_cast<int>(spec.xnames.size()) != n)
    throw ConfigError("coordinate name count does not match n");

  // Extended fibre coordinates: all jets of orders 0..r-1, order-major then
  // component-major then multi-index-major.
  std::vector<std::string> coords;
  std::vector<std::vector<std::vector<int>>> levels(r);
  std::vector<std::vector<std::vector<int>>> slot(r);  // [l][i][k] -> ext idx
  for (int l = 0; l < r; ++l) {
    levels[l] = multi_indices(p, l);
    slot[l].assign(n, std::vector<int>(levels[l].size(), -1));
    for (int i = 0; i < n; ++i)
      for (size_t k = 0; k < levels[l].size(); ++k) {
        slot[l][i][k] = static_cast<int>(coords.size());
        coords.push_back(jet_name(spec.xnames[i], levels[l][k]));
      }
  }
  const int n_tilde = static_cast<int>(coords.size());
  long subset_count = p;
  for (int l = 0; l < r; ++l) subset_count += n * binom(p, l);

  auto find_slot = [&](int i, std::vector<int> mi) {
    std::sort(mi.begin(), mi.end());
    int l = static_cast<int>(mi.size());
    for (size_t k = 0; k < levels[l].size(); ++k)
      if (levels[l][k] == mi) return slot[l][i][k];
    throw ConfigError("multi-index lookup failed");
  };

  std::vector<std::string> vars = spec.h.coords();
  vars.insert(vars.end(), coords.begin(), coords.end());

  auto top = multi_indices(p, r);
  if (static_cast<int>(spec.rhs.size()) != n)
    throw ConfigError("rhs row count does not match n");
  for (auto& row : spec.rhs)
    if (row.size() != top.size())
      throw ConfigError("rhs column count does not match the multi-index set");

  // First-order field: d/dt^a of jet (i, mi) of order l is the jet
  // (i, mi + a); for l = r-1 that is the supplied order-r source.
  std::vector<std::vector<Expr>> X(n_tilde,
                                   std::vector<Expr>(p, Expr::constant(0.0)));
  for (int l = 0; l < r; ++l)
    for (int i = 0; i < n; ++i)
      for (size_t k = 0; k < levels[l].size(); ++k) {
        int row = slot[l][i][k];
        for (int a = 0; a < p; ++a) {
          auto mi = levels[l][k];
          mi.push_back(a);
          std::sort(mi.begin(), mi.end());
          if (l + 1 < r) {
            int tgt = find_slot(i, mi);
            X[row][a] = Expr::variable(p + tgt, coords[tgt]);
          } else {
            size_t kk = 0;
            while (kk < top.size() && top[kk] != mi) ++kk;
            X[row][a] = parse(spec.rhs[i][kk], vars);
          }
        }
      }

  // Block fibre metric: the supplied phi on the order-0 block, identity on
  // every higher jet block.
  std::vector<std::vector<Expr>> phit(
      n_tilde, std::vector<Expr>(n_tilde, Expr::constant(0.0)));
  for (int i = 0; i < n_tilde; ++i) phit[i][i] = Expr::constant(1.0);
  if (static_cast<int>(spec.phi.size()) != n)
    throw ConfigError("phi row count does not match n");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(spec.phi[i].size()) != n)
      throw ConfigError("phi column count does not match n");
    for (int j = 0; j < n; ++j) phit[i][j] = parse(spec.phi[i][j], coords);
  }

  return ProlongResult{
      SystemSpec(spec.h, MetricField(coords, phit), std::move(X)), n_tilde,
      p + static_cast<long>(p + 1) * n_tilde, subset_count, coords};
}

}  // namespace jetlab
