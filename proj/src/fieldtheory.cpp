#include "jetlab/fieldtheory.hpp"

#include <cmath>

namespace jetlab {

namespace {

struct Eval {
  int p, n;
  std::vector<double> txv;
  Matrix h, hinv, phi, phiinv;
  Tensor3 Hg, gamma;

  Eval(const SystemSpec& sys, const JetPoint& pt)
      : p(sys.p()), n(sys.n()), txv(sys.tx(pt)) {
    h = sys.h().value_at(pt.t);
    hinv = invert(h);
    phi = sys.phi().value_at(pt.x);
    phiinv = invert(phi);
    Hg = sys.h().christoffel(pt.t);
    gamma = sys.phi().christoffel(pt.x);
  }
};

// dDx/dt^b and dDx/dx^k, the raw partials of the covariant Jacobian before
// any connection correction.
Tensor4 raw_dDx_dt(const SystemSpec& sys, const JetPoint& pt, const Eval& ev) {
  Tensor4 out = make_tensor4(ev.n, ev.p, ev.n, ev.p);
  for (int i = 0; i < ev.n; ++i)
    for (int a = 0; a < ev.p; ++a)
      for (int j = 0; j < ev.n; ++j)
        for (int b = 0; b < ev.p; ++b) {
          double v = sys.d2Xxt(i, a, j, b).eval(ev.txv);
          for (int m = 0; m < ev.n; ++m)
            v += sys.dXdt(m, a, b).eval(ev.txv) * ev.gamma[i][m][j];
          out[i][a][j][b] = v;
        }
  return out;
}

Tensor4 raw_dDx_dx(const SystemSpec& sys, const JetPoint& pt, const Eval& ev) {
  Tensor4 dgamma = sys.phi().christoffel_derivatives(pt.x);
  Matrix Xv = sys.X_at(pt);
  Tensor4 out = make_tensor4(ev.n, ev.p, ev.n, ev.n);
  for (int i = 0; i < ev.n; ++i)
    for (int a = 0; a < ev.p; ++a)
      for (int j = 0; j < ev.n; ++j)
        for (int k = 0; k < ev.n; ++k) {
          double v = sys.d2Xxx(i, a, j, k).eval(ev.txv);
          for (int m = 0; m < ev.n; ++m) {
            v += sys.dXdx(m, a, k).eval(ev.txv) * ev.gamma[i][m][j];
            v += Xv[m][a] * dgamma[i][m][j][k];
          }
          out[i][a][j][k] = v;
        }
  return out;
}

}  // namespace

EMField em_field(const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  CovDerivatives cd = cov_derivatives(sys, pt);
  EMField out;
  out.F = make_tensor3(ev.p, ev.n, ev.n);
  for (int a = 0; a < ev.p; ++a)
    for (int i = 0; i < ev.n; ++i)
      for (int j = i + 1; j < ev.n; ++j) {
        double v = 0.0;
        for (int m = 0; m < ev.p; ++m)
          for (int k = 0; k < ev.n; ++k)
            v += ev.hinv[a][m] *
                 (ev.phi[i][k] * cd.Dx[k][m][j] - ev.phi[j][k] * cd.Dx[k][m][i]);
        out.F[a][i][j] = 0.5 * v;
        out.F[a][j][i] = -out.F[a][i][j];
      }
  return out;
}

MaxwellResiduals maxwell_residuals(const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  const int p = ev.p, n = ev.n;
  CovDerivatives cd = cov_derivatives(sys, pt);
  SecondCovDerivatives sd = second_cov_derivatives(sys, pt);
  EMField em = em_field(sys, pt);
  Tensor4 dDxdt = raw_dDx_dt(sys, pt, ev);
  Tensor4 dDxdx = raw_dDx_dx(sys, pt, ev);

  // dF/dt^b and dF/dx^k by the product rule through h^{am}(t), phi(x), Dx.
  Tensor4 dFdt = make_tensor4(p, n, n, p);
  for (int b = 0; b < p; ++b) {
    // d h^{am} / dt^b = -h^{au} (d h_{uv}/dt^b) h^{vm}
    Matrix dh = sys.h().d1_at(b, pt.t);
    Matrix dhinv = make_matrix(p, p);
    for (int a = 0; a < p; ++a)
      for (int m = 0; m < p; ++m) {
        double s = 0.0;
        for (int u = 0; u < p; ++u)
          for (int v = 0; v < p; ++v)
            s += ev.hinv[a][u] * dh[u][v] * ev.hinv[v][m];
        dhinv[a][m] = -s;
      }
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          for (int m = 0; m < p; ++m)
            for (int k = 0; k < n; ++k) {
              v += dhinv[a][m] * (ev.phi[i][k] * cd.Dx[k][m][j] -
                                  ev.phi[j][k] * cd.Dx[k][m][i]);
              v += ev.hinv[a][m] * (ev.phi[i][k] * dDxdt[k][m][j][b] -
                                    ev.phi[j][k] * dDxdt[k][m][i][b]);
            }
          dFdt[a][i][j][b] = 0.5 * v;
        }
  }
  Tensor4 dFdx = make_tensor4(p, n, n, n);
  for (int k = 0; k < n; ++k) {
    Matrix dphi = sys.phi().d1_at(k, pt.x);
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          for (int m = 0; m < p; ++m)
            for (int l = 0; l < n; ++l) {
              v += ev.hinv[a][m] * (dphi[i][l] * cd.Dx[l][m][j] -
                                    dphi[j][l] * cd.Dx[l][m][i]);
              v += ev.hinv[a][m] * (ev.phi[i][l] * dDxdx[l][m][j][k] -
                                    ev.phi[j][l] * dDxdx[l][m][i][k]);
            }
          dFdx[a][i][j][k] = 0.5 * v;
        }
  }

  MaxwellResiduals out;
  out.eq1 = make_tensor4(p, n, n, p);
  out.eq1_variant = make_tensor4(p, n, n, p);
  out.eq2 = make_tensor4(p, n, n, n);
  out.eq3 = make_tensor4(p, n, n, n);

  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < p; ++b) {
          // F^(a)_(i)j //b : only the upper temporal index is corrected
          double lhs = dFdt[a][i][j][b];
          for (int m = 0; m < p; ++m)
            lhs += em.F[m][i][j] * ev.Hg[a][m][b];
          // bracket[i][j] = phi_im [Dxt^m_j - phi^{mr} Dxt^s_r phi_sj]
          auto bracket = [&](int ii, int jj) {
            double s = 0.0;
            for (int m = 0; m < p; ++m) {
              double inner = 0.0;
              for (int mm = 0; mm < n; ++mm) {
                double t = sd.Dxt[mm][m][jj][b];
                for (int r = 0; r < n; ++r)
                  for (int ss = 0; ss < n; ++ss)
                    t -= ev.phiinv[mm][r] * sd.Dxt[ss][m][r][b] *
                         ev.phi[ss][jj];
                inner += ev.phi[ii][mm] * t;
              }
              s += ev.hinv[a][m] * inner;
            }
            return s;
          };
          // collapsed[i][j] = h^{am} [phi_im Dxt^m_j - phi_jm Dxt^m_i]
          auto collapsed = [&](int ii, int jj) {
            double s = 0.0;
            for (int m = 0; m < p; ++m)
              for (int mm = 0; mm < n; ++mm)
                s += ev.hinv[a][m] * (ev.phi[ii][mm] * sd.Dxt[mm][m][jj][b] -
                                      ev.phi[jj][mm] * sd.Dxt[mm][m][ii][b]);
            return s;
          };
          double rhs = 0.25 * (bracket(i, j) - bracket(j, i));
          double rhs_var = 0.25 * (collapsed(i, j) - collapsed(j, i));
          out.eq1[a][i][j][b] = lhs - rhs;
          out.eq1_variant[a][i][j][b] = lhs - rhs_var;
        }

  // F^(a)_(i)j ||k, cyclic over {i,j,k}
  auto cov_k = [&](int a, int i, int j, int k) {
    double v = dFdx[a][i][j][k];
    for (int m = 0; m < n; ++m) {
      v -= em.F[a][m][j] * ev.gamma[m][i][k];
      v -= em.F[a][i][m] * ev.gamma[m][j][k];
    }
    return v;
  };
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          out.eq2[a][i][j][k] =
              cov_k(a, i, j, k) + cov_k(a, j, k, i) + cov_k(a, k, i, j);
  return out;
}

SasakianMetric sasakian_metric(const SystemSpec& sys, const JetPoint& pt) {
  Eval ev(sys, pt);
  const int p = ev.p, n = ev.n;
  const int N = p + n + n * p;
  auto conns = nonlinear_connection(sys, pt);
  SasakianMetric out;
  out.blocks = make_matrix(N, N);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) out.blocks[a][b] = ev.h[a][b];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.blocks[p + i][p + j] = ev.phi[i][j];
  auto jet = [&](int i, int a) { return p + n + i * p + a; };
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < p; ++b)
          out.blocks[jet(i, a)][jet(j, b)] = ev.hinv[a][b] * ev.phi[i][j];
  out.frame = adapted_frame(conns.second, p, n);
  return out;
}

namespace {

// Row-major iteration over a box grid.
struct GridIter {
  const BoxGrid& g;
  int dims;
  long total;

  explicit GridIter(const BoxGrid& g_) : g(g_), dims((int)g_.shape.size()) {
    total = 1;
    for (int s : g.shape) total *= s;
  }

  std::vector<int> unflatten(long idx) const {
    std::vector<int> mi(dims);
    for (int d = dims - 1; d >= 0; --d) {
      mi[d] = static_cast<int>(idx % g.shape[d]);
      idx /= g.shape[d];
    }
    return mi;
  }

  long flatten(const std::vector<int>& mi) const {
    long idx = 0;
    for (int d = 0; d < dims; ++d) idx = idx * g.shape[d] + mi[d];
    return idx;
  }

  double spacing(int d) const {
    return (g.max[d] - g.min[d]) / (g.shape[d] - 1);
  }

  std::vector<double> point(const std::vector<int>& mi) const {
    std::vector<double> x(dims);
    for (int d = 0; d < dims; ++d) x[d] = g.min[d] + mi[d] * spacing(d);
    return x;
  }

  bool interior(const std::vector<int>& mi) const {
    for (int d = 0; d < dims; ++d)
      if (mi[d] == 0 || mi[d] == g.shape[d] - 1) return false;
    return true;
  }
};

// T^u_v = ginv (ric - (scal_self + scal_other)/2 g) / K at a point.
Matrix stress_mixed(const MetricField& g, std::span<const double> point,
                    double other_scalar, double K) {
  CurvatureBundle c = curvature(g, point);
  Matrix gv = g.value_at(point);
  Matrix ginv = g.inverse_at(point);
  const int d = g.dim();
  Matrix low = make_matrix(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      low[i][j] =
          (c.ricci[i][j] - 0.5 * (c.scalar + other_scalar) * gv[i][j]) / K;
  Matrix up = make_matrix(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int m = 0; m < d; ++m) up[i][j] += ginv[i][m] * low[m][j];
  return up;
}

// Max-norm of the covariant divergence of the mixed stress tensor over the
// interior of the grid, with derivatives by central differences.
double divergence_residual(const MetricField& g, const BoxGrid& grid,
                           double other_scalar, double K) {
  GridIter it(grid);
  const int d = g.dim();
  // precompute T at all nodes
  std::vector<Matrix> T(it.total);
  for (long idx = 0; idx < it.total; ++idx) {
    auto mi = it.unflatten(idx);
    auto x = it.point(mi);
    T[idx] = stress_mixed(g, x, other_scalar, K);
  }
  double worst = 0.0;
  for (long idx = 0; idx < it.total; ++idx) {
    auto mi = it.unflatten(idx);
    if (!it.interior(mi)) continue;
    auto x = it.point(mi);
    Tensor3 gam = g.christoffel(x);
    for (int b = 0; b < d; ++b) {
      double div = 0.0;
      for (int m = 0; m < d; ++m) {
        auto hi = mi, lo = mi;
        ++hi[m];
        --lo[m];
        div += (T[it.flatten(hi)][m][b] - T[it.flatten(lo)][m][b]) /
               (2.0 * it.spacing(m));
        for (int v = 0; v < d; ++v) {
          div += gam[m][m][v] * T[idx][v][b];
          div -= gam[v][m][b] * T[idx][m][v];
        }
      }
      worst = std::max(worst, std::abs(div));
    }
  }
  return worst;
}

}  // namespace

EinsteinReport einstein_report(const SystemSpec& sys, double K,
                               const BoxGrid& tgrid, const BoxGrid& xgrid) {
  if (K == 0.0) throw ConfigError("einstein coupling K must be nonzero");
  for (int s : tgrid.shape)
    if (s < 5) throw DegenerateGrid("t grid axis has fewer than 5 nodes");
  for (int s : xgrid.shape)
    if (s < 5) throw DegenerateGrid("x grid axis has fewer than 5 nodes");

  const int p = sys.p(), n = sys.n();
  std::vector<double> t0(p), x0(n);
  for (int a = 0; a < p; ++a) t0[a] = 0.5 * (tgrid.min[a] + tgrid.max[a]);
  for (int i = 0; i < n; ++i) x0[i] = 0.5 * (xgrid.min[i] + xgrid.max[i]);

  CurvatureBundle hc = curvature(sys.h(), t0);
  CurvatureBundle pc = curvature(sys.phi(), x0);
  Matrix hv = sys.h().value_at(t0);
  Matrix hinv = invert(hv);
  Matrix pv = sys.phi().value_at(x0);

  EinsteinReport out;
  out.K = K;
  double half = 0.5 * (hc.scalar + pc.scalar);
  out.Ttt = make_matrix(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      out.Ttt[a][b] = (hc.ricci[a][b] - half * hv[a][b]) / K;
  out.Txx = make_matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.Txx[i][j] = (pc.ricci[i][j] - half * pv[i][j]) / K;
  out.Tvv = make_tensor4(p, p, n, n);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out.Tvv[a][b][i][j] = -half * hinv[a][b] * pv[i][j] / K;
  out.zero_blocks = {"T_alpha_i", "T_i_alpha",  "T_(i)^(alpha)_beta",
                     "T_alpha^(beta)_(i)", "T_i^(alpha)_(j)", "T_(i)^(alpha)_j"};
  out.conservation_t =
      divergence_residual(sys.h(), tgrid, pc.scalar, K);
  out.conservation_x =
      divergence_residual(sys.phi(), xgrid, hc.scalar, K);
  return out;
}

}  // namespace jetlab
