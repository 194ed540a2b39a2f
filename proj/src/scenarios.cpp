#include "jetlab/scenarios.hpp"

#include <cmath>
#include <string>

#include "jetlab/errors.hpp"

namespace jetlab {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

// xi_{g i||j} - xi_{g j||i} lowered with phi, for one generator field.
// xi entries are over the concatenated (t..., x...) list.
Matrix lowered_curl(const SystemSpec& sys, const std::vector<Expr>& xi,
                    const JetPoint& pt) {
  const int p = sys.p(), n = sys.n();
  std::vector<double> txv = sys.tx(pt);
  Matrix phi = sys.phi().value_at(pt.x);
  Tensor3 gamma = sys.phi().christoffel(pt.x);

  Matrix cov = make_matrix(n, n);  // xi^i_{||j}
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = xi[i].diff(p + j).eval(txv);
      for (int m = 0; m < n; ++m)
        s += xi[m].eval(txv) * gamma[i][m][j];
      cov[i][j] = s;
    }
  Matrix out = make_matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double lo_ij = 0.0, lo_ji = 0.0;
      for (int m = 0; m < n; ++m) {
        lo_ij += phi[i][m] * cov[m][j];
        lo_ji += phi[j][m] * cov[m][i];
      }
      out[i][j] = lo_ij - lo_ji;
    }
  return out;
}

}  // namespace

SystemSpec build_orbits(const std::vector<Expr>& xi, const MetricField& phi) {
  const int n = static_cast<int>(xi.size());
  require(n >= 1 && static_cast<int>(phi.coords().size()) == n,
          "orbit field and fibre metric dimensions disagree");
  for (const Expr& e : xi)
    require(!e.depends_on(0), "orbit field must not depend on t");
  MetricField h({"t1"}, {{Expr::constant(1.0)}});
  std::vector<std::vector<Expr>> X(n);
  for (int i = 0; i < n; ++i) X[i] = {xi[i]};
  return SystemSpec(h, phi, std::move(X));
}

SystemSpec build_pfaff(const std::vector<Expr>& A, const MetricField& h) {
  const int p = static_cast<int>(h.coords().size());
  require(static_cast<int>(A.size()) == p,
          "one-form component count must match the base dimension");
  for (const Expr& e : A)
    require(!e.depends_on(static_cast<std::size_t>(p)),
            "Pfaffian one-form must depend on t only");
  MetricField phi({"x1"}, {{Expr::constant(1.0)}});
  std::vector<std::vector<Expr>> X = {A};
  return SystemSpec(h, phi, std::move(X));
}

SystemSpec build_group(const GroupIngredients& ing, const MetricField& h,
                       const MetricField& phi) {
  const int p = static_cast<int>(h.coords().size());
  const int n = static_cast<int>(phi.coords().size());
  require(ing.c >= 1, "at least one generator is required");
  require(static_cast<int>(ing.xi.size()) == ing.c &&
              static_cast<int>(ing.A.size()) == ing.c,
          "generator count mismatch");
  for (const auto& row : ing.xi)
    require(static_cast<int>(row.size()) == n, "generator dimension mismatch");
  for (const auto& row : ing.A)
    require(static_cast<int>(row.size()) == p, "one-form dimension mismatch");
  for (const auto& row : ing.xi)
    for (const Expr& e : row)
      for (int a = 0; a < p; ++a)
        require(!e.depends_on(a), "generators must depend on x only");
  for (const auto& row : ing.A)
    for (const Expr& e : row)
      for (int j = 0; j < n; ++j)
        require(!e.depends_on(p + j), "one-forms must depend on t only");

  std::vector<std::vector<Expr>> X(n, std::vector<Expr>(p));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a) {
      Expr s = Expr::constant(0.0);
      for (int g = 0; g < ing.c; ++g) s = s + ing.xi[g][i] * ing.A[g][a];
      X[i][a] = s;
    }
  return SystemSpec(h, phi, std::move(X));
}

int skew_triangle_size(int q) { return q * (q - 1) / 2; }

int skew_triangle_index(int q, int r, int c) {
  // column-major over the strict lower triangle
  return c * q - c * (c + 1) / 2 + (r - c - 1);
}

std::vector<std::pair<int, int>> skew_triangle_pairs(int q) {
  std::vector<std::pair<int, int>> out;
  for (int c = 0; c < q; ++c)
    for (int r = c + 1; r < q; ++r) out.emplace_back(r, c);
  return out;
}

std::vector<std::string> yang_mills_coords(int q, int p) {
  std::vector<std::string> out;
  for (int a = 0; a < p; ++a)
    for (auto [r, c] : skew_triangle_pairs(q))
      out.push_back("w" + std::to_string(a + 1) + "_" + std::to_string(r + 1) +
                    std::to_string(c + 1));
  return out;
}

SystemSpec build_yang_mills(const YangMillsIngredients& ing) {
  const int q = ing.q, p = ing.p;
  require(q >= 2 && p >= 1, "Yang-Mills rank and base dimension");
  require(static_cast<int>(ing.h.coords().size()) == p,
          "base metric dimension mismatch");
  if (!ing.h.is_constant())
    throw NonConstantBase("Yang-Mills base metric must be constant");

  const int m = skew_triangle_size(q);
  const int n = p * m;
  auto pairs = skew_triangle_pairs(q);
  std::vector<std::string> coords = yang_mills_coords(q, p);

  require(static_cast<int>(ing.f.size()) == p, "f block count mismatch");
  require(static_cast<int>(ing.F.size()) == p, "F block count mismatch");
  for (int a = 0; a < p; ++a) {
    require(static_cast<int>(ing.f[a].size()) == p, "f block count mismatch");
    require(static_cast<int>(ing.F[a].size()) == p, "F block count mismatch");
    for (int b = a; b < p; ++b)
      require(static_cast<int>(ing.f[a][b].size()) == m,
              "f triangle size mismatch");
    for (int b = a + 1; b < p; ++b) {
      require(static_cast<int>(ing.F[a][b].size()) == m,
              "F triangle size mismatch");
      for (const Expr& e : ing.F[a][b])
        for (int k = 0; k < n; ++k)
          require(!e.depends_on(p + k), "F must depend on t only");
    }
  }

  // (nabla_a)_{rc} as a signed coordinate expression
  auto entry = [&](int a, int r, int c) -> Expr {
    if (r == c) return Expr::constant(0.0);
    if (r > c) {
      int idx = a * m + skew_triangle_index(q, r, c);
      return Expr::variable(static_cast<std::size_t>(p + idx), coords[idx]);
    }
    int idx = a * m + skew_triangle_index(q, c, r);
    return Expr::constant(0.0) -
           Expr::variable(static_cast<std::size_t>(p + idx), coords[idx]);
  };

  std::vector<std::vector<Expr>> X(n, std::vector<Expr>(p));
  for (int a = 0; a < p; ++a)
    for (int ti = 0; ti < m; ++ti) {
      auto [r, c] = pairs[ti];
      for (int b = 0; b < p; ++b) {
        if (a <= b) {
          X[a * m + ti][b] = ing.f[a][b][ti];
          continue;
        }
        // (nabla_a nabla_b - nabla_b nabla_a)_{rc} + f_{ba} + F_{ba}
        Expr comm = Expr::constant(0.0);
        for (int k = 0; k < q; ++k)
          comm = comm + entry(a, r, k) * entry(b, k, c) -
                 entry(b, r, k) * entry(a, k, c);
        X[a * m + ti][b] = comm + ing.f[b][a][ti] + ing.F[b][a][ti];
      }
    }

  // phi_{(a u)(b v)} = 2 h^{ab} delta_{uv}; constant since h is.
  std::vector<double> t0(p, 0.0);
  Matrix hinv = ing.h.inverse_at(t0);
  std::vector<std::vector<Expr>> phi(n, std::vector<Expr>(n));
  for (int a = 0; a < p; ++a)
    for (int u = 0; u < m; ++u)
      for (int b = 0; b < p; ++b)
        for (int v = 0; v < m; ++v)
          phi[a * m + u][b * m + v] =
              Expr::constant(u == v ? 2.0 * hinv[a][b] : 0.0);

  return SystemSpec(ing.h, MetricField(coords, phi), std::move(X));
}

namespace {

void check_skew_family(const std::vector<std::vector<Matrix>>& Fv, int p,
                       int q) {
  if (static_cast<int>(Fv.size()) != p) throw NonSkew("curvature block count");
  for (int a = 0; a < p; ++a) {
    if (static_cast<int>(Fv[a].size()) != p)
      throw NonSkew("curvature block count");
    for (int b = 0; b < p; ++b) {
      if (static_cast<int>(Fv[a][b].size()) != q)
        throw NonSkew("curvature matrix size");
      for (int r = 0; r < q; ++r)
        for (int c = 0; c < q; ++c) {
          if (std::abs(Fv[a][b][r][c] + Fv[a][b][c][r]) > 1e-12)
            throw NonSkew("curvature matrix is not skew-symmetric");
          if (std::abs(Fv[a][b][r][c] + Fv[b][a][r][c]) > 1e-12)
            throw NonSkew("curvature family is not antisymmetric in (a,b)");
        }
    }
  }
}

}  // namespace

double ym_lagrangian(const YangMillsIngredients& ing,
                     const std::vector<std::vector<Matrix>>& Fv,
                     const std::vector<double>& t) {
  if (!ing.h.is_constant())
    throw NonConstantBase("Yang-Mills base metric must be constant");
  check_skew_family(Fv, ing.p, ing.q);
  Matrix hinv = ing.h.inverse_at(t);
  double s = 0.0;
  for (int a = 0; a < ing.p; ++a)
    for (int b = 0; b < ing.p; ++b)
      for (int mu = 0; mu < ing.p; ++mu)
        for (int nu = 0; nu < ing.p; ++nu) {
          double tr = 0.0;
          for (int r = 0; r < ing.q; ++r)
            for (int k = 0; k < ing.q; ++k)
              tr += Fv[a][b][r][k] * Fv[mu][nu][k][r];
          s += hinv[a][mu] * hinv[b][nu] * tr;
        }
  return s;
}

double ym_lagrangian_positive(const YangMillsIngredients& ing,
                              const std::vector<std::vector<Matrix>>& Fv,
                              const std::vector<double>& t) {
  return -ym_lagrangian(ing, Fv, t);
}

Tensor3 orbits_em_closed_form(const SystemSpec& sys,
                              const std::vector<Expr>& xi,
                              const JetPoint& pt) {
  const int n = sys.n();
  Matrix curl = lowered_curl(sys, xi, pt);
  Tensor3 out = make_tensor3(1, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[0][i][j] = 0.5 * curl[i][j];
  return out;
}

Tensor3 group_em_closed_form(const SystemSpec& sys,
                             const GroupIngredients& ing, const JetPoint& pt) {
  const int p = sys.p(), n = sys.n();
  std::vector<double> txv = sys.tx(pt);
  Matrix hinv = sys.h().inverse_at(pt.t);
  Tensor3 out = make_tensor3(p, n, n);
  for (int g = 0; g < ing.c; ++g) {
    Matrix curl = lowered_curl(sys, ing.xi[g], pt);
    for (int a = 0; a < p; ++a) {
      double Aup = 0.0;
      for (int b = 0; b < p; ++b)
        Aup += hinv[a][b] * ing.A[g][b].eval(txv);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out[a][i][j] += 0.5 * Aup * curl[i][j];
    }
  }
  return out;
}

Tensor4 group_torsion_closed_form(const SystemSpec& sys,
                                  const GroupIngredients& ing,
                                  const JetPoint& pt, double sign) {
  const int p = sys.p(), n = sys.n();
  std::vector<double> txv = sys.tx(pt);
  Tensor3 Hg = sys.h().christoffel(pt.t);
  Tensor4 out = make_tensor4(n, p, p, n);
  for (int g = 0; g < ing.c; ++g) {
    Matrix curl = lowered_curl(sys, ing.xi[g], pt);
    Matrix phiinv = invert(sys.phi().value_at(pt.x));
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        // A^g_{a//b} = dA^g_a/dt^b - A^g_m H^m_{ab}
        double cov = ing.A[g][a].diff(b).eval(txv);
        for (int mu = 0; mu < p; ++mu)
          cov -= ing.A[g][mu].eval(txv) * Hg[mu][a][b];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double raised = 0.0;  // raise the first fibre index with phi^{im}
            for (int mm = 0; mm < n; ++mm)
              raised += phiinv[i][mm] * curl[mm][j];
            out[i][a][b][j] += sign * 0.5 * cov * raised;
          }
      }
  }
  return out;
}

}  // namespace jetlab
