#pragma once

#include <vector>

#include "jetlab/metric.hpp"
#include "jetlab/system.hpp"

namespace jetlab {

// All ingredient expressions are over the concatenated (t..., x...) variable
// list of the system being built; "over x only" / "over t only" preconditions
// are enforced with depends_on checks rather than separate index spaces.

// Orbit system of a spatial vector field: p = 1, h = (1) over "t1",
// X^(i)_(1) = xi^i(x).
SystemSpec build_orbits(const std::vector<Expr>& xi, const MetricField& phi);

// Pfaffian system: n = 1, phi = (1) over "x1", X^(1)_(a) = A_a(t).
SystemSpec build_pfaff(const std::vector<Expr>& A, const MetricField& h);

struct GroupIngredients {
  int c = 0;
  std::vector<std::vector<Expr>> xi;  // [a][i], generator fields over x
  std::vector<std::vector<Expr>> A;   // [a][alpha], one-forms over t
};

// Transformation-group system X^(i)_(a) = sum_a xi^i_a(x) A^a_alpha(t).
SystemSpec build_group(const GroupIngredients& ing, const MetricField& h,
                       const MetricField& phi);

struct YangMillsIngredients {
  int q = 0;  // fibre rank; skew matrices live in o(q)
  int p = 0;  // base dimension
  MetricField h;  // over t, entries must be constant
  // Skew q x q matrices are stored by their strict lower triangle,
  // column-major: (r, c) with r > c, c fastest over columns.
  // f[a][b] is defined for a <= b, entries over (t..., connection coords...).
  std::vector<std::vector<std::vector<Expr>>> f;
  // F[a][b] is defined for a < b, entries over t only.
  std::vector<std::vector<std::vector<Expr>>> F;
};

// Triangle bookkeeping for the skew storage above.
int skew_triangle_size(int q);
int skew_triangle_index(int q, int r, int c);  // r > c
std::vector<std::pair<int, int>> skew_triangle_pairs(int q);

// Extended coordinate names w{a}_{r}{c} for the connection matrices;
// the first-order field carries f for a <= b and the commutator-corrected
// curvature constraint for a > b, expanded symbolically.
SystemSpec build_yang_mills(const YangMillsIngredients& ing);
std::vector<std::string> yang_mills_coords(int q, int p);

// Yang-Mills Lagrangian h^{am} h^{bn} F^v_{u ab} F^u_{v mn} evaluated as
// printed at given curvature matrices Fv[a][b] (q x q, skew, Fv[b][a] =
// -Fv[a][b]); negative on skew data.
double ym_lagrangian(const YangMillsIngredients& ing,
                     const std::vector<std::vector<Matrix>>& Fv,
                     const std::vector<double>& t);
// The positive-definite reading -h^{am} h^{bn} Tr(F_ab F_mn) of the same data.
double ym_lagrangian_positive(const YangMillsIngredients& ing,
                              const std::vector<std::vector<Matrix>>& Fv,
                              const std::vector<double>& t);

// Closed-form electromagnetic components used as verify-report cross-checks.
// Orbits: F^(1)_(i)j = (1/2)(xi_{i||j} - xi_{j||i}).
Tensor3 orbits_em_closed_form(const SystemSpec& sys,
                              const std::vector<Expr>& xi, const JetPoint& pt);
// Group: F^(a)_(i)j = sum_g (h^{ab} A^g_b / 2)(xi_{g i||j} - xi_{g j||i}).
Tensor3 group_em_closed_form(const SystemSpec& sys,
                             const GroupIngredients& ing, const JetPoint& pt);

// Group torsion candidate (curvature part mixing t and fibre indices):
// sign * (A^g_{a//b} / 2)(xi_{g i||j} - xi_{g j||i}), shape [i][a][b][j].
Tensor4 group_torsion_closed_form(const SystemSpec& sys,
                                  const GroupIngredients& ing,
                                  const JetPoint& pt, double sign);

}  // namespace jetlab
