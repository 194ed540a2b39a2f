#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jetlab/gridmap.hpp"
#include "jetlab/metric.hpp"
#include "jetlab/system.hpp"

namespace jetlab {

// Least-squares Lagrangian density at a jet point, written out as
// h^{ab} phi_ij x^i_a x^j_b + U^{(a)}_{(i)} x^i_a + Phi.
double lagrangian_at(const SystemSpec& sys, const JetPoint& pt);

// Both algebraic expansions of the density: first the quadratic-linear-scalar
// form above, second the defect form h^{ab} phi_ij (x^i_a - X^i_a)(x^j_b - X^j_b).
std::pair<double, double> lagrangian_forms(const SystemSpec& sys,
                                           const JetPoint& pt);

// Discrete energy: trapezoid quadrature of L * sqrt(det h) over the grid.
double energy(const SystemSpec& sys, const GridMap& map);
double energy_serial(const SystemSpec& sys, const GridMap& map);

// Euler-Lagrange residual per interior node and component, in the harmonic
// normalization h^{ab}(x^i_{ab} + 2 H^i_{ab} + 2 G^i_{ab}).
// Layout matches map.values (zeros on non-interior nodes).
std::vector<double> el_residual(const SystemSpec& sys, const GridMap& map);
std::vector<double> el_residual_serial(const SystemSpec& sys,
                                       const GridMap& map);

// Independent oracle: d/dt^a of the discrete momentum sqrt(h) dL/dx^i_a
// (finite differences) against the exact partial sqrt(h) dL/dx^i, assembled
// directly from metric and source derivatives without any connection or
// spray machinery. Vanishes on solutions of the Euler-Lagrange equations.
std::vector<double> el_oracle_residual(const SystemSpec& sys,
                                       const GridMap& map);

struct SolveOptions {
  int max_iterations = 500;
  double grad_tol = 1e-4;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  double min_step = 1e-16;
  // "sobolev" (default): descent direction from (I + D^T D) d = grad, which
  // keeps the iteration count bounded as the grid is refined. "none": raw
  // gradient descent.
  std::string preconditioner = "sobolev";
};

struct SolveResult {
  GridMap map;
  std::vector<double> energy_trace;  // energy at start of each iteration
  int iterations = 0;
  bool converged = false;
  double final_gradient_norm = 0.0;
};

// Projected gradient descent with Armijo backtracking on the discrete
// energy; pinned boundary nodes are held fixed. Throws LineSearchFailure
// if backtracking stalls below min_step.
SolveResult minimize(const SystemSpec& sys, const GridMap& init,
                     const SolveOptions& opts);

// Analytic energy gradient (exposed for tests; zero on pinned nodes).
std::vector<double> energy_gradient(const SystemSpec& sys, const GridMap& map);

// ---- prolongation of higher-order systems to first order ----

// Order-r system x^i_{(a1..ar)} = rhs^i_{(a1..ar)}(t, lower-order jets)
// over a base fibre metric phi on the order-0 coordinates.
struct HigherOrderSpec {
  int r = 1;
  int p = 1;
  int n = 1;
  MetricField h;  // over t coordinates
  // rhs[i][k]: source for the order-r multi-index at slot k of
  // multi_indices(p, r), over variables (t..., extended coordinates...).
  std::vector<std::vector<std::string>> rhs;
  // phi[i][j]: fibre metric entries over the order-0 coordinate names.
  std::vector<std::vector<std::string>> phi;
  std::vector<std::string> xnames;  // order-0 names, e.g. {"x1","x2"}
};

struct ProlongResult {
  SystemSpec sys;
  int n_tilde = 0;    // extended fibre dimension n * sum_l C(p+l-1, l)
  long dim_j1 = 0;    // p + (p+1) * n_tilde
  long subset_count = 0;  // p + n * sum_l C(p, l), the distinct-index count
  std::vector<std::string> coords;  // extended fibre coordinate names
};

// Nondecreasing multi-indices of the given order over axes 0..p-1.
std::vector<std::vector<int>> multi_indices(int p, int order);

ProlongResult prolong(const HigherOrderSpec& spec);

}  // namespace jetlab
