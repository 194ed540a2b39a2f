#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "jetlab/gridmap.hpp"
#include "jetlab/metric.hpp"
#include "jetlab/sampling.hpp"
#include "jetlab/scenarios.hpp"
#include "jetlab/system.hpp"

namespace th {

using namespace jetlab;

inline Expr C(double v) { return Expr::constant(v); }
inline Expr V(int i, const std::string& name) {
  return Expr::variable(static_cast<std::size_t>(i), name);
}

inline MetricField identity_metric(const std::vector<std::string>& names) {
  const int d = static_cast<int>(names.size());
  std::vector<std::vector<Expr>> e(d, std::vector<Expr>(d, C(0.0)));
  for (int i = 0; i < d; ++i) e[i][i] = C(1.0);
  return MetricField(names, e);
}

// Unit 2-sphere metric diag(1, sin(x1)^2) over (x1, x2).
inline MetricField sphere_metric() {
  std::vector<std::string> names = {"x1", "x2"};
  Expr s = Expr::sin(V(0, "x1"));
  return MetricField(names, {{C(1.0), C(0.0)}, {C(0.0), s * s}});
}

// Rotation orbit system: p = 1, flat metrics, xi = (-x2, x1).
// X expressions are over (t1, x1, x2).
inline SystemSpec rotation_system() {
  std::vector<Expr> xi = {C(0.0) - V(2, "x2"), V(1, "x1")};
  return build_orbits(xi, identity_metric({"x1", "x2"}));
}

// Azimuthal orbit field on the unit sphere: xi = (0, 1).
inline SystemSpec sphere_orbit_system() {
  std::vector<Expr> xi = {C(0.0), C(1.0)};
  return build_orbits(xi, sphere_metric());
}

inline JetPoint sample_point(const SystemSpec& sys, SplitMix64& rng,
                             const std::vector<double>& xlo,
                             const std::vector<double>& xhi) {
  JetPoint pt;
  pt.t.resize(sys.p());
  for (double& v : pt.t) v = rng.uniform(0.1, 1.9);
  pt.x.resize(sys.n());
  for (int i = 0; i < sys.n(); ++i) pt.x[i] = rng.uniform(xlo[i], xhi[i]);
  pt.xdot = make_matrix(sys.n(), sys.p());
  for (auto& row : pt.xdot)
    for (double& v : row) v = rng.uniform(-1.0, 1.0);
  return pt;
}

// central difference of a scalar function of one perturbed coordinate
inline double fd(const std::function<double(double)>& f, double x0,
                 double h = 1e-5) {
  return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline GridMap uniform_grid(const SystemSpec& sys, double t0, double t1,
                            int nodes) {
  GridMap map;
  map.tmin = {t0};
  map.tmax = {t1};
  map.shape = {nodes};
  map.p = 1;
  map.n = sys.n();
  map.values.assign(static_cast<long>(nodes) * sys.n(), 0.0);
  return map;
}

}  // namespace th
