#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "jetlab/lsqsolve.hpp"

using namespace jetlab;
using namespace th;

namespace {

GridMap filled_rotation_grid(int nodes) {
  SystemSpec sys = rotation_system();
  GridMap map = uniform_grid(sys, 0.0, 6.0, nodes);
  SplitMix64 rng{71};
  for (long k = 0; k < map.total(); ++k) {
    double t = map.node_t({static_cast<int>(k)})[0];
    map.value(k, 0) = std::cos(t) + 0.02 * rng.uniform(-1, 1);
    map.value(k, 1) = std::sin(t) + 0.02 * rng.uniform(-1, 1);
  }
  return map;
}

GridMap filled_group_grid(SystemSpec& sys, int nodes) {
  GridMap map;
  map.tmin = {0.0, 0.0};
  map.tmax = {1.0, 1.0};
  map.shape = {nodes, nodes};
  map.p = 2;
  map.n = 2;
  map.values.assign(map.total() * 2, 0.0);
  SplitMix64 rng{72};
  for (long k = 0; k < map.total(); ++k) {
    auto t = map.node_t(map.unflatten(k));
    map.value(k, 0) = std::exp(t[0]) * std::cos(t[1]) + 0.01 * rng.uniform(-1, 1);
    map.value(k, 1) = std::exp(t[0]) * std::sin(t[1]) + 0.01 * rng.uniform(-1, 1);
  }
  return map;
}

SystemSpec group_system() {
  Expr x1 = V(2, "x1"), x2 = V(3, "x2");
  GroupIngredients ing;
  ing.c = 2;
  ing.xi = {{x1, x2}, {C(0.0) - x2, x1}};
  ing.A = {{C(1.0), C(0.0)}, {C(0.0), C(1.0)}};
  return build_group(ing, identity_metric({"t1", "t2"}),
                     identity_metric({"x1", "x2"}));
}

}  // namespace

TEST_CASE("parallel and serial energies are bitwise identical (p = 1)") {
  SystemSpec sys = rotation_system();
  GridMap map = filled_rotation_grid(4001);
  CHECK(energy(sys, map) == energy_serial(sys, map));
  CHECK(el_residual(sys, map) == el_residual_serial(sys, map));
}

TEST_CASE("parallel and serial energies are bitwise identical (p = 2)") {
  SystemSpec sys = group_system();
  GridMap map = filled_group_grid(sys, 41);
  CHECK(energy(sys, map) == energy_serial(sys, map));
  CHECK(el_residual(sys, map) == el_residual_serial(sys, map));
}
