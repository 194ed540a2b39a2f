// Benchmark of the OpenMP grid kernels against their serial references.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "jetlab/lsqsolve.hpp"
#include "jetlab/scenarios.hpp"

using namespace jetlab;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

}  // namespace

int main() {
  std::vector<std::string> xn = {"x1", "x2"};
  std::vector<Expr> xi = {
      Expr::constant(0.0) - Expr::variable(2, "x2"),
      Expr::variable(1, "x1"),
  };
  std::vector<std::vector<Expr>> id = {
      {Expr::constant(1.0), Expr::constant(0.0)},
      {Expr::constant(0.0), Expr::constant(1.0)}};
  SystemSpec sys = build_orbits(xi, MetricField(xn, id));

  for (int nodes : {20001, 200001}) {
    GridMap map;
    map.tmin = {0.0};
    map.tmax = {6.283185307179586};
    map.shape = {nodes};
    map.p = 1;
    map.n = 2;
    map.values.resize(2 * nodes);
    for (int k = 0; k < nodes; ++k) {
      double t = map.node_t({k})[0];
      map.value(k, 0) = std::cos(t) + 0.05 * std::sin(3 * t);
      map.value(k, 1) = std::sin(t);
    }

    double e_par = 0, e_ser = 0;
    double t_epar = time_best_of(5, [&] { e_par = energy(sys, map); });
    double t_eser = time_best_of(5, [&] { e_ser = energy_serial(sys, map); });
    std::vector<double> r_par, r_ser;
    double t_rpar = time_best_of(3, [&] { r_par = el_residual(sys, map); });
    double t_rser =
        time_best_of(3, [&] { r_ser = el_residual_serial(sys, map); });

    bool energy_match = e_par == e_ser;
    bool residual_match = r_par == r_ser;
    std::printf("nodes=%d\n", nodes);
    std::printf("  energy       parallel %8.2f ms  serial %8.2f ms  speedup %5.2fx  bitwise_equal=%s\n",
                t_epar, t_eser, t_eser / t_epar, energy_match ? "yes" : "no");
    std::printf("  el_residual  parallel %8.2f ms  serial %8.2f ms  speedup %5.2fx  bitwise_equal=%s\n",
                t_rpar, t_rser, t_rser / t_rpar, residual_match ? "yes" : "no");
    if (!energy_match || !residual_match) return 1;
  }
  return 0;
}
