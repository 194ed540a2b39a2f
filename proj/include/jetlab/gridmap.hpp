#pragma once

#include <vector>

#include "jetlab/errors.hpp"
#include "jetlab/system.hpp"

namespace jetlab {

// Discretized map T -> M on a uniform tensor grid over a box domain.
// Node storage is row-major over the shape, n components per node. Pinned
// nodes (per the boundary mode) are never touched by the minimizer.
struct GridMap {
  enum class Boundary { FixedInitial, FixedAll };

  std::vector<double> tmin, tmax;  // p
  std::vector<int> shape;          // p, each >= 5
  int p = 0, n = 0;
  Boundary boundary = Boundary::FixedInitial;
  std::vector<double> values;  // total() * n

  long total() const {
    long t = 1;
    for (int s : shape) t *= s;
    return t;
  }

  double spacing(int d) const {
    return (tmax[d] - tmin[d]) / (shape[d] - 1);
  }

  std::vector<int> unflatten(long idx) const {
    std::vector<int> mi(p);
    for (int d = p - 1; d >= 0; --d) {
      mi[d] = static_cast<int>(idx % shape[d]);
      idx /= shape[d];
    }
    return mi;
  }

  long flatten(const std::vector<int>& mi) const {
    long idx = 0;
    for (int d = 0; d < p; ++d) idx = idx * shape[d] + mi[d];
    return idx;
  }

  std::vector<double> node_t(const std::vector<int>& mi) const {
    std::vector<double> t(p);
    for (int d = 0; d < p; ++d) t[d] = tmin[d] + mi[d] * spacing(d);
    return t;
  }

  bool interior(const std::vector<int>& mi) const {
    for (int d = 0; d < p; ++d)
      if (mi[d] == 0 || mi[d] == shape[d] - 1) return false;
    return true;
  }

  bool pinned(const std::vector<int>& mi) const {
    if (boundary == Boundary::FixedInitial) return mi[0] == 0;
    return !interior(mi);
  }

  double value(long idx, int i) const { return values[idx * n + i]; }
  double& value(long idx, int i) { return values[idx * n + i]; }

  void validate() const {
    if (static_cast<int>(shape.size()) != p || p <= 0 || n <= 0)
      throw DegenerateGrid("inconsistent grid dimensions");
    for (int s : shape)
      if (s < 5) throw DegenerateGrid("grid axis has fewer than 5 nodes");
    for (int d = 0; d < p; ++d)
      if (!(tmin[d] < tmax[d]))
        throw DegenerateGrid("domain min must be below max");
    if (static_cast<long>(values.size()) != total() * n)
      throw DegenerateGrid("value array size mismatch");
  }

  // Second-order first-derivative stencil along axis d at position k:
  // pairs of (position, coefficient), already divided by the spacing.
  // Central in the interior, one-sided three-point at the faces.
  std::vector<std::pair<int, double>> d1_stencil(int d, int k) const {
    const double h = spacing(d);
    const int s = shape[d];
    if (k == 0)
      return {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
    if (k == s - 1)
      return {{s - 1, 1.5 / h}, {s - 2, -2.0 / h}, {s - 3, 0.5 / h}};
    return {{k - 1, -0.5 / h}, {k + 1, 0.5 / h}};
  }

  // x^i_d at a node by the stencil above.
  Matrix xdot_at(const std::vector<int>& mi) const {
    Matrix xd = make_matrix(n, p);
    for (int d = 0; d < p; ++d) {
      auto st = d1_stencil(d, mi[d]);
      auto nb = mi;
      for (auto [pos, c] : st) {
        nb[d] = pos;
        long f = flatten(nb);
        for (int i = 0; i < n; ++i) xd[i][d] += c * value(f, i);
      }
      nb[d] = mi[d];
    }
    return xd;
  }

  JetPoint jet_at(const std::vector<int>& mi) const {
    JetPoint pt;
    pt.t = node_t(mi);
    pt.x.resize(n);
    long f = flatten(mi);
    for (int i = 0; i < n; ++i) pt.x[i] = value(f, i);
    pt.xdot = xdot_at(mi);
    return pt;
  }

  // Trapezoid quadrature weight of a node (product over axes).
  double weight(const std::vector<int>& mi) const {
    double w = 1.0;
    for (int d = 0; d < p; ++d) {
      double f = (mi[d] == 0 || mi[d] == shape[d] - 1) ? 0.5 : 1.0;
      w *= f * spacing(d);
    }
    return w;
  }
};

}  // namespace jetlab
