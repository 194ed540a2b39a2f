#pragma once

#include <string>
#include <vector>

#include "jetlab/expr.hpp"
#include "jetlab/metric.hpp"

namespace jetlab {

// A point (t^a, x^i, x^i_a) of the first-order jet space.
struct JetPoint {
  std::vector<double> t;  // p
  std::vector<double> x;  // n
  Matrix xdot;            // n x p
};

// First-order PDE system x^i_a = X^(i)_(a)(t, x) together with the metrics
// h on the base box and phi on the target. X entries are expressions over
// the concatenated variable list (t..., x...); derivative trees up to the
// two orders the geometry needs are prepared once at construction.
class SystemSpec {
public:
  SystemSpec(MetricField h, MetricField phi,
             std::vector<std::vector<Expr>> X /* [i][alpha] */);

  int p() const { return p_; }
  int n() const { return n_; }
  const MetricField& h() const { return h_; }
  const MetricField& phi() const { return phi_; }

  const Expr& X(int i, int a) const { return X_[i][a]; }
  const Expr& dXdt(int i, int a, int b) const { return dXdt_[i][a][b]; }
  const Expr& dXdx(int i, int a, int j) const { return dXdx_[i][a][j]; }
  // d/dt^b of dXdx entries and d/dx^k of dXdx entries
  const Expr& d2Xxt(int i, int a, int j, int b) const {
    return d2Xxt_[i][a][j][b];
  }
  const Expr& d2Xxx(int i, int a, int j, int k) const {
    return d2Xxx_[i][a][j][k];
  }

  // Concatenated (t, x) assignment vector for evaluating X and phi trees.
  std::vector<double> tx(const JetPoint& pt) const;
  std::vector<double> tx(const std::vector<double>& t,
                         const std::vector<double>& x) const;

  Matrix X_at(const JetPoint& pt) const;  // n x p

  const std::vector<std::string>& tnames() const { return h_.coords(); }
  const std::vector<std::string>& xnames() const { return phi_.coords(); }

private:
  int p_, n_;
  MetricField h_, phi_;
  std::vector<std::vector<Expr>> X_;
  std::vector<std::vector<std::vector<Expr>>> dXdt_, dXdx_;
  std::vector<std::vector<std::vector<std::vector<Expr>>>> d2Xxt_, d2Xxx_;
};

}  // namespace jetlab
