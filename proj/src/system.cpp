#include "jetlab/system.hpp"

#include <utility>

namespace jetlab {

SystemSpec::SystemSpec(MetricField h, MetricField phi,
                       std::vector<std::vector<Expr>> X)
    : p_(h.dim()), n_(phi.dim()), h_(std::move(h)), phi_(std::move(phi)),
      X_(std::move(X)) {
  if (static_cast<int>(X_.size()) != n_)
    throw ConfigError("X must have n rows");
  for (auto& row : X_)
    if (static_cast<int>(row.size()) != p_)
      throw ConfigError("X rows must have p columns");

  dXdt_.assign(n_, std::vector<std::vector<Expr>>(p_, std::vector<Expr>(p_)));
  dXdx_.assign(n_, std::vector<std::vector<Expr>>(p_, std::vector<Expr>(n_)));
  d2Xxt_.assign(n_, std::vector<std::vector<std::vector<Expr>>>(
                        p_, std::vector<std::vector<Expr>>(
                                n_, std::vector<Expr>(p_))));
  d2Xxx_.assign(n_, std::vector<std::vector<std::vector<Expr>>>(
                        p_, std::vector<std::vector<Expr>>(
                                n_, std::vector<Expr>(n_))));
  for (int i = 0; i < n_; ++i)
    for (int a = 0; a < p_; ++a) {
      for (int b = 0; b < p_; ++b) dXdt_[i][a][b] = X_[i][a].diff(b);
      for (int j = 0; j < n_; ++j) {
        dXdx_[i][a][j] = X_[i][a].diff(p_ + j);
        for (int b = 0; b < p_; ++b)
          d2Xxt_[i][a][j][b] = dXdx_[i][a][j].diff(b);
        for (int k = 0; k < n_; ++k)
          d2Xxx_[i][a][j][k] = dXdx_[i][a][j].diff(p_ + k);
      }
    }
}

std::vector<double> SystemSpec::tx(const JetPoint& pt) const {
  return tx(pt.t, pt.x);
}

std::vector<double> SystemSpec::tx(const std::vector<double>& t,
                                   const std::vector<double>& x) const {
  std::vector<double> v;
  v.reserve(p_ + n_);
  v.insert(v.end(), t.begin(), t.end());
  v.insert(v.end(), x.begin(), x.end());
  return v;
}

Matrix SystemSpec::X_at(const JetPoint& pt) const {
  std::vector<double> v = tx(pt);
  Matrix out = make_matrix(n_, p_);
  for (int i = 0; i < n_; ++i)
    for (int a = 0; a < p_; ++a) out[i][a] = X_[i][a].eval(v);
  return out;
}

}  // namespace jetlab
