#include "jetlab/metric.hpp"

#include <cmath>
#include <utility>

namespace jetlab {

Matrix make_matrix(int r, int c) {
  return Matrix(r, std::vector<double>(c, 0.0));
}

Tensor3 make_tensor3(int a, int b, int c) {
  return Tensor3(a, make_matrix(b, c));
}

Tensor4 make_tensor4(int a, int b, int c, int d) {
  return Tensor4(a, make_tensor3(b, c, d));
}

Matrix invert(const Matrix& m) {
  const int n = static_cast<int>(m.size());
  Matrix a = m;
  Matrix inv = make_matrix(n, n);
  for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-14)
      throw SingularMetric("pivot magnitude below 1e-14");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    double d = a[col][col];
    for (int c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

MetricField::MetricField(std::vector<std::string> coords,
                         std::vector<std::vector<Expr>> entries)
    : dim_(static_cast<int>(coords.size())),
      coords_(std::move(coords)),
      entries_(std::move(entries)) {
  d1_.assign(dim_, std::vector<std::vector<Expr>>(
                       dim_, std::vector<Expr>(dim_)));
  d2_.assign(dim_, std::vector<std::vector<std::vector<Expr>>>(
                       dim_, std::vector<std::vector<Expr>>(
                                 dim_, std::vector<Expr>(dim_))));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < dim_; ++k) {
        d1_[i][j][k] = entries_[i][j].diff(k);
        for (int l = 0; l < dim_; ++l) d2_[i][j][k][l] = d1_[i][j][k].diff(l);
      }
    }
}

bool MetricField::is_constant() const {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        double c;
        if (!d1_[i][j][k].is_constant(&c) || c != 0.0) return false;
      }
  return true;
}

Matrix MetricField::value_at(std::span<const double> point) const {
  Matrix g = make_matrix(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) g[i][j] = entries_[i][j].eval(point);
  return g;
}

Matrix MetricField::inverse_at(std::span<const double> point) const {
  return invert(value_at(point));
}

Matrix MetricField::d1_at(int k, std::span<const double> point) const {
  Matrix g = make_matrix(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) g[i][j] = d1_[i][j][k].eval(point);
  return g;
}

Tensor3 MetricField::christoffel(std::span<const double> point) const {
  Matrix ginv = inverse_at(point);
  Tensor3 dg(dim_);  // dg[k] = d g / d coord k
  for (int k = 0; k < dim_; ++k) dg[k] = d1_at(k, point);
  Tensor3 gamma = make_tensor3(dim_, dim_, dim_);
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j) {
        double s = 0.0;
        for (int l = 0; l < dim_; ++l)
          s += ginv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
        gamma[k][i][j] = 0.5 * s;
        gamma[k][j][i] = gamma[k][i][j];
      }
  return gamma;
}

Tensor4 MetricField::christoffel_derivatives(
    std::span<const double> point) const {
  Matrix ginv = inverse_at(point);
  Tensor3 dg(dim_);
  for (int k = 0; k < dim_; ++k) dg[k] = d1_at(k, point);
  // d_m g^{kl} = -g^{ka} (d_m g_{ab}) g^{bl}
  Tensor3 dginv = make_tensor3(dim_, dim_, dim_);  // [m][k][l]
  for (int m = 0; m < dim_; ++m)
    for (int k = 0; k < dim_; ++k)
      for (int l = 0; l < dim_; ++l) {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a)
          for (int b = 0; b < dim_; ++b)
            s += ginv[k][a] * dg[m][a][b] * ginv[b][l];
        dginv[m][k][l] = -s;
      }
  Tensor4 out = make_tensor4(dim_, dim_, dim_, dim_);  // [k][i][j][m]
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int m = 0; m < dim_; ++m) {
          double s = 0.0;
          for (int l = 0; l < dim_; ++l) {
            double sym = dg[i][l][j] + dg[j][l][i] - dg[l][i][j];
            double dsym = d2_[l][j][i][m].eval(point) +
                          d2_[l][i][j][m].eval(point) -
                          d2_[i][j][l][m].eval(point);
            s += dginv[m][k][l] * sym + ginv[k][l] * dsym;
          }
          out[k][i][j][m] = 0.5 * s;
        }
  return out;
}

double MetricField::det(std::span<const double> point) const {
  Matrix a = value_at(point);
  double d = 1.0;
  for (int col = 0; col < dim_; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim_; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      d = -d;
    }
    if (a[col][col] == 0.0) return 0.0;
    d *= a[col][col];
    for (int r = col + 1; r < dim_; ++r) {
      double f = a[r][col] / a[col][col];
      for (int c = col; c < dim_; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return d;
}

double MetricField::sqrt_det(std::span<const double> point) const {
  double d = det(point);
  if (d <= 0.0) throw SingularMetric("non-positive metric determinant");
  return std::sqrt(d);
}

bool MetricField::positive_definite_at(std::span<const double> point) const {
  Matrix g = value_at(point);
  for (int k = 1; k <= dim_; ++k) {
    // leading principal minor of order k by elimination
    Matrix a(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a[i][j] = g[i][j];
    double d = 1.0;
    for (int col = 0; col < k; ++col) {
      int piv = col;
      for (int r = col + 1; r < k; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      if (piv != col) {
        std::swap(a[piv], a[col]);
        d = -d;
      }
      if (a[col][col] == 0.0) return false;
      d *= a[col][col];
      for (int r = col + 1; r < k; ++r) {
        double f = a[r][col] / a[col][col];
        for (int c = col; c < k; ++c) a[r][c] -= f * a[col][c];
      }
    }
    if (d <= 0.0) return false;
  }
  return true;
}

CurvatureBundle curvature(const MetricField& g, std::span<const double> point) {
  const int d = g.dim();
  Tensor3 gamma = g.christoffel(point);
  Tensor4 dgamma = g.christoffel_derivatives(point);  // [l][i][k][m]=d_m G^l_ik
  CurvatureBundle out;
  out.riemann = make_tensor4(d, d, d, d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double v = dgamma[l][i][k][j] - dgamma[l][i][j][k];
          for (int m = 0; m < d; ++m)
            v += gamma[l][j][m] * gamma[m][i][k] -
                 gamma[l][k][m] * gamma[m][i][j];
          out.riemann[l][i][j][k] = v;
        }
  out.ricci = make_matrix(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double v = 0.0;
      for (int m = 0; m < d; ++m) v += out.riemann[m][i][m][j];
      out.ricci[i][j] = v;
    }
  Matrix ginv = g.inverse_at(point);
  out.scalar = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.scalar += ginv[i][j] * out.ricci[i][j];
  return out;
}

}  // namespace jetlab
