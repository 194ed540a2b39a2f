#pragma once

#include <span>
#include <string>
#include <vector>

#include "jetlab/errors.hpp"
#include "jetlab/expr.hpp"

namespace jetlab {

using Matrix = std::vector<std::vector<double>>;
using Tensor3 = std::vector<Matrix>;
using Tensor4 = std::vector<Tensor3>;

Matrix make_matrix(int r, int c);
Tensor3 make_tensor3(int a, int b, int c);
Tensor4 make_tensor4(int a, int b, int c, int d);

// Dense inverse by Gauss-Jordan with partial pivoting. Throws SingularMetric
// when a pivot magnitude falls below 1e-14.
Matrix invert(const Matrix& m);

// Symmetric matrix of expressions over a named coordinate list, with exact
// first and second derivative trees prepared at construction. Instances are
// immutable; all evaluations are pure.
class MetricField {
public:
  MetricField(std::vector<std::string> coords,
              std::vector<std::vector<Expr>> entries);

  int dim() const { return dim_; }
  const std::vector<std::string>& coords() const { return coords_; }
  const Expr& entry(int i, int j) const { return entries_[i][j]; }
  const Expr& d1(int i, int j, int k) const { return d1_[i][j][k]; }
  const Expr& d2(int i, int j, int k, int l) const { return d2_[i][j][k][l]; }

  // True when every entry folds to a constant.
  bool is_constant() const;

  Matrix value_at(std::span<const double> point) const;
  Matrix inverse_at(std::span<const double> point) const;
  Matrix d1_at(int k, std::span<const double> point) const;  // d g / d coord k

  // Christoffel symbols Gamma^k_{ij}; symmetric in (i,j) by construction.
  Tensor3 christoffel(std::span<const double> point) const;

  // d_m Gamma^k_{ij}, from exact metric derivatives (never nested FD).
  Tensor4 christoffel_derivatives(std::span<const double> point) const;

  double det(std::span<const double> point) const;
  double sqrt_det(std::span<const double> point) const;

  // Leading principal minors all positive.
  bool positive_definite_at(std::span<const double> point) const;

private:
  int dim_;
  std::vector<std::string> coords_;
  std::vector<std::vector<Expr>> entries_;
  std::vector<std::vector<std::vector<Expr>>> d1_;
  std::vector<std::vector<std::vector<std::vector<Expr>>>> d2_;
};

// Riemann, Ricci, and scalar curvature of one metric at one point.
// Sign convention: R^l_{ijk} = d_j Gamma^l_{ik} - d_k Gamma^l_{ij}
//                  + Gamma^l_{jm} Gamma^m_{ik} - Gamma^l_{km} Gamma^m_{ij},
// which makes the unit sphere's scalar curvature positive.
struct CurvatureBundle {
  Tensor4 riemann;  // [l][i][j][k]
  Matrix ricci;     // ricci_{ij} = R^m_{imj}
  double scalar;
};

CurvatureBundle curvature(const MetricField& g, std::span<const double> point);

}  // namespace jetlab
