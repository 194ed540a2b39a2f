#pragma once

#include <string>
#include <vector>

#include "jetlab/jetgeom.hpp"

namespace jetlab {

// Electromagnetic 2-form components F^(a)_(i)j; antisymmetric in (i,j) by
// construction and independent of the fibre coordinates.
struct EMField {
  Tensor3 F;  // [a][i][j]
};

// Residuals of the generalized Maxwell equations. eq1 is evaluated as the
// difference of independently computed sides (a nonzero value is a finding,
// not an error); eq1_variant uses the torsion-shaped inverse-metric index
// from the companion formula. eq3 vanishes identically because F carries no
// fibre dependence.
struct MaxwellResiduals {
  Tensor4 eq1;          // [a][i][j][b]
  Tensor4 eq1_variant;  // [a][i][j][b]
  Tensor4 eq2;          // [a][i][j][k]
  Tensor4 eq3;          // [a][i][j][k], identically zero
};

// Block metric h + phi + h^{-1} x phi in the adapted coframe, together with
// the frame so callers can express it in coordinates as
// coframe^T * blocks * coframe.
struct SasakianMetric {
  Matrix blocks;  // (p+n+np)^2, block diagonal
  AdaptedFrame frame;
};

struct BoxGrid {
  std::vector<double> min, max;
  std::vector<int> shape;  // each >= 5
};

struct EinsteinReport {
  double K;
  Matrix Ttt;   // p x p
  Matrix Txx;   // n x n
  Tensor4 Tvv;  // [a][b][i][j]
  std::vector<std::string> zero_blocks;
  double conservation_t;  // max-norm of the h-divergence over the t grid
  double conservation_x;  // max-norm of the phi-divergence over the x grid
};

EMField em_field(const SystemSpec& sys, const JetPoint& pt);

MaxwellResiduals maxwell_residuals(const SystemSpec& sys, const JetPoint& pt);

SasakianMetric sasakian_metric(const SystemSpec& sys, const JetPoint& pt);

// Stress-energy blocks defined from the Einstein left-hand sides divided by
// the coupling K; scalar curvatures of the opposite factor are frozen at the
// centre of its grid. Conservation residuals are central-difference covariant
// divergences over the given grids.
EinsteinReport einstein_report(const SystemSpec& sys, double K,
                               const BoxGrid& tgrid, const BoxGrid& xgrid);

}  // namespace jetlab
