#pragma once

#include <utility>

#include "jetlab/system.hpp"

namespace jetlab {

// First-order covariant derivatives of X under the Berwald connection:
//   Dt[i][a][b] = dX^i_a/dt^b - X^i_m H^m_ab
//   Dx[i][a][j] = dX^i_a/dx^j + X^m_a gamma^i_mj
// Both are independent of the jet fibre coordinates.
struct CovDerivatives {
  Tensor3 Dt;  // [i][a][b]
  Tensor3 Dx;  // [i][a][j]
};

// Dxt[i][a][j][b] = (Dx)_{//b},  Dxx[i][a][j][k] = (Dx)_{||k}
struct SecondCovDerivatives {
  Tensor4 Dxt;
  Tensor4 Dxx;
};

struct ConnectionPair {
  enum class Flavor { Canonical, Induced };
  Tensor3 M;  // [i][a][b]
  Tensor3 N;  // [i][a][j]
  Flavor flavor;
};

struct SprayData {
  Tensor3 H;               // [i][a][b], temporal components
  Tensor3 G;               // [i][a][b], spatial components
  std::vector<double> Gsum;  // G^i = h^{ab} G^(i)_(a)b
  std::vector<double> F;     // drift: G = (1/2) gamma xdot xdot + h_ab F^i
};

struct ElectrodynamicsData {
  Matrix U;       // [a][i]
  double Phi;
  Tensor3 Uskew;  // [a][i][j], antisymmetric in (i,j)
};

struct TorsionData {
  Tensor4 Rtt;  // [i][a][b][g]
  Tensor4 Rtj;  // [i][a][b][j]
  Tensor4 Rjk;  // [i][a][j][k]
};

// Change of basis between the coordinate frame on J^1 and the adapted frame
// of a nonlinear connection. Row/column order is (t^a, x^i, x^i_a) with jet
// entries flattened i-major: slot p + n + i*p + a. `frame` holds the adapted
// vector fields as columns; `coframe` holds the adapted one-forms as rows;
// coframe * frame = identity.
struct AdaptedFrame {
  Matrix frame;
  Matrix coframe;
};

CovDerivatives cov_derivatives(const SystemSpec& sys, const JetPoint& pt);
SecondCovDerivatives second_cov_derivatives(const SystemSpec& sys,
                                            const JetPoint& pt);

// Helicity tensor F^i_{ja} = (1/2)[Dx^i_aj - phi^{ir} Dx^s_ar phi_sj],
// indexed [i][j][a].
Tensor3 helicity(const SystemSpec& sys, const JetPoint& pt);

ElectrodynamicsData electrodynamics_data(const SystemSpec& sys,
                                         const JetPoint& pt);

SprayData spray(const SystemSpec& sys, const JetPoint& pt);

// {canonical, induced}. The induced N is the derivative of the spray scalar
// G^i with respect to the fibre coordinates, contracted with h; the closed
// form N0 -/+ helicity is evaluated separately for the consistency report.
std::pair<ConnectionPair, ConnectionPair> nonlinear_connection(
    const SystemSpec& sys, const JetPoint& pt);

/// (H^g_ab, gamma^i_jk): the nonzero adapted components of the Cartan
// connection; the two remaining blocks vanish identically.
std::pair<Tensor3, Tensor3> cartan_connection(const SystemSpec& sys,
                                              const JetPoint& pt);

TorsionData torsion(const SystemSpec& sys, const JetPoint& pt);

AdaptedFrame adapted_frame(const ConnectionPair& conn, int p, int n);

// Integrability residual, antisymmetric in (a,b); identically zero for p=1.
Tensor3 integrability_residual(const SystemSpec& sys, const JetPoint& pt);

// Closed-form drift from the statement of the world-force law; kept for the
// sign-consistency report (the proof's U/Phi bracket is normative).
std::vector<double> drift_closed_form(const SystemSpec& sys,
                                      const JetPoint& pt);

// N0 + sign * helicity, the closed-form spatial connection candidate.
Tensor3 connection_closed_form(const SystemSpec& sys, const JetPoint& pt,
                               double sign);

}  // namespace jetlab
