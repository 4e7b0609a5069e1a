#pragma once

#include <array>
#include <vector>

#include "rbm3q/estimate.hpp"
#include "rbm3q/feq.hpp"
#include "rbm3q/kernel.hpp"
#include "rbm3q/model.hpp"

namespace rbm3q {

// Coefficients of the 2x2 boundary matrix at a cut point q < q1. The
// unbarred values are taken at the limit from below ("+" side).
struct GMatrix {
  double q = 0.0;
  Complex alpha, beta, gamma, delta_coef;  // A(P1u,q), B(P1v,q), C(P1u,q), D(P1v,q)
  Complex Delta;                           // -(alpha + beta)
  std::array<std::array<Complex, 2>, 2> g; // entries
  Complex det() const { return g[0][0] * g[1][1] - g[0][1] * g[1][0]; }
};

// Delta(q) with the two-form consistency check. Throws NotOnCut, DeltaZero.
Complex delta_q(const ModelParams& p, double q);

// Throws NotOnCut, DeltaZero, CoefficientZero.
GMatrix g_matrix(const ModelParams& p, double q);

// The "+"-side evaluation points on the cut: P1u(q - i0), P1v(q - i0).
struct CutPoints {
  Complex pu, pv;
};
CutPoints cut_points_below(const ModelParams& p, double q);

// ell estimates at the four boundary points, in the transformed variable
// (the estimator integrand is exp(-p * z) dL).
struct EllBoundaryEstimates {
  LaplaceEstimate ell1_plus, ell1_minus;  // at P1u(q -+ i0)
  LaplaceEstimate ell2_plus, ell2_minus;  // at P1v(q -+ i0)
};

struct BoundaryCheck {
  double q = 0.0;
  ResidualReport comp1, comp2;
  EllRegionInfo region_u, region_v;
  bool admissible = false;  // all four points inside the convergent region
};

// Residual of L+ = G(q) L- with propagated standard errors.
BoundaryCheck check_boundary_condition(const ModelParams& p,
                                       const EllBoundaryEstimates& est,
                                       double q);

// Measures the four ell values for each listed cut point in one pass.
std::vector<EllBoundaryEstimates> measure_boundary(
    const ModelParams& p, const SimConfig& cfg, KernelId id_u, KernelId id_v,
    const std::vector<double>& qs, int threads = 0);

// m and n reconstructed from boundary transforms via the cut system.
struct MnFromBoundary {
  Complex m, n;
  double m_se = 0.0, n_se = 0.0;
};
MnFromBoundary mn_from_boundary(const ModelParams& p,
                                const EllBoundaryEstimates& est, double q,
                                Complex E, double E_se);

// Conformal map of the left component of C \ H+ onto the unit disk,
// real-symmetric, with the in-domain focus sent to the origin.
class ConformalMap {
 public:
  explicit ConformalMap(const Hyperbola& h);

  // principal map; side: -1/+1 selects the boundary limit when p lies on
  // the curve (sign of Im of the approach direction), 0 for interior use
  Complex map(Complex p, int side = 0) const;
  Complex inverse(Complex z) const;
  double focus() const { return focus_; }
  const Hyperbola& conic() const { return h_; }

 private:
  Hyperbola h_;
  double xc_, cf_, lambda_, focus_;
};

// Throws OutsideDomain when p is in the open right-branch interior.
Complex conformal_to_disk(const ModelParams& p, KernelId id, Complex point);

struct FredholmResult {
  int n = 0;
  std::vector<double> s;        // graded parameter in (0,1)
  std::vector<double> theta;
  std::vector<Complex> z;       // circle nodes
  std::vector<std::array<Complex, 2>> phi_minus;
  std::array<Complex, 2> phi_inf{};
  std::vector<double> q_of_node;      // cut parameter of each node
  std::vector<Complex> probe_point;   // P1u(q + i0): ell1 should equal phi1
  double residual_norm = 0.0;         // equation residual at off-node points
  double pole_metric = 0.0;           // Cauchy-projection mismatch of Phi+
};

// Nystrom solve of the circle integral equation with the boundary matrix
// H(z) built from G(q) through the conformal parametrization. phi_inf is
// the value of Phi- at infinity. Throws SingularSystem and PoleSuspected.
FredholmResult fredholm_solve(const ModelParams& p,
                              std::array<Complex, 2> phi_inf, int n_nodes,
                              double pole_tol = 0.10);

}  // namespace rbm3q
