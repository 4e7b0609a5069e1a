#pragma once

#include <optional>
#include <vector>

#include "rbm3q/estimate.hpp"
#include "rbm3q/feq.hpp"
#include "rbm3q/kernel.hpp"
#include "rbm3q/model.hpp"

namespace rbm3q {

struct ClassificationReport {
  WedgeAngles angles;
  bool skew_symmetric = false;   // r = rho/sigma
  bool dieker_moriarty = false;  // delta - pi/2 in -N * beta_tilde
  bool d_algebraic = false;      // pi/2 + delta in beta_tilde Z + pi Z
};

// Throws NotSymmetric. For recurrent parameters the first two flags are
// necessarily false and this is asserted.
ClassificationReport classify(const ModelParams& p);

// K(p) = C(p, Q1(p)) / A(p, Q1(p)) of the scalar boundary condition.
// Throws PoleNearby when |A(p, Q1(p))| < 1e-10.
Complex scalar_K(const ModelParams& p, Complex point);

// Point on the right branch H_p+ at parameter t (t=0 is the vertex;
// negative t gives the conjugate lower half).
Complex hp_plus_point(const ModelParams& p, double t);

// residual = ell(p) K(p) - ell(conj p) K(conj p); ell values are estimates
// of the boundary transform in the transformed variable.
ResidualReport scalar_bvp_condition(const ModelParams& p,
                                    const LaplaceEstimate& ell_at_p,
                                    const LaplaceEstimate& ell_at_pbar,
                                    Complex point);

// residual of ell(p) F(p,Q1(p)) - ell(P2Q1(p)) F(P2Q1(p), Q1(p)).
ResidualReport continuation_identity(const ModelParams& p,
                                     const LaplaceEstimate& ell_at_p,
                                     const LaplaceEstimate& ell_at_p2,
                                     Complex point);

// ell estimates (transformed variable) at a list of p-plane points,
// measured in one pass. The estimator argument is -p in the original
// variable.
std::vector<LaplaceEstimate> measure_ell_pq(const ModelParams& p,
                                            const SimConfig& cfg,
                                            const std::vector<Complex>& pts,
                                            int threads = 0);

// ---- closed-form density family ----

struct RemarkableDensity {
  double mu_norm = 0.0;  // drift norm in the identity-covariance picture
  double beta = 0.0;     // wedge opening
  double C = 0.0;        // normalization constant
  double t_lo = 0.0, t_hi = 0.0;  // angular domain around the density axis
  double axis_angle = 0.0;        // direction of -T mu in the T picture
  double T11 = 1, T12 = 0, T21 = 0, T22 = 1;  // linear map to the beta-cone
  double abs_det_T = 1.0;
};

// Builds the candidate density for symmetric-covariance parameters
// (sigma1 = sigma2); the reflection slopes do not enter. Throws
// NotSymmetric when sigma1 != sigma2 and OutsideWedge when the drift
// direction is incompatible with a normalizable density.
RemarkableDensity remarkable_config(const ModelParams& p);

// pi(r, t) = (C / sqrt r) cos(t/2) exp(-2 r |mu| cos^2(t/2)).
// Throws OutsideWedge for t outside the angular domain.
double remarkable_density(const RemarkableDensity& cfg, double r, double t);

// Density in the original coordinates (0 outside S).
double remarkable_density_xy(const RemarkableDensity& cfg, double zx,
                             double zy);

// Exponential decay rate of the density along the ray at polar angle phi
// (original coordinates).
double remarkable_decay(const RemarkableDensity& cfg, double phi);

struct RemarkableReport {
  double bar_residual = 0.0;  // max over the test exponents
  bool in_family = false;
  double tv_distance = -1.0;  // filled by the MC comparison when run
};

// Analytic BAR residual of the candidate density for these parameters.
double remarkable_bar_residual(const ModelParams& p);

// Throws NotInFamily when the BAR residual exceeds 1e-4. When mc_cfg is
// given, also simulates and fills the total-variation distance between the
// histogram and the analytic density on the density window.
RemarkableReport verify_remarkable(const ModelParams& p,
                                   const std::optional<SimConfig>& mc_cfg = {},
                                   int threads = 0);

// 1-D search over the common reflection slope minimizing the BAR residual.
double search_remarkable_r(double sigma, double rho, double mu, double r_lo = 1.05,
                           double r_hi = 6.0);

// residual of U(p,q) Ltilde1(p,q) + C(p,q) ell1(p) + A(p,q) m(q).
ResidualReport symmetric_feq_residual(const ModelParams& p,
                                      const LaplaceEstimate& Ltilde,
                                      const LaplaceEstimate& ell1_pq,
                                      const LaplaceEstimate& m_est, Complex pp,
                                      Complex q);

}  // namespace rbm3q
