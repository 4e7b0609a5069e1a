#pragma once

#include <array>
#include <complex>
#include <string>

namespace rbm3q {

using Complex = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Drift, covariance and reflection slopes of the three-quarter-plane model.
// Reflection vectors are R1 = (r1, 1) on {z2 = 0, z1 <= 0} and
// R2 = (1, r2) on {z1 = 0, z2 <= 0}.
struct ModelParams {
  double mu1 = -1.0;
  double mu2 = -1.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double rho = 0.0;
  double r1 = 2.0;
  double r2 = 2.0;

  double theta() const { return 0.5 * (sigma1 + sigma2 - 2.0 * rho); }
  double elliptic_gap() const { return sigma1 * sigma2 - rho * rho; }

  // Swaps the roles of the two coordinates.
  ModelParams swapped() const {
    return ModelParams{mu2, mu1, sigma2, sigma1, rho, r2, r1};
  }
};

struct RecurrenceReport {
  bool drift1_negative = false;
  bool drift2_negative = false;
  bool reflection1 = false;  // mu1 - r1*mu2 > 0
  bool reflection2 = false;  // mu2 - r2*mu1 > 0
  bool recurrent = false;
};

struct WedgeAngles {
  double beta = 0.0;        // opening angle, in (pi, 2pi)
  double beta_tilde = 0.0;  // half angle, beta = 2*beta_tilde
  double delta = 0.0;       // reflection angle, in (0, pi)
  double epsilon = 0.0;     // second reflection angle (= pi/2 here)
};

// Throws NonElliptic when sigma1*sigma2 - rho^2 <= 0.
void require_elliptic(const ModelParams& p);

// Recurrence conditions: mu < 0 componentwise and mu1 - r1*mu2 > 0,
// mu2 - r2*mu1 > 0. Throws NonElliptic; never throws on non-recurrence.
RecurrenceReport validate(const ModelParams& p);

bool is_symmetric(const ModelParams& p);

// Angle description of the symmetric model mapped to a beta-cone with
// identity covariance. Throws NotSymmetric.
WedgeAngles wedge_angles(const ModelParams& p);

// JSON parameter file: {"mu":[m1,m2],"sigma":[s1,s2],"rho":r,"refl":[r1,r2]}
ModelParams load_params(const std::string& path);
void save_params(const ModelParams& p, const std::string& path);
std::string params_json(const ModelParams& p);

// FNV-1a over the canonical (key-sorted) JSON text; stable under key order.
std::uint64_t params_hash(const ModelParams& p);

}  // namespace rbm3q
