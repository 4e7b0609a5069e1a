#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rbm3q/estimate.hpp"
#include "rbm3q/model.hpp"

namespace rbm3q {

struct ResidualReport {
  std::string equation;
  Complex point_x{0.0, 0.0};
  Complex point_y{0.0, 0.0};
  Complex residual{0.0, 0.0};
  double se = 0.0;       // combined standard error
  double z = 0.0;        // |residual| / se
  bool pass = false;     // z <= 3
};

ResidualReport make_report(const std::string& eq, Complex x, Complex y,
                           Complex residual, double se);

// Estimates needed to assemble the functional-equation residuals at one
// point (x, y). Missing entries raise MissingEstimate on use.
struct FeqEstimates {
  std::optional<LaplaceEstimate> L1, L2;
  std::optional<LaplaceEstimate> m, n;       // at s = x + y
  std::optional<LaplaceEstimate> ell1;       // at x
  std::optional<LaplaceEstimate> ell2;       // at y
  std::optional<Complex> E;
  double E_se = 0.0;
};

// -K L1 = k m + theta n + k1 ell1 + E, assembled as
// residual = K L1 + k m + theta n + k1 ell1 + E.
ResidualReport check_feq_S1(const ModelParams& p, const FeqEstimates& est,
                            Complex x, Complex y);
// S2 twin: K L2 - k m - theta n + k2 ell2 - E with k2 = x + r2 y.
ResidualReport check_feq_S2(const ModelParams& p, const FeqEstimates& est,
                            Complex x, Complex y);
// Sum of the two; the m, n and E terms cancel in assembly.
ResidualReport check_feq_sum(const ModelParams& p, const FeqEstimates& est,
                             Complex x, Complex y);

// One measurement pass collecting everything the three checks need at each
// point. with_mn controls whether the m/n/E estimators run.
std::vector<FeqEstimates> measure_feq(const ModelParams& p,
                                      const SimConfig& cfg,
                                      const std::vector<std::pair<Complex, Complex>>& pts,
                                      bool with_mn, int threads = 0);

// ---- basic adjoint relationship ----

enum class BarFn { One, Coord1, Coord2, ExpXY };

struct BarOptions {
  BarFn fn = BarFn::ExpXY;
  Complex x{0.0, 0.0}, y{0.0, 0.0};  // exponent for ExpXY
  double window = 0.0;               // cutoff = 1 on [-W,W]^2, 0 outside 2W; 0: auto
};

// residual = <Gf(Z)>_t + <R1.grad f dL1>_t + <R2.grad f dL2>_t
// Throws CutoffTooTight when the window captures < 90% of empirical mass.
ResidualReport check_bar(const ModelParams& p, const SimConfig& cfg,
                         const BarOptions& opt, int threads = 0);

// Analytic variant: the same BAR assembled by quadrature against a density
// pi(z) on S, boundary densities nu1(z1), nu2(z2), and a lower bound
// radial_decay(phi) > 0 on the exponential decay rate of pi along the ray
// at polar angle phi. Exponential test function exp(x z1 + y z2); (x, y)
// must keep every integral finite.
double bar_residual_analytic(
    const ModelParams& p, const std::function<double(double, double)>& pi,
    const std::function<double(double)>& nu1,
    const std::function<double(double)>& nu2,
    const std::function<double(double)>& radial_decay, Complex x, Complex y);

}  // namespace rbm3q
