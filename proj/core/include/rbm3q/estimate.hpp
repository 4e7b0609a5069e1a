#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rbm3q/model.hpp"
#include "rbm3q/simulate.hpp"

namespace rbm3q {

enum class Region { S1, S2, S };
enum class EllAxis { One, Two };

// Strict admits only points whose integrand stays bounded on the region.
// Extended additionally admits Laplace arguments up to the variance-safe
// abscissa derived from the kernel branch points (used by the BVP checks,
// which report membership rather than assume it).
enum class RegionPolicy { Strict, Extended };

enum class PathKind { Raw, Hat, Tilde };

struct LaplaceEstimate {
  Complex value{0.0, 0.0};
  double se_re = 0.0;
  double se_im = 0.0;
  double n_effective = 0.0;

  double se_norm() const { return std::hypot(se_re, se_im); }
};

// Measurement requests, all evaluated in a single streaming pass.
namespace req {

struct Laplace {
  Region region = Region::S;
  Complex x, y;
};
// Laplace transform of pi_tilde/2 on the quadrant path.
struct LaplaceTilde {
  Complex p, q;
};
// strip estimator of int e^{s z} pi((z,z) + c*n) dz at perpendicular
// offset c (c = 0 gives a strip estimate of m(s))
struct DiagStrip {
  Complex s;
  double offset = 0.0;
};
// local-time estimator of m(s): diagonal-crossing (Tanaka) increments of
// z2 - z1 weighted by e^{s (z1+z2)/2} and divided by the quadratic
// variation rate 2 theta; free of strip-width bias at the corner
struct DiagLT {
  Complex s;
};
// finite-difference transform of the normal derivative on the diagonal
struct NDeriv {
  Complex s;
};
struct Ell {
  EllAxis axis = EllAxis::One;
  Complex x;
};
// local-time transform of the folded diagonal measure: <e^{q ztilde2} dLhat2>/T
struct EllDiag {
  Complex q;
};
struct CornerNu {
  EllAxis axis = EllAxis::One;
  double bandwidth = 0.0;  // 0: use 4*sqrt(h)
};
struct OccBox {
  PathKind path = PathKind::Raw;
  Vec2 lo, hi;
};
// empirical covariance rate of the reconstructed driving noise
struct CovRate {
  PathKind path = PathKind::Raw;
  int i = 0, j = 0;  // 0 or 1
};
// semimartingale residual of coordinate i: increments minus drift and
// reflection terms accumulate to a mean-zero noise
struct ReflResidual {
  PathKind path = PathKind::Raw;
  int i = 0;
};

using Any = std::variant<Laplace, LaplaceTilde, DiagStrip, DiagLT, NDeriv,
                         Ell, EllDiag, CornerNu, OccBox, CovRate,
                         ReflResidual>;

}  // namespace req

struct EstimateRun {
  std::vector<LaplaceEstimate> results;
  double total_time = 0.0;      // post-burn-in path time across replicas
  double total_local1 = 0.0;
  double total_local2 = 0.0;
};

// Runs cfg.replicas independent paths (at most `threads` concurrently) and
// evaluates every request in one pass per path. Standard errors use batch
// means with ~50 batches pooled across replicas. Interior time-average
// statistics are updated every update_stride steps; local-time statistics
// see every step.
EstimateRun run_estimates(const ModelParams& p, const SimConfig& cfg,
                          const std::vector<req::Any>& requests,
                          int threads = 0, std::size_t update_stride = 4);

// Admissibility predicates; throw DomainViolation with a message when the
// requested point lies outside the region the estimator can handle.
void require_laplace_domain(Region region, Complex x, Complex y);
void require_strip_domain(Complex s);
void require_ell_domain(const ModelParams& p, EllAxis axis, Complex x,
                        RegionPolicy policy);

// true when the x-convention argument is inside the variance-safe abscissa
// (|Re x| below half the decay suggested by the kernel branch point)
struct EllRegionInfo {
  bool safe = false;        // bounded integrand (Re x >= 0)
  bool variance_ok = false; // Re x > -p2/2
  bool convergent = false;  // Re x > -p2
  double p2 = 0.0;
};
EllRegionInfo ell_region_info(const ModelParams& p, EllAxis axis, Complex x);

// Convenience wrappers matching the per-operation surfaces. Each runs its
// own measurement pass with the given config.
LaplaceEstimate estimate_L(const ModelParams& p, const SimConfig& cfg,
                           Region region, Complex x, Complex y);
LaplaceEstimate estimate_m(const ModelParams& p, const SimConfig& cfg,
                           Complex s);
LaplaceEstimate estimate_n(const ModelParams& p, const SimConfig& cfg,
                           Complex s);
LaplaceEstimate estimate_ell(const ModelParams& p, const SimConfig& cfg,
                             EllAxis axis, Complex x,
                             RegionPolicy policy = RegionPolicy::Strict);

struct CornerDensities {
  LaplaceEstimate nu1_0, nu2_0;
  Complex E{0.0, 0.0};
  double E_se = 0.0;
};
// Throws InsufficientBoundaryVisits when the local time near the corner is
// too small for a usable bandwidth estimate.
CornerDensities estimate_corner_densities(const ModelParams& p,
                                          const SimConfig& cfg);

struct DensityGrid {
  int nx = 0, ny = 0;
  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  std::vector<double> cell;     // occupation fraction per cell, row-major
  std::vector<double> cell_se;
  std::vector<double> diag_z;   // abscissae for pi(z,z)
  std::vector<double> diag_pi;
  std::vector<double> nu1_z, nu1_val;  // boundary densities on the rays
  std::vector<double> nu2_z, nu2_val;
  double nu1_0 = 0.0, nu2_0 = 0.0, E = 0.0;
  double mass = 0.0, mass_se = 0.0;

  double cell_area() const {
    return (x_hi - x_lo) / nx * (y_hi - y_lo) / ny;
  }
};
DensityGrid estimate_density(const ModelParams& p, const SimConfig& cfg,
                             int nx = 200, int ny = 200, int threads = 0);

// Two-sample Kolmogorov-Smirnov statistic and its alpha=0.01 threshold.
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_threshold(std::size_t n, std::size_t m, double alpha = 0.01);

// Decimated marginal samples for distribution tests.
std::vector<double> collect_marginal(const ModelParams& p,
                                     const SimConfig& cfg, int replica,
                                     int coord, double spacing);

}  // namespace rbm3q
