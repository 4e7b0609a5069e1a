#include "rbm3q/symmetric.hpp"

#include <cmath>
#include <sstream>

#include "rbm3q/errors.hpp"
#include "rbm3q/quadrature.hpp"

namespace rbm3q {

namespace {

bool near_lattice(double x, double a, double b, double tol, int range) {
  // x in aZ + bZ within tol
  for (int k = -range; k <= range; ++k)
    for (int l = -range; l <= range; ++l)
      if (std::abs(x - k * a - l * b) < tol) return true;
  return false;
}

}  // namespace

ClassificationReport classify(const ModelParams& p) {
  if (!is_symmetric(p)) throw NotSymmetric("classification needs a symmetric model");
  ClassificationReport rep;
  rep.angles = wedge_angles(p);
  const double sigma = p.sigma1, r = p.r1;
  rep.skew_symmetric = std::abs(r - p.rho / sigma) < 1e-12;
  // delta - pi/2 = -n beta_tilde for some n in N
  rep.dieker_moriarty = false;
  const double gap = rep.angles.delta - 0.5 * M_PI;
  for (int n = 0; n <= 64; ++n) {
    if (std::abs(gap + n * rep.angles.beta_tilde) < 1e-9) {
      rep.dieker_moriarty = true;
      break;
    }
  }
  rep.d_algebraic = near_lattice(0.5 * M_PI + rep.angles.delta,
                                 rep.angles.beta_tilde, M_PI, 1e-9, 24);
  if (validate(p).recurrent && (rep.skew_symmetric || rep.dieker_moriarty)) {
    throw Error("recurrent symmetric parameters classified as skew-symmetric "
                "or Dieker-Moriarty; classification is inconsistent");
  }
  return rep;
}

Complex scalar_K(const ModelParams& p, Complex point) {
  if (!is_symmetric(p)) throw NotSymmetric("scalar kernel needs symmetry");
  const Complex q1 = branch_eval(p, KernelId::Sym, BranchVar::QoverP, 1, point);
  const CoeffsABCD c = coeffs_ABCD(p, point, q1);
  if (std::abs(c.A) < 1e-10) {
    std::ostringstream os;
    os << "A(p, Q1(p)) vanishes near p = " << point;
    throw PoleNearby(os.str());
  }
  return c.C / c.A;
}

Complex hp_plus_point(const ModelParams& p, double t) {
  const Hyperbola h = hyperbola(p, KernelId::Sym, BranchVar::PoverQ);
  const double x = h.center_x() + h.semi_a() * std::cosh(t);
  const double y = h.semi_b() * std::sinh(t);
  return Complex(x, y);
}

ResidualReport scalar_bvp_condition(const ModelParams& p,
                                    const LaplaceEstimate& ell_at_p,
                                    const LaplaceEstimate& ell_at_pbar,
                                    Complex point) {
  const Hyperbola h = hyperbola(p, KernelId::Sym, BranchVar::PoverQ);
  const double scale = std::abs(h.A) * std::norm(point) + std::abs(h.D) + 1.0;
  if (std::abs(h.eval(point)) > 1e-6 * scale) {
    std::ostringstream os;
    os << "point " << point << " is not on the boundary hyperbola";
    throw DomainViolation(os.str());
  }
  const Complex Kp = scalar_K(p, point);
  const Complex Kpb = scalar_K(p, std::conj(point));
  const Complex res = ell_at_p.value * Kp - ell_at_pbar.value * Kpb;
  const double se = std::abs(Kp) * std::hypot(ell_at_p.se_re, ell_at_p.se_im) +
                    std::abs(Kpb) * std::hypot(ell_at_pbar.se_re, ell_at_pbar.se_im);
  return make_report("scalar-bvp", point, Complex(), res, se);
}

ResidualReport continuation_identity(const ModelParams& p,
                                     const LaplaceEstimate& ell_at_p,
                                     const LaplaceEstimate& ell_at_p2,
                                     Complex point) {
  const Complex q1 = branch_eval(p, KernelId::Sym, BranchVar::QoverP, 1, point);
  const Complex p2 = branch_eval(p, KernelId::Sym, BranchVar::PoverQ, 2, q1);
  const CoeffsABCD c1 = coeffs_ABCD(p, point, q1);
  const CoeffsABCD c2 = coeffs_ABCD(p, p2, q1);
  if (std::abs(c1.A) < 1e-10 || std::abs(c2.A) < 1e-10)
    throw PoleNearby("A(p, Q1(p)) vanishes along the continuation pair");
  const Complex F1 = c1.C / c1.A, F2 = c2.C / c2.A;
  const Complex res = ell_at_p.value * F1 - ell_at_p2.value * F2;
  const double se = std::abs(F1) * std::hypot(ell_at_p.se_re, ell_at_p.se_im) +
                    std::abs(F2) * std::hypot(ell_at_p2.se_re, ell_at_p2.se_im);
  return make_report("continuation", point, Complex(), res, se);
}

std::vector<LaplaceEstimate> measure_ell_pq(const ModelParams& p,
                                            const SimConfig& cfg,
                                            const std::vector<Complex>& pts,
                                            int threads) {
  std::vector<req::Any> reqs;
  reqs.reserve(pts.size());
  for (Complex q : pts) reqs.push_back(req::Ell{EllAxis::One, -q});
  return run_estimates(p, cfg, reqs, threads).results;
}

// ---------------- remarkable density ----------------

RemarkableDensity remarkable_config(const ModelParams& p) {
  require_elliptic(p);
  if (p.sigma1 != p.sigma2)
    throw NotSymmetric("the density family needs sigma1 = sigma2");
  const double sigma = p.sigma1;
  const double beta = 2.0 * M_PI - std::acos(-p.rho / sigma);
  const double sb = std::sin(beta), cb = std::cos(beta);
  RemarkableDensity cfg;
  cfg.beta = beta;
  const double s = 1.0 / std::sqrt(sigma);
  cfg.T11 = s / sb;
  cfg.T12 = s * cb / sb;
  cfg.T21 = 0.0;
  cfg.T22 = s;
  cfg.abs_det_T = std::abs(cfg.T11 * cfg.T22 - cfg.T12 * cfg.T21);
  const double mx = cfg.T11 * p.mu1 + cfg.T12 * p.mu2;
  const double my = cfg.T21 * p.mu1 + cfg.T22 * p.mu2;
  cfg.mu_norm = std::hypot(mx, my);
  double axis = std::atan2(-my, -mx);  // direction of -T mu
  if (axis < 0) axis += 2.0 * M_PI;
  cfg.axis_angle = axis;
  if (!(axis > 0.0 && axis < beta))
    throw OutsideWedge("density axis falls outside the wedge");
  cfg.t_lo = -axis;
  cfg.t_hi = beta - axis;
  if (cfg.t_lo <= -M_PI || cfg.t_hi >= M_PI)
    throw OutsideWedge("wedge too wide around the drift axis; density not "
                       "normalizable");
  // normalization by quadrature: mass = C * integral
  const double M = cfg.mu_norm;
  const auto angular = [&](double t) {
    const double dec = 2.0 * M * std::cos(0.5 * t) * std::cos(0.5 * t);
    return integrate_sqrt_exp(
        [&](double r) {
          return std::cos(0.5 * t) / std::sqrt(r) * std::exp(-dec * r) * r;
        },
        dec);
  };
  const double mass = integrate(angular, cfg.t_lo, cfg.t_hi, 24, 40);
  cfg.C = 1.0 / mass;
  return cfg;
}

double remarkable_density(const RemarkableDensity& cfg, double r, double t) {
  if (!(r > 0.0)) throw OutsideWedge("radius must be positive");
  if (t <= cfg.t_lo || t >= cfg.t_hi || std::cos(0.5 * t) <= 0.0)
    throw OutsideWedge("angle outside the wedge domain");
  const double c = std::cos(0.5 * t);
  return cfg.C / std::sqrt(r) * c * std::exp(-2.0 * r * cfg.mu_norm * c * c);
}

double remarkable_density_xy(const RemarkableDensity& cfg, double zx,
                             double zy) {
  const double wx = cfg.T11 * zx + cfg.T12 * zy;
  const double wy = cfg.T21 * zx + cfg.T22 * zy;
  const double r = std::hypot(wx, wy);
  if (r == 0.0) return 0.0;
  double phi = std::atan2(wy, wx);
  if (phi < 0) phi += 2.0 * M_PI;
  double t = phi - cfg.axis_angle;
  if (t <= cfg.t_lo || t >= cfg.t_hi) return 0.0;
  const double c = std::cos(0.5 * t);
  if (c <= 0.0) return 0.0;
  return cfg.abs_det_T * cfg.C / std::sqrt(r) * c *
         std::exp(-2.0 * r * cfg.mu_norm * c * c);
}

double remarkable_decay(const RemarkableDensity& cfg, double phi) {
  const double ux = std::cos(phi), uy = std::sin(phi);
  const double wx = cfg.T11 * ux + cfg.T12 * uy;
  const double wy = cfg.T21 * ux + cfg.T22 * uy;
  const double stretch = std::hypot(wx, wy);
  double ang = std::atan2(wy, wx);
  if (ang < 0) ang += 2.0 * M_PI;
  double t = ang - cfg.axis_angle;
  if (t <= cfg.t_lo || t >= cfg.t_hi) return 2.0 * cfg.mu_norm * stretch;
  const double c = std::cos(0.5 * t);
  return 2.0 * cfg.mu_norm * c * c * stretch;
}

double remarkable_bar_residual(const ModelParams& p) {
  const RemarkableDensity cfg = remarkable_config(p);
  const auto pi_xy = [&](double x, double y) {
    return remarkable_density_xy(cfg, x, y);
  };
  const auto nu1 = [&](double z1) {
    return 0.5 * p.sigma2 * remarkable_density_xy(cfg, z1, 0.0);
  };
  const auto nu2 = [&](double z2) {
    return 0.5 * p.sigma1 * remarkable_density_xy(cfg, 0.0, z2);
  };
  const auto decay = [&](double phi) { return remarkable_decay(cfg, phi); };
  const double s = cfg.mu_norm;  // scale test exponents with the drift
  const std::vector<std::pair<Complex, Complex>> pts = {
      {Complex(-0.10 * s, 0.0), Complex(-0.20 * s, 0.0)},
      {Complex(0.05 * s, 0.0), Complex(-0.30 * s, 0.0)},
      {Complex(-0.25 * s, 0.10 * s), Complex(-0.05 * s, -0.20 * s)},
      {Complex(0.0, 0.15 * s), Complex(-0.10 * s, 0.0)},
  };
  double worst = 0.0;
  for (const auto& [x, y] : pts)
    worst = std::max(worst, bar_residual_analytic(p, pi_xy, nu1, nu2, decay, x, y));
  return worst;
}

RemarkableReport verify_remarkable(const ModelParams& p,
                                   const std::optional<SimConfig>& mc_cfg,
                                   int threads) {
  RemarkableReport rep;
  rep.bar_residual = remarkable_bar_residual(p);
  rep.in_family = rep.bar_residual <= 1e-4;
  if (!rep.in_family) {
    std::ostringstream os;
    os << "analytic BAR residual " << rep.bar_residual
       << " exceeds 1e-4; parameters are not in the density family";
    throw NotInFamily(os.str());
  }
  if (mc_cfg) {
    const RemarkableDensity cfg = remarkable_config(p);
    const DensityGrid g = estimate_density(p, *mc_cfg, 200, 200, threads);
    // analytic cell masses by midpoint + 2x2 Gauss refinement
    const GaussRule& gr = gauss_rule(2);
    const double hx = (g.x_hi - g.x_lo) / g.nx, hy = (g.y_hi - g.y_lo) / g.ny;
    double tv = 0.0;
    for (int ix = 0; ix < g.nx; ++ix) {
      for (int iy = 0; iy < g.ny; ++iy) {
        const double cx = g.x_lo + (ix + 0.5) * hx;
        const double cy = g.y_lo + (iy + 0.5) * hy;
        double mass = 0.0;
        for (std::size_t a = 0; a < gr.x.size(); ++a)
          for (std::size_t b = 0; b < gr.x.size(); ++b)
            mass += 0.25 * gr.w[a] * gr.w[b] *
                    remarkable_density_xy(cfg, cx + 0.5 * hx * gr.x[a],
                                          cy + 0.5 * hy * gr.x[b]);
        mass *= hx * hy;
        tv += std::abs(mass - g.cell[static_cast<std::size_t>(ix) * g.ny + iy]);
      }
    }
    rep.tv_distance = 0.5 * tv;
  }
  return rep;
}

double search_remarkable_r(double sigma, double rho, double mu, double r_lo,
                           double r_hi) {
  const auto objective = [&](double r) {
    ModelParams p{mu, mu, sigma, sigma, rho, r, r};
    return remarkable_bar_residual(p);
  };
  // golden-section minimization
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = r_lo, b = r_hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 80 && (b - a) > 1e-11; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

ResidualReport symmetric_feq_residual(const ModelParams& p,
                                      const LaplaceEstimate& Ltilde,
                                      const LaplaceEstimate& ell1_pq,
                                      const LaplaceEstimate& m_est, Complex pp,
                                      Complex q) {
  if (!is_symmetric(p)) throw NotSymmetric("symmetric functional equation");
  const Complex U = kernel_UV(p, KernelId::Sym, pp, q);
  const CoeffsABCD c = coeffs_ABCD(p, pp, q);
  const Complex res = U * Ltilde.value + c.C * ell1_pq.value + c.A * m_est.value;
  const auto se2 = [](const LaplaceEstimate& e) {
    return e.se_re * e.se_re + e.se_im * e.se_im;
  };
  const double se = std::sqrt(std::norm(U) * se2(Ltilde) +
                              std::norm(c.C) * se2(ell1_pq) +
                              std::norm(c.A) * se2(m_est));
  return make_report("feq-sym", pp, q, res, se);
}

}  // namespace rbm3q
