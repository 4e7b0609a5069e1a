#include "rbm3q/bvp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "rbm3q/errors.hpp"

namespace rbm3q {

namespace {

constexpr double kCoefTol = 1e-12;

double q_cut_end(const ModelParams& p) {
  return branch_points(p, KernelId::U, BranchVar::PoverQ).bp_low;
}

void require_on_q_cut(const ModelParams& p, double q) {
  if (!(q <= q_cut_end(p) - 1e-12)) {
    std::ostringstream os;
    os << "q = " << q << " is not strictly inside the cut (-inf, "
       << q_cut_end(p) << "]";
    throw NotOnCut(os.str());
  }
}

}  // namespace

CutPoints cut_points_below(const ModelParams& p, double q) {
  require_on_q_cut(p, q);
  CutPoints c;
  c.pu = branch_eval_cut(p, KernelId::U, BranchVar::PoverQ, 1, q,
                         CutSide::Below);
  c.pv = branch_eval_cut(p, KernelId::V, BranchVar::PoverQ, 1, q,
                         CutSide::Below);
  return c;
}

Complex delta_q(const ModelParams& p, double q) {
  const CutPoints c = cut_points_below(p, q);
  const Complex form1 = -(coeffs_ABCD(p, c.pu, q).A + coeffs_ABCD(p, c.pv, q).B);
  const Complex form2 = -p.theta() * (q + c.pu + c.pv);
  if (std::abs(form1 - form2) >
      1e-10 * std::max(1.0, std::abs(form1))) {
    throw Error("Delta(q) two-form disagreement; kernel algebra broken");
  }
  if (std::abs(form1) < kCoefTol) {
    std::ostringstream os;
    os << "Delta(q) vanishes at q = " << q;
    throw DeltaZero(os.str());
  }
  return form1;
}

GMatrix g_matrix(const ModelParams& p, double q) {
  const CutPoints c = cut_points_below(p, q);
  GMatrix m;
  m.q = q;
  m.alpha = coeffs_ABCD(p, c.pu, q).A;
  m.beta = coeffs_ABCD(p, c.pv, q).B;
  m.gamma = coeffs_ABCD(p, c.pu, q).C;
  m.delta_coef = coeffs_ABCD(p, c.pv, q).D;
  m.Delta = -(m.alpha + m.beta);
  if (std::abs(m.Delta) < kCoefTol) {
    std::ostringstream os;
    os << "Delta(q) vanishes at q = " << q;
    throw DeltaZero(os.str());
  }
  if (std::abs(m.gamma) < kCoefTol || std::abs(m.delta_coef) < kCoefTol) {
    std::ostringstream os;
    os << "C or D vanishes on the cut at q = " << q
       << " (C = " << m.gamma << ", D = " << m.delta_coef << ")";
    throw CoefficientZero(os.str());
  }
  const Complex al = m.alpha, be = m.beta, ga = m.gamma, de = m.delta_coef;
  const Complex alc = std::conj(al), bec = std::conj(be),
                gac = std::conj(ga), dec = std::conj(de);
  const Complex Dc = std::conj(m.Delta);
  m.g[0][0] = -gac * (al + bec) / (ga * Dc);
  m.g[0][1] = dec * (alc - al) / (ga * Dc);
  m.g[1][0] = gac * (bec - be) / (de * Dc);
  m.g[1][1] = -dec * (be + alc) / (de * Dc);
  return m;
}

BoundaryCheck check_boundary_condition(const ModelParams& p,
                                       const EllBoundaryEstimates& est,
                                       double q) {
  const GMatrix G = g_matrix(p, q);
  const CutPoints c = cut_points_below(p, q);
  BoundaryCheck out;
  out.q = q;
  out.region_u = ell_region_info(p, EllAxis::One, -c.pu);
  out.region_v = ell_region_info(p, EllAxis::Two, -c.pv);
  out.admissible = out.region_u.convergent && out.region_v.convergent;

  const Complex lp1 = est.ell1_plus.value, lp2 = est.ell2_plus.value;
  const Complex lm1 = est.ell1_minus.value, lm2 = est.ell2_minus.value;
  const Complex r1 = lp1 - (G.g[0][0] * lm1 + G.g[0][1] * lm2);
  const Complex r2 = lp2 - (G.g[1][0] * lm1 + G.g[1][1] * lm2);
  const auto se2 = [](const LaplaceEstimate& e) {
    return e.se_re * e.se_re + e.se_im * e.se_im;
  };
  const double v1 = se2(est.ell1_plus) + std::norm(G.g[0][0]) * se2(est.ell1_minus) +
                    std::norm(G.g[0][1]) * se2(est.ell2_minus);
  const double v2 = se2(est.ell2_plus) + std::norm(G.g[1][0]) * se2(est.ell1_minus) +
                    std::norm(G.g[1][1]) * se2(est.ell2_minus);
  out.comp1 = make_report("bvp-boundary-1", Complex(q), Complex(),
                          r1, std::sqrt(v1));
  out.comp2 = make_report("bvp-boundary-2", Complex(q), Complex(),
                          r2, std::sqrt(v2));
  return out;
}

std::vector<EllBoundaryEstimates> measure_boundary(
    const ModelParams& p, const SimConfig& cfg, KernelId, KernelId,
    const std::vector<double>& qs, int threads) {
  std::vector<req::Any> reqs;
  for (double q : qs) {
    const CutPoints c = cut_points_below(p, q);
    reqs.push_back(req::Ell{EllAxis::One, -c.pu});
    reqs.push_back(req::Ell{EllAxis::One, -std::conj(c.pu)});
    reqs.push_back(req::Ell{EllAxis::Two, -c.pv});
    reqs.push_back(req::Ell{EllAxis::Two, -std::conj(c.pv)});
  }
  const EstimateRun run = run_estimates(p, cfg, reqs, threads);
  std::vector<EllBoundaryEstimates> out(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    out[i].ell1_plus = run.results[4 * i + 0];
    out[i].ell1_minus = run.results[4 * i + 1];
    out[i].ell2_plus = run.results[4 * i + 2];
    out[i].ell2_minus = run.results[4 * i + 3];
  }
  return out;
}

MnFromBoundary mn_from_boundary(const ModelParams& p,
                                const EllBoundaryEstimates& est, double q,
                                Complex E, double E_se) {
  const GMatrix G = g_matrix(p, q);
  MnFromBoundary out;
  const Complex l1 = est.ell1_plus.value, l2 = est.ell2_plus.value;
  out.m = (G.gamma * l1 + G.delta_coef * l2) / G.Delta;
  out.n = (G.beta * G.gamma * l1 - G.alpha * G.delta_coef * l2) /
              (p.theta() * G.Delta) -
          E / p.theta();
  const auto sen = [](const LaplaceEstimate& e) {
    return std::hypot(e.se_re, e.se_im);
  };
  out.m_se = (std::abs(G.gamma) * sen(est.ell1_plus) +
              std::abs(G.delta_coef) * sen(est.ell2_plus)) /
             std::abs(G.Delta);
  out.n_se = (std::abs(G.beta * G.gamma) * sen(est.ell1_plus) +
              std::abs(G.alpha * G.delta_coef) * sen(est.ell2_plus)) /
                 (p.theta() * std::abs(G.Delta)) +
             E_se / p.theta();
  return out;
}

// ---------------- conformal map ----------------

ConformalMap::ConformalMap(const Hyperbola& h) : h_(h) {
  xc_ = h.center_x();
  cf_ = h.focal_c();
  lambda_ = M_PI / (M_PI - h.asymptote_angle());
  focus_ = xc_ - cf_;  // the focus inside the left component
}

Complex ConformalMap::map(Complex p, int side) const {
  const Complex eta = -(p - xc_);
  const Complex zeta = std::acosh(eta / cf_);
  Complex w1 = std::cosh(lambda_ * zeta);
  if (side != 0 &&
      std::abs(w1.imag()) < 1e-9 * std::max(1.0, std::abs(w1.real()))) {
    w1 = Complex(w1.real(), side * 1e-300);
  }
  const Complex w2 = std::sqrt(w1 + 1.0);
  const double kappa = std::sqrt(2.0);
  return (w2 - kappa) / (w2 + kappa);
}

Complex ConformalMap::inverse(Complex z) const {
  const double kappa = std::sqrt(2.0);
  const Complex w2 = kappa * (1.0 + z) / (1.0 - z);
  const Complex w1 = w2 * w2 - 1.0;
  const Complex zeta = std::acosh(w1) / lambda_;
  const Complex eta = cf_ * std::cosh(zeta);
  return xc_ - eta;
}

Complex conformal_to_disk(const ModelParams& p, KernelId id, Complex point) {
  const Hyperbola h = hyperbola(p, id, BranchVar::PoverQ);
  const ConformalMap cm(h);
  int side = 0;
  try {
    if (classify_region(h, point) == ConicRegion::InsideRight) {
      std::ostringstream os;
      os << "point " << point << " lies in the right-branch interior";
      throw OutsideDomain(os.str());
    }
  } catch (const RegionAmbiguous&) {
    side = point.imag() >= 0.0 ? -1 : +1;  // boundary evaluation
  }
  return cm.map(point, side);
}

// ---------------- Fredholm discretization ----------------

namespace {

struct BoundaryParam {
  const ModelParams* p;
  ConformalMap cm;
  double q1;

  explicit BoundaryParam(const ModelParams& par)
      : p(&par),
        cm(hyperbola(par, KernelId::U, BranchVar::PoverQ)),
        q1(branch_points(par, KernelId::U, BranchVar::PoverQ).bp_low) {}

  Complex pu_below(double q) const {
    return branch_eval_cut(*p, KernelId::U, BranchVar::PoverQ, 1, q,
                           CutSide::Below);
  }
  // angle in (pi, 2pi) of the from-below boundary image
  double theta_of_q(double q) const {
    const Complex pb = pu_below(q);
    const int side = pb.imag() >= 0.0 ? -1 : +1;
    double th = std::arg(cm.map(pb, side));
    if (th < 0) th += 2.0 * M_PI;
    return th;
  }
  double q_of_theta(double th) const {
    double lo = q1 - 1e10, hi = q1 - 1e-10;
    for (int it = 0; it < 120; ++it) {
      const double mid = q1 - std::sqrt((q1 - lo) * (q1 - hi));
      if (theta_of_q(mid) > th)
        lo = mid;
      else
        hi = mid;
    }
    return q1 - std::sqrt((q1 - lo) * (q1 - hi));
  }
};

void grade(double s, double& th, double& dth) {
  th = 2.0 * M_PI * s - std::sin(2.0 * M_PI * s);
  dth = 2.0 * M_PI * (1.0 - std::cos(2.0 * M_PI * s));
}

using Mat2 = std::array<std::array<Complex, 2>, 2>;

Mat2 conj2(const Mat2& m) {
  Mat2 o;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) o[i][j] = std::conj(m[i][j]);
  return o;
}

Mat2 inv2(const Mat2& m) {
  const Complex det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  Mat2 o;
  o[0][0] = m[1][1] / det;
  o[0][1] = -m[0][1] / det;
  o[1][0] = -m[1][0] / det;
  o[1][1] = m[0][0] / det;
  return o;
}

Mat2 mul2(const Mat2& a, const Mat2& b) {
  Mat2 o{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return o;
}

}  // namespace

FredholmResult fredholm_solve(const ModelParams& par,
                              std::array<Complex, 2> phi_inf, int n_nodes,
                              double pole_tol) {
  if (n_nodes < 16) throw Error("fredholm_solve requires at least 16 nodes");
  const BoundaryParam bp(par);
  const int N = n_nodes;
  FredholmResult R;
  R.n = N;
  R.phi_inf = phi_inf;
  R.s.resize(N);
  R.theta.resize(N);
  R.z.resize(N);
  R.q_of_node.resize(N);
  R.probe_point.resize(N);

  std::vector<Mat2> H(N);
  std::vector<double> tp(N);
  for (int j = 0; j < N; ++j) {
    R.s[j] = (j + 0.5) / N;
    grade(R.s[j], R.theta[j], tp[j]);
    R.z[j] = std::polar(1.0, R.theta[j]);
    const bool lower = R.theta[j] > M_PI;
    const double th_low = lower ? R.theta[j] : 2.0 * M_PI - R.theta[j];
    const double q = bp.q_of_theta(th_low);
    R.q_of_node[j] = q;
    const GMatrix G = g_matrix(par, q);
    H[j] = lower ? G.g : conj2(G.g);
    const Complex pu = bp.pu_below(q);
    R.probe_point[j] = lower ? std::conj(pu) : pu;
  }

  const double ds = 1.0 / N;
  std::vector<Mat2> Hds(N);
  for (int j = 0; j < N; ++j) {
    const int jm = std::max(j - 1, 0), jp = std::min(j + 1, N - 1);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        Hds[j][a][b] = (H[jp][a][b] - H[jm][a][b]) / ((jp - jm) * ds);
  }

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
  Eigen::VectorXcd rhs(2 * N);
  for (int i = 0; i < N; ++i) {
    const Mat2 Hi_inv = inv2(H[i]);
    A(2 * i, 2 * i) += 1.0;
    A(2 * i + 1, 2 * i + 1) += 1.0;
    for (int j = 0; j < N; ++j) {
      Mat2 K;
      if (j == i) {
        const Complex dzds = Complex(0, 1) * R.z[i] * tp[i];
        K = mul2(Hi_inv, Hds[i]);
        for (auto& row : K)
          for (auto& e : row) e /= dzds;
      } else {
        K = mul2(Hi_inv, H[j]);
        K[0][0] -= 1.0;
        K[1][1] -= 1.0;
        const Complex dz = R.z[j] - R.z[i];
        for (auto& row : K)
          for (auto& e : row) e /= dz;
      }
      const Complex w = ds * R.z[j] * tp[j] / (2.0 * M_PI);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) A(2 * i + a, 2 * j + b) -= w * K[a][b];
    }
    rhs(2 * i) = phi_inf[0];
    rhs(2 * i + 1) = phi_inf[1];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
  if (qr.rank() < 2 * N) throw SingularSystem("Nystrom system is rank deficient");
  {
    const auto& Rm = qr.matrixR();
    const double r0 = std::abs(Rm(0, 0));
    const double rn = std::abs(Rm(2 * N - 1, 2 * N - 1));
    if (rn == 0.0 || r0 / rn > 1e12)
      throw SingularSystem("Nystrom system condition estimate exceeds 1e12");
  }
  const Eigen::VectorXcd sol = qr.solve(rhs);
  R.phi_minus.resize(N);
  double scale = 0.0;
  for (int j = 0; j < N; ++j) {
    R.phi_minus[j] = {sol(2 * j), sol(2 * j + 1)};
    scale = std::max({scale, std::abs(sol(2 * j)), std::abs(sol(2 * j + 1))});
  }

  // equation residual at off-node points (midpoints in the graded parameter)
  double resid = 0.0;
  for (int i = 1; i + 1 < N; i += 2) {
    const double s0 = 0.5 * (R.s[i] + R.s[i + 1]);
    double th0, tp0;
    grade(s0, th0, tp0);
    const Complex z0 = std::polar(1.0, th0);
    const bool lower = th0 > M_PI;
    const double q0 = bp.q_of_theta(lower ? th0 : 2.0 * M_PI - th0);
    const GMatrix G0 = g_matrix(par, q0);
    const Mat2 H0 = lower ? G0.g : conj2(G0.g);
    const Mat2 H0inv = inv2(H0);
    // linear interpolation of the solution in s
    std::array<Complex, 2> phi0{
        0.5 * (R.phi_minus[i][0] + R.phi_minus[i + 1][0]),
        0.5 * (R.phi_minus[i][1] + R.phi_minus[i + 1][1])};
    std::array<Complex, 2> integral{Complex(0), Complex(0)};
    for (int j = 0; j < N; ++j) {
      Mat2 K = mul2(H0inv, H[j]);
      K[0][0] -= 1.0;
      K[1][1] -= 1.0;
      const Complex dz = R.z[j] - z0;
      const Complex w = ds * R.z[j] * tp[j] / (2.0 * M_PI * dz);
      for (int a = 0; a < 2; ++a)
        integral[a] += w * (K[a][0] * R.phi_minus[j][0] +
                            K[a][1] * R.phi_minus[j][1]);
    }
    for (int a = 0; a < 2; ++a)
      resid = std::max(resid,
                       std::abs(phi0[a] - integral[a] - phi_inf[a]));
  }
  R.residual_norm = scale > 0 ? resid / scale : resid;

  // pole test: Phi+ = H Phi- must be analytic inside the disk, so its
  // Cauchy integral at exterior points vanishes
  double pole = 0.0;
  for (int k = 0; k < 8; ++k) {
    const Complex w0 = std::polar(1.5, 2.0 * M_PI * (k + 0.37) / 8.0);
    std::array<Complex, 2> proj{Complex(0), Complex(0)};
    for (int j = 0; j < N; ++j) {
      const std::array<Complex, 2> phip{
          H[j][0][0] * R.phi_minus[j][0] + H[j][0][1] * R.phi_minus[j][1],
          H[j][1][0] * R.phi_minus[j][0] + H[j][1][1] * R.phi_minus[j][1]};
      const Complex w = ds * R.z[j] * tp[j] / (2.0 * M_PI * (R.z[j] - w0));
      proj[0] += w * phip[0];
      proj[1] += w * phip[1];
    }
    pole = std::max({pole, std::abs(proj[0]), std::abs(proj[1])});
  }
  R.pole_metric = scale > 0 ? pole / scale : pole;
  if (R.pole_metric > pole_tol) {
    std::ostringstream os;
    os << "disk-interior analyticity test failed (Cauchy mismatch "
       << R.pole_metric << " > " << pole_tol << ")";
    throw PoleSuspected(os.str());
  }
  return R;
}

}  // namespace rbm3q
