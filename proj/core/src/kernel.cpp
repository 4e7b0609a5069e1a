#include "rbm3q/kernel.hpp"

#include <cmath>
#include <sstream>

#include "rbm3q/errors.hpp"

namespace rbm3q {

namespace {

void require_sym_for(const ModelParams& par, KernelId id) {
  if (id == KernelId::Sym && !is_symmetric(par)) {
    throw SymmetryRequired("Sym kernel requires symmetric parameters");
  }
}

// smaller (re, im) lexicographic first
std::pair<Complex, Complex> order_branches(Complex a, Complex b) {
  if (a.real() < b.real()) return {a, b};
  if (b.real() < a.real()) return {b, a};
  if (a.imag() <= b.imag()) return {a, b};
  return {b, a};
}

}  // namespace

double Hyperbola::semi_a() const { return std::sqrt(k0() / A); }
double Hyperbola::semi_b() const { return std::sqrt(k0() / (-B)); }
double Hyperbola::focal_c() const { return std::hypot(semi_a(), semi_b()); }
double Hyperbola::asymptote_angle() const {
  return std::atan2(semi_b(), semi_a());
}

Complex kernel_K(const ModelParams& p, Complex x, Complex y) {
  return 0.5 * (p.sigma1 * x * x + 2.0 * p.rho * x * y + p.sigma2 * y * y) +
         p.mu1 * x + p.mu2 * y;
}

Complex kernel_UV(const ModelParams& par, KernelId id, Complex p, Complex q) {
  require_sym_for(par, id);
  const double th = par.theta();
  if (id == KernelId::V) {
    return th * p * p + 0.5 * par.sigma1 * q * q +
           (par.sigma1 - par.rho) * p * q + (par.mu1 - par.mu2) * p +
           par.mu1 * q;
  }
  return th * p * p + 0.5 * par.sigma2 * q * q +
         (par.sigma2 - par.rho) * p * q + (par.mu2 - par.mu1) * p +
         par.mu2 * q;
}

CoeffsABCD coeffs_ABCD(const ModelParams& par, Complex p, Complex q) {
  const double th = par.theta();
  CoeffsABCD c;
  c.A = 0.5 * th * (2.0 * p + q) + 0.5 * (par.sigma2 - par.sigma1) * q +
        (par.mu2 - par.mu1);
  c.B = 0.5 * th * (2.0 * p + q) + 0.5 * (par.sigma1 - par.sigma2) * q +
        (par.mu1 - par.mu2);
  c.C = (1.0 - par.r1) * p + q;
  c.D = (1.0 - par.r2) * p + q;
  return c;
}

QuadraticCoeffs kernel_quadratic(const ModelParams& par, KernelId id,
                                 BranchVar var, Complex fixed) {
  require_sym_for(par, id);
  const double th = par.theta();
  const bool u_like = id != KernelId::V;
  const double sig = u_like ? par.sigma2 : par.sigma1;
  const double dmu = u_like ? par.mu2 - par.mu1 : par.mu1 - par.mu2;
  const double mu = u_like ? par.mu2 : par.mu1;
  QuadraticCoeffs out;
  if (var == BranchVar::PoverQ) {
    const Complex q = fixed;
    out.a = th;
    out.b = (sig - par.rho) * q + dmu;
    out.c = 0.5 * sig * q * q + mu * q;
  } else {
    const Complex p = fixed;
    out.a = 0.5 * sig;
    out.b = (sig - par.rho) * p + mu;
    out.c = th * p * p + dmu * p;
  }
  return out;
}

std::pair<Complex, Complex> solve_quadratic(const QuadraticCoeffs& qc) {
  const Complex disc = std::sqrt(qc.b * qc.b - 4.0 * qc.a * qc.c);
  // pick the sign that avoids cancellation in b + s*disc
  const Complex s = (std::abs(qc.b + disc) >= std::abs(qc.b - disc))
                        ? (qc.b + disc)
                        : (qc.b - disc);
  if (s == Complex(0.0, 0.0)) return {Complex(0.0), Complex(0.0)};
  const Complex r1 = -0.5 * s / qc.a;
  const Complex r2 = qc.c / (qc.a * r1);
  return {r1, r2};
}

BranchFamily branch_points(const ModelParams& par, KernelId id,
                           BranchVar var) {
  require_sym_for(par, id);
  // discriminant of the kernel quadratic, as a quadratic in the free variable
  double a, b, c;
  if (var == BranchVar::PoverQ) {
    a = par.rho * par.rho - par.sigma1 * par.sigma2;
    b = 2.0 * (par.mu1 * (par.rho - par.sigma2) +
               par.mu2 * (par.rho - par.sigma1));
    c = (par.mu1 - par.mu2) * (par.mu1 - par.mu2);
  } else if (id == KernelId::V) {
    a = par.rho * par.rho - par.sigma1 * par.sigma2;
    b = 2.0 * (par.sigma1 * par.mu2 - par.rho * par.mu1);
    c = par.mu1 * par.mu1;
  } else {
    a = par.rho * par.rho - par.sigma1 * par.sigma2;
    b = 2.0 * (par.sigma2 * par.mu1 - par.rho * par.mu2);
    c = par.mu2 * par.mu2;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    std::ostringstream os;
    os << "branch-point equation has complex roots (disc = " << disc << ")";
    throw ComplexRoots(os.str());
  }
  const double sq = std::sqrt(disc);
  const double den = 2.0 * a;
  const double x1 = (-b + sq) / den;
  const double x2 = (-b - sq) / den;
  BranchFamily f;
  f.kernel = id;
  f.variable = var;
  f.bp_low = std::min(x1, x2);
  f.bp_high = std::max(x1, x2);
  return f;
}

bool on_cut(const BranchFamily& f, Complex arg, double tol) {
  if (std::abs(arg.imag()) > tol) return false;
  const double x = arg.real();
  return x <= f.bp_low + tol || x >= f.bp_high - tol;
}

Complex branch_eval(const ModelParams& par, KernelId id, BranchVar var, int i,
                    Complex arg) {
  const BranchFamily fam = branch_points(par, id, var);
  if (on_cut(fam, arg)) {
    std::ostringstream os;
    os << "argument " << arg << " lies on the cut; use branch_eval_cut";
    throw OnCut(os.str());
  }
  auto [r1, r2] = solve_quadratic(kernel_quadratic(par, id, var, arg));
  auto [b1, b2] = order_branches(r1, r2);
  return i == 1 ? b1 : b2;
}

Complex branch_eval_cut(const ModelParams& par, KernelId id, BranchVar var,
                        int i, double arg, CutSide side) {
  const BranchFamily fam = branch_points(par, id, var);
  if (!on_cut(fam, Complex(arg, 0.0))) {
    std::ostringstream os;
    os << "argument " << arg << " is not on the cut ("
       << "(-inf, " << fam.bp_low << "] u [" << fam.bp_high << ", inf))";
    throw NotOnCut(os.str());
  }
  const QuadraticCoeffs qc = kernel_quadratic(par, id, var, Complex(arg));
  // real coefficients, negative discriminant: exact conjugate pair
  const double a = qc.a.real(), b = qc.b.real(), c = qc.c.real();
  const double disc = b * b - 4.0 * a * c;
  const double x = -b / (2.0 * a);
  const double y = std::sqrt(std::max(0.0, -disc)) / (2.0 * a);
  // identify the one-sided limit of branch i by a small probe off the cut
  const double span = std::max({1.0, std::abs(fam.bp_low), std::abs(arg)});
  const double eps = 1e-7 * span;
  const Complex probe_arg(arg, side == CutSide::Above ? eps : -eps);
  auto [r1, r2] = solve_quadratic(kernel_quadratic(par, id, var, probe_arg));
  auto [b1, b2] = order_branches(r1, r2);
  const Complex probe = (i == 1) ? b1 : b2;
  const Complex lo(x, -std::abs(y)), hi(x, std::abs(y));
  return (std::abs(probe - lo) <= std::abs(probe - hi)) ? lo : hi;
}

Hyperbola hyperbola(const ModelParams& par, KernelId id, BranchVar var) {
  require_sym_for(par, id);
  const double th = par.theta();
  Hyperbola h;
  if (var == BranchVar::PoverQ) {
    // printed equations for the p-plane images
    const bool u_like = id != KernelId::V;
    const double sig = u_like ? par.sigma2 : par.sigma1;
    const double mu_a = u_like ? par.mu1 : par.mu2;  // pairs with sigma
    const double mu_b = u_like ? par.mu2 : par.mu1;
    h.A = par.rho * par.rho - par.sigma1 * par.sigma2;
    h.B = (sig - par.rho) * (sig - par.rho);
    h.C = 2.0 * (sig * mu_a - par.rho * mu_b);
    h.D = (mu_b - mu_a) * (sig * (mu_a + mu_b) - 2.0 * par.rho * mu_b) /
          (2.0 * th);
    // normalize so that A > 0 (east-west opening with B < 0)
    h.A = -h.A;
    h.B = -h.B;
    h.C = -h.C;
    h.D = -h.D;
  } else {
    // q-plane images via the conjugate sum/product of the roots on the cut:
    //   Q1 + Q2 = 2x = -2((sig-rho)p + mu)/sig,
    //   Q1 Q2   = x^2 + y^2 = 2(th p^2 + dmu p)/sig,
    // eliminate p = -(sig x + mu)/(sig - rho).
    const bool u_like = id != KernelId::V;
    const double sig = u_like ? par.sigma2 : par.sigma1;
    const double dmu = u_like ? par.mu2 - par.mu1 : par.mu1 - par.mu2;
    const double mu = u_like ? par.mu2 : par.mu1;
    const double al = -sig / (sig - par.rho);
    const double be = -mu / (sig - par.rho);
    h.A = 1.0 - 2.0 * th * al * al / sig;
    h.B = 1.0;
    h.C = -(4.0 * th * al * be + 2.0 * dmu * al) / sig;
    h.D = -(2.0 * th * be * be + 2.0 * dmu * be) / sig;
    // h.A < 0 for elliptic parameters; flip so A > 0, B < 0
    h.A = -h.A;
    h.B = -h.B;
    h.C = -h.C;
    h.D = -h.D;
  }
  return h;
}

ConicRegion classify_region(const Hyperbola& h, Complex z, double tol) {
  const double v = h.eval(z);
  // scale-aware distance proxy
  const double scale =
      std::abs(h.A) * std::norm(z) + std::abs(h.C) * std::abs(z) +
      std::abs(h.D) + 1.0;
  if (std::abs(v) < tol * scale) {
    std::ostringstream os;
    os << "point " << z << " lies within tolerance of the hyperbola";
    throw RegionAmbiguous(os.str());
  }
  if (v < 0.0) return ConicRegion::Middle;
  return z.real() > h.center_x() ? ConicRegion::InsideRight
                                 : ConicRegion::InsideLeft;
}

AutomorphyReport check_automorphy(const ModelParams& par, Complex p,
                                  double identity_tol) {
  if (!is_symmetric(par)) {
    throw SymmetryRequired("automorphy table is for the symmetric kernel");
  }
  const Hyperbola hp = hyperbola(par, KernelId::Sym, BranchVar::PoverQ);
  AutomorphyReport rep;
  rep.region = classify_region(hp, p);

  const Complex q1 = branch_eval(par, KernelId::Sym, BranchVar::QoverP, 1, p);
  const Complex q2 = branch_eval(par, KernelId::Sym, BranchVar::QoverP, 2, p);
  rep.p1q1 = branch_eval(par, KernelId::Sym, BranchVar::PoverQ, 1, q1);
  rep.p2q1 = branch_eval(par, KernelId::Sym, BranchVar::PoverQ, 2, q1);
  rep.p1q2 = branch_eval(par, KernelId::Sym, BranchVar::PoverQ, 1, q2);
  rep.p2q2 = branch_eval(par, KernelId::Sym, BranchVar::PoverQ, 2, q2);

  const double scale = std::max(1.0, std::abs(p));
  rep.p1q1_identity = std::abs(rep.p1q1 - p) < identity_tol * scale;
  rep.p2q1_identity = std::abs(rep.p2q1 - p) < identity_tol * scale;
  rep.p1q2_identity = std::abs(rep.p1q2 - p) < identity_tol * scale;
  rep.p2q2_identity = std::abs(rep.p2q2 - p) < identity_tol * scale;

  switch (rep.region) {
    case ConicRegion::InsideRight:
      rep.matches_table = !rep.p1q1_identity && rep.p2q1_identity &&
                          !rep.p1q2_identity && rep.p2q2_identity;
      break;
    case ConicRegion::InsideLeft:
      rep.matches_table = rep.p1q1_identity && !rep.p2q1_identity &&
                          rep.p1q2_identity && !rep.p2q2_identity;
      break;
    case ConicRegion::Middle:
      rep.matches_table = rep.p1q1_identity && !rep.p2q1_identity &&
                          !rep.p1q2_identity && rep.p2q2_identity;
      break;
    case ConicRegion::OnCurve:
      rep.matches_table = false;
      break;
  }
  return rep;
}

}  // namespace rbm3q
