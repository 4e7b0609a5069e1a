#pragma once

#include <array>
#include <complex>
#include <utility>

#include "rbm3q/model.hpp"

namespace rbm3q {

// U and V are the transformed kernels of the system in the (p, q) variables;
// Sym is the symmetric-case kernel (equals U when the model is symmetric).
enum class KernelId { U, V, Sym };

// Which algebraic branches: P-branches live over the q-plane, Q-branches
// over the p-plane.
enum class BranchVar { PoverQ, QoverP };

enum class CutSide { Above, Below };

struct QuadraticCoeffs {
  Complex a, b, c;  // a*z^2 + b*z + c
};

struct BranchFamily {
  KernelId kernel = KernelId::U;
  BranchVar variable = BranchVar::PoverQ;
  double bp_low = 0.0;   // bp_low <= 0
  double bp_high = 0.0;  // bp_high >= 0; cut = (-inf, bp_low] u [bp_high, inf)
};

// Conic A x^2 + B y^2 + C x + D = 0 with B != 0 and no y or xy term.
// Real east-west hyperbola for all kernels here.
struct Hyperbola {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;

  double eval(Complex z) const {
    const double x = z.real(), y = z.imag();
    return A * x * x + B * y * y + C * x + D;
  }
  double center_x() const { return -C / (2.0 * A); }
  // semi-axes of A(x-xc)^2 + B y^2 = K0
  double k0() const { return A * center_x() * center_x() - D; }
  double semi_a() const;
  double semi_b() const;
  double focal_c() const;
  double vertex_right() const { return center_x() + semi_a(); }
  double vertex_left() const { return center_x() - semi_a(); }
  // asymptote half-angle in (0, pi/2)
  double asymptote_angle() const;
};

// Position of a point relative to the two hyperbola branches.
enum class ConicRegion { InsideRight, InsideLeft, Middle, OnCurve };

// K(x,y) = (sigma1 x^2 + 2 rho x y + sigma2 y^2)/2 + mu1 x + mu2 y
Complex kernel_K(const ModelParams& p, Complex x, Complex y);

// U(p,q) = theta p^2 + sigma2/2 q^2 + (sigma2-rho) p q + (mu2-mu1) p + mu2 q,
// V with indices swapped. Sym requires a symmetric model.
Complex kernel_UV(const ModelParams& par, KernelId id, Complex p, Complex q);

struct CoeffsABCD {
  Complex A, B, C, D;
};
CoeffsABCD coeffs_ABCD(const ModelParams& par, Complex p, Complex q);

// The kernel as a quadratic in p (q fixed) or in q (p fixed).
QuadraticCoeffs kernel_quadratic(const ModelParams& par, KernelId id,
                                 BranchVar var, Complex fixed);

// Numerically stable roots of a*z^2 + b*z + c, unordered.
std::pair<Complex, Complex> solve_quadratic(const QuadraticCoeffs& q);

// Branch points of the two-sheeted covering. For PoverQ the result is the
// same for U and V. Throws ComplexRoots if the discriminant is negative.
BranchFamily branch_points(const ModelParams& par, KernelId id, BranchVar var);

bool on_cut(const BranchFamily& f, Complex arg, double tol = 1e-14);

// Branch i (1 or 2) at arg off the cut. Branch 1 is the one with the
// smaller real part; ties broken by smaller imaginary part.
// Throws OnCut when arg is within tol of the cut.
Complex branch_eval(const ModelParams& par, KernelId id, BranchVar var, int i,
                    Complex arg);

// One-sided limit on the cut; the two sides are complex conjugates.
Complex branch_eval_cut(const ModelParams& par, KernelId id, BranchVar var,
                        int i, double arg, CutSide side);

// Hyperbola carrying the cut images of the branches: for PoverQ the image
// lives in the p-plane (printed equations), for QoverP in the q-plane
// (derived from the conjugate sum/product of the roots on the cut).
Hyperbola hyperbola(const ModelParams& par, KernelId id, BranchVar var);

// Classifies z against the two branches. Throws RegionAmbiguous when z is
// within tol of the curve.
ConicRegion classify_region(const Hyperbola& h, Complex z, double tol = 1e-10);

struct AutomorphyReport {
  ConicRegion region = ConicRegion::Middle;  // of p wrt H_p (q-cut image)
  // p1q1 = P1(Q1(p)), etc.
  Complex p1q1, p2q1, p1q2, p2q2;
  bool p1q1_identity = false;
  bool p2q1_identity = false;
  bool p1q2_identity = false;
  bool p2q2_identity = false;
  bool matches_table = false;
};

// Evaluates the four compositions P_i(Q_j(p)) for the symmetric kernel and
// checks them against the region table. Throws RegionAmbiguous near the
// hyperbola and SymmetryRequired on asymmetric parameters.
AutomorphyReport check_automorphy(const ModelParams& par, Complex p,
                                  double identity_tol = 1e-8);

}  // namespace rbm3q
