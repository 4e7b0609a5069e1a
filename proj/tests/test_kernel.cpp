#include <doctest.h>

#include <cmath>
#include <random>

#include "rbm3q/errors.hpp"
#include "rbm3q/kernel.hpp"

using namespace rbm3q;
using doctest::Approx;

namespace {
const ModelParams kSym{-1, -1, 1, 1, 0.0, 2, 2};
const ModelParams kAsym{-1, -2, 1, 2, 0.3, 2, 3};

Complex rand_c(std::mt19937_64& g, double scale = 5.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(g), u(g)};
}
}  // namespace

TEST_CASE("kernel K point values and swap symmetry") {
  CHECK(std::abs(kernel_K(kAsym, 0, 0)) == 0.0);
  // sigma=(1,1), rho=0, mu=(-1,-1): K(1,1) = 1 - 2 = -1
  CHECK(kernel_K(kSym, 1, 1).real() == Approx(-1.0));
  std::mt19937_64 g(7);
  for (int i = 0; i < 50; ++i) {
    const Complex x = rand_c(g), y = rand_c(g);
    CHECK(std::abs(kernel_K(kAsym, x, y) - kernel_K(kAsym.swapped(), y, x)) <
          1e-12);
  }
}

TEST_CASE("U and V come from K by the variable changes") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 100; ++i) {
    const Complex p = rand_c(g), q = rand_c(g);
    CHECK(std::abs(kernel_UV(kAsym, KernelId::U, p, q) -
                   kernel_K(kAsym, -p, p + q)) < 1e-10);
    CHECK(std::abs(kernel_UV(kAsym, KernelId::V, p, q) -
                   kernel_K(kAsym, p + q, -p)) < 1e-10);
  }
  // hand value: sigma=(1,1), rho=0, mu=(-1,-1): U(1,1) = 1 + 1/2 + 1 - 1
  CHECK(kernel_UV(kSym, KernelId::U, 1, 1).real() == Approx(1.5));
  // symmetric model: U = V
  std::mt19937_64 g2(12);
  for (int i = 0; i < 20; ++i) {
    const Complex p = rand_c(g2), q = rand_c(g2);
    CHECK(std::abs(kernel_UV(kSym, KernelId::U, p, q) -
                   kernel_UV(kSym, KernelId::V, p, q)) == 0.0);
  }
  CHECK_THROWS_AS(kernel_UV(kAsym, KernelId::Sym, 1, 1), SymmetryRequired);
}

TEST_CASE("coefficients A, B, C, D") {
  std::mt19937_64 g(13);
  for (int i = 0; i < 50; ++i) {
    const Complex p = rand_c(g), q = rand_c(g);
    const CoeffsABCD c = coeffs_ABCD(kAsym, p, q);
    // asymmetry terms cancel in the sum
    CHECK(std::abs(c.A + c.B - kAsym.theta() * (2.0 * p + q)) < 1e-12);
    const CoeffsABCD cs = coeffs_ABCD(kSym, p, q);
    // symmetric reduction: A = B = (sigma - rho)(p + q/2)
    const Complex expect = (kSym.sigma1 - kSym.rho) * (p + 0.5 * q);
    CHECK(std::abs(cs.A - expect) < 1e-12);
    CHECK(std::abs(cs.B - expect) < 1e-12);
  }
  const CoeffsABCD c0 = coeffs_ABCD(kAsym, 0, Complex(3, 1));
  CHECK(c0.C == Complex(3, 1));
  CHECK(c0.D == Complex(3, 1));
}

TEST_CASE("branch points: frozen values and invariance across kernels") {
  // quadratic-formula oracle values for the default asymmetric parameters
  const BranchFamily fu = branch_points(kAsym, KernelId::U, BranchVar::PoverQ);
  CHECK(fu.bp_low == Approx(-0.15398562811278962).epsilon(1e-14));
  CHECK(fu.bp_high == Approx(3.4000589265421084).epsilon(1e-14));
  const BranchFamily fv = branch_points(kAsym, KernelId::V, BranchVar::PoverQ);
  CHECK(fu.bp_low == Approx(fv.bp_low).epsilon(1e-14));
  CHECK(fu.bp_high == Approx(fv.bp_high).epsilon(1e-14));

  const BranchFamily qu = branch_points(kAsym, KernelId::U, BranchVar::QoverP);
  CHECK(qu.bp_low == Approx(-2.3551762706627923).epsilon(1e-13));
  CHECK(qu.bp_high == Approx(0.8892076842753579).epsilon(1e-13));
  const BranchFamily qv = branch_points(kAsym, KernelId::V, BranchVar::QoverP);
  CHECK(qv.bp_low == Approx(-2.0371153036757406).epsilon(1e-13));
  CHECK(qv.bp_high == Approx(0.25701059163385576).epsilon(1e-13));
}

TEST_CASE("branch points: symmetric closed forms") {
  // q-plane: q1 = 0 < q2 = -4 mu / (sigma + rho)
  for (double rho : {0.0, 0.35, -0.4}) {
    ModelParams p{-1.3, -1.3, 1.0, 1.0, rho, 2, 2};
    const BranchFamily f = branch_points(p, KernelId::Sym, BranchVar::PoverQ);
    CHECK(std::abs(f.bp_low) < 1e-12);
    CHECK(f.bp_high == Approx(-4 * p.mu1 / (p.sigma1 + rho)).epsilon(1e-12));
    const BranchFamily fq = branch_points(p, KernelId::Sym, BranchVar::QoverP);
    const double sg = p.sigma1, mu = p.mu1;
    const double root = std::sqrt(2 * sg * (sg - rho));
    CHECK(fq.bp_low ==
          Approx(mu * (sg - rho + root) / (sg * sg - rho * rho)).epsilon(1e-12));
    CHECK(fq.bp_high ==
          Approx(mu * (sg - rho - root) / (sg * sg - rho * rho)).epsilon(1e-12));
  }
  // sigma=1, rho=0, mu=-1: p1 = -1-sqrt(2), p2 = -1+sqrt(2)
  const BranchFamily f = branch_points(kSym, KernelId::Sym, BranchVar::QoverP);
  CHECK(f.bp_low == Approx(-1 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(f.bp_high == Approx(-1 + std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("root property at sampled points") {
  std::mt19937_64 g(17);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Complex q = rand_c(g);
    for (KernelId id : {KernelId::U, KernelId::V}) {
      const BranchFamily f = branch_points(kAsym, id, BranchVar::PoverQ);
      if (on_cut(f, q, 1e-9)) continue;
      for (int b : {1, 2}) {
        const Complex pb = branch_eval(kAsym, id, BranchVar::PoverQ, b, q);
        const double scale =
            std::max(1.0, std::abs(kernel_UV(kAsym, id, pb, 0.0)) +
                              std::abs(q) * std::abs(q));
        worst = std::max(worst,
                         std::abs(kernel_UV(kAsym, id, pb, q)) / scale);
      }
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("branch separation and imaginary-axis signs") {
  std::mt19937_64 g(19);
  for (int i = 0; i < 2000; ++i) {
    const Complex q = rand_c(g);
    for (auto var : {BranchVar::PoverQ, BranchVar::QoverP}) {
      const BranchFamily f = branch_points(kAsym, KernelId::U, var);
      if (on_cut(f, q, 1e-9)) continue;
      const Complex b1 = branch_eval(kAsym, KernelId::U, var, 1, q);
      const Complex b2 = branch_eval(kAsym, KernelId::U, var, 2, q);
      CHECK(b1.real() <= b2.real() + 1e-14);
    }
  }
  for (double x = -50.0; x <= 50.0; x += 0.5) {
    if (x == 0.0) continue;
    const Complex ix(0.0, x);
    CHECK(branch_eval(kAsym, KernelId::U, BranchVar::PoverQ, 1, ix).real() <=
          1e-12);
    CHECK(branch_eval(kAsym, KernelId::U, BranchVar::PoverQ, 2, ix).real() >=
          -1e-12);
    CHECK(branch_eval(kAsym, KernelId::V, BranchVar::QoverP, 1, ix).real() <=
          1e-12);
    CHECK(branch_eval(kAsym, KernelId::V, BranchVar::QoverP, 2, ix).real() >=
          -1e-12);
  }
}

TEST_CASE("branch point values at the origin") {
  // P1u(0) = min{0, (mu1-mu2)/theta}, P2u(0) = max{...}; direct roots of
  // U(p, 0) = p (theta p + mu2 - mu1)
  const double th = kAsym.theta();
  const double other_u = (kAsym.mu1 - kAsym.mu2) / th;
  const Complex p1 = branch_eval(kAsym, KernelId::U, BranchVar::PoverQ, 1, 0);
  const Complex p2 = branch_eval(kAsym, KernelId::U, BranchVar::PoverQ, 2, 0);
  CHECK(std::abs(p1 - std::min(0.0, other_u)) < 1e-12);
  CHECK(std::abs(p2 - std::max(0.0, other_u)) < 1e-12);
  // V-side mirror
  const double other_v = (kAsym.mu2 - kAsym.mu1) / th;
  const Complex pv1 = branch_eval(kAsym, KernelId::V, BranchVar::PoverQ, 1, 0);
  CHECK(std::abs(pv1 - std::min(0.0, other_v)) < 1e-12);
  // Q1u(0) = min{0, -2 mu2 / sigma2}, Q1v(0) = min{0, -2 mu1 / sigma1}
  const Complex q1u = branch_eval(kAsym, KernelId::U, BranchVar::QoverP, 1, 0);
  const Complex q2u = branch_eval(kAsym, KernelId::U, BranchVar::QoverP, 2, 0);
  CHECK(std::abs(q1u - std::min(0.0, -2 * kAsym.mu2 / kAsym.sigma2)) < 1e-12);
  CHECK(std::abs(q2u - std::max(0.0, -2 * kAsym.mu2 / kAsym.sigma2)) < 1e-12);
  const Complex q1v = branch_eval(kAsym, KernelId::V, BranchVar::QoverP, 1, 0);
  CHECK(std::abs(q1v - std::min(0.0, -2 * kAsym.mu1 / kAsym.sigma1)) < 1e-12);
  // symmetric model with mu < 0: P1(0) = P2(0) = 0 and Q1(0) = 0
  CHECK(std::abs(branch_eval(kSym, KernelId::Sym, BranchVar::PoverQ, 1,
                             Complex(0, 1e-12))) < 1e-5);
  CHECK(std::abs(branch_eval(kSym, KernelId::Sym, BranchVar::QoverP, 1, 0)) <
        1e-12);
}

TEST_CASE("cut evaluation: conjugacy, vertex, hyperbola membership") {
  const BranchFamily f = branch_points(kAsym, KernelId::U, BranchVar::PoverQ);
  for (int i = 0; i < 100; ++i) {
    const double q = f.bp_low - 0.05 - 0.12 * i;
    const Complex above =
        branch_eval_cut(kAsym, KernelId::U, BranchVar::PoverQ, 1, q, CutSide::Above);
    const Complex below =
        branch_eval_cut(kAsym, KernelId::U, BranchVar::PoverQ, 1, q, CutSide::Below);
    CHECK(std::abs(above - std::conj(below)) < 1e-13);
    // the two branches on the same side are also conjugate
    const Complex b2 =
        branch_eval_cut(kAsym, KernelId::U, BranchVar::PoverQ, 2, q, CutSide::Below);
    CHECK(std::abs(below - std::conj(b2)) < 1e-13);
  }
  // at the branch point the value is real (hyperbola vertex)
  const Complex v = branch_eval_cut(kAsym, KernelId::U, BranchVar::PoverQ, 1,
                                    f.bp_low, CutSide::Above);
  CHECK(std::abs(v.imag()) < 1e-7);
  const Hyperbola h = hyperbola(kAsym, KernelId::U, BranchVar::PoverQ);
  CHECK(std::abs(v.real() - h.vertex_right()) < 1e-6);

  CHECK_THROWS_AS(branch_eval_cut(kAsym, KernelId::U, BranchVar::PoverQ, 1,
                                  0.5 * (f.bp_low + f.bp_high), CutSide::Above),
                  NotOnCut);
  CHECK_THROWS_AS(
      branch_eval(kAsym, KernelId::U, BranchVar::PoverQ, 1, f.bp_low - 1.0),
      OnCut);
}

TEST_CASE("cut images lie on the hyperbolas") {
  for (KernelId id : {KernelId::U, KernelId::V}) {
    for (auto var : {BranchVar::PoverQ, BranchVar::QoverP}) {
      const BranchFamily f = branch_points(kAsym, id, var);
      const Hyperbola h = hyperbola(kAsym, id, var);
      double worst = 0.0;
      for (int i = 0; i < 200; ++i) {
        const bool left = i % 2 == 0;
        const double span = 0.03 + 0.11 * i;
        const double arg = left ? f.bp_low - span : f.bp_high + span;
        for (int b : {1, 2}) {
          const Complex w =
              branch_eval_cut(kAsym, id, var, b, arg, CutSide::Above);
          const double scale = std::abs(h.A) * std::norm(w) +
                               std::abs(h.C) * std::abs(w) + std::abs(h.D) + 1;
          worst = std::max(worst, std::abs(h.eval(w)) / scale);
        }
      }
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("hyperbola closed forms in the symmetric case") {
  // H_q (q-plane image): (sigma+rho)x^2 - (sigma-rho)y^2 + 4 mu x + 2 mu^2/sigma
  for (double rho : {0.0, 0.3}) {
    ModelParams p{-1, -1, 1, 1, rho, 2, 2};
    const Hyperbola hq = hyperbola(p, KernelId::Sym, BranchVar::QoverP);
    const double s = hq.A / (p.sigma1 + rho);  // common positive factor
    CHECK(s > 0);
    CHECK(hq.B == Approx(-s * (p.sigma1 - rho)).epsilon(1e-12));
    CHECK(hq.C == Approx(s * 4 * p.mu1).epsilon(1e-12));
    CHECK(hq.D == Approx(s * 2 * p.mu1 * p.mu1 / p.sigma1).epsilon(1e-12));
  }
  // sigma=1, rho=0, mu=-1: x^2 - y^2 - 4x + 2 = 0
  const Hyperbola hq = hyperbola(kSym, KernelId::Sym, BranchVar::QoverP);
  CHECK(hq.A == Approx(1.0));
  CHECK(hq.B == Approx(-1.0));
  CHECK(hq.C == Approx(-4.0));
  CHECK(hq.D == Approx(2.0));
  // image point of the Q-branches at p = p1 = -1-sqrt(2): (2+sqrt2, 0)
  const Complex img = branch_eval_cut(kSym, KernelId::Sym, BranchVar::QoverP, 1,
                                      -1 - std::sqrt(2.0), CutSide::Above);
  CHECK(std::abs(img - Complex(2 + std::sqrt(2.0), 0.0)) < 1e-6);

  // H_p passes through the origin exactly
  const Hyperbola hp = hyperbola(kSym, KernelId::Sym, BranchVar::PoverQ);
  CHECK(hp.eval(Complex(0, 0)) == 0.0);
  // H^u = H^v for symmetric parameters
  const Hyperbola hu = hyperbola(kSym, KernelId::U, BranchVar::PoverQ);
  const Hyperbola hv = hyperbola(kSym, KernelId::V, BranchVar::PoverQ);
  CHECK(hu.A == Approx(hv.A));
  CHECK(hu.B == Approx(hv.B));
  CHECK(hu.C == Approx(hv.C));
  CHECK(hu.D == Approx(hv.D));
}

TEST_CASE("branch continuity along random segments off the cut") {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  int segments = 0;
  while (segments < 10) {
    const Complex a(u(g), u(g)), b(u(g), u(g));
    // keep a safe distance from the real axis to avoid the cut
    if (std::abs(a.imag()) < 0.3 || std::abs(b.imag()) < 0.3 ||
        a.imag() * b.imag() < 0)
      continue;
    ++segments;
    const int n = 2000;
    Complex prev = branch_eval(kAsym, KernelId::U, BranchVar::PoverQ, 1, a);
    for (int i = 1; i <= n; ++i) {
      const Complex z = a + (b - a) * (static_cast<double>(i) / n);
      const Complex cur = branch_eval(kAsym, KernelId::U, BranchVar::PoverQ, 1, z);
      CHECK(std::abs(cur - prev) < 60.0 * std::abs(b - a) / n + 1e-9);
      prev = cur;
    }
  }
}

TEST_CASE("automorphy table on sampled points") {
  std::mt19937_64 g(29);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int counted = 0, ir = 0, il = 0, mid = 0;
  while (counted < 150) {
    const Complex p(u(g), u(g));
    AutomorphyReport rep;
    try {
      rep = check_automorphy(kSym, p);
    } catch (const RegionAmbiguous&) {
      continue;
    } catch (const OnCut&) {
      continue;
    }
    ++counted;
    CHECK(rep.matches_table);
    if (rep.region == ConicRegion::InsideRight) ++ir;
    if (rep.region == ConicRegion::InsideLeft) ++il;
    if (rep.region == ConicRegion::Middle) ++mid;
  }
  // all three regions exercised
  CHECK(ir > 5);
  CHECK(il > 5);
  CHECK(mid > 5);
  CHECK_THROWS_AS(check_automorphy(kAsym, Complex(1, 1)), SymmetryRequired);
}

TEST_CASE("stable quadratic solver") {
  // large b: naive formula would cancel
  const QuadraticCoeffs qc{1.0, 1e8, 1.0};
  auto [r1, r2] = solve_quadratic(qc);
  const Complex small = std::abs(r1) < std::abs(r2) ? r1 : r2;
  CHECK(std::abs(small - Complex(-1e-8)) < 1e-20);
  // non-elliptic covariance flips the discriminant sign
  CHECK_THROWS_AS(
      branch_points(ModelParams{-1, -1, 1, 1, 1.5, 2, 2}, KernelId::U,
                    BranchVar::QoverP),
      ComplexRoots);
}
