#include <doctest.h>

#include <cmath>

#include "rbm3q/errors.hpp"
#include "rbm3q/simulate.hpp"

using namespace rbm3q;
using doctest::Approx;

namespace {
const ModelParams kSym{-1, -1, 1, 1, 0.0, 2, 2};

SimConfig short_cfg() {
  SimConfig c;
  c.h = 1e-3;
  c.horizon = 50.0;
  c.burn_in = 5.0;
  c.replicas = 1;
  c.seed = 42;
  return c;
}
}  // namespace

TEST_CASE("free step away from the boundary") {
  const Vec2 z{3.0, 4.0};
  const StepResult r = step_rbm(kSym, z, Vec2{0.1, -0.2}, 1e-3);
  CHECK(r.dL1 == 0.0);
  CHECK(r.dL2 == 0.0);
  const double sh = std::sqrt(1e-3);
  CHECK(r.z.x == Approx(3.0 - 1e-3 + sh * 0.1));
  CHECK(r.z.y == Approx(4.0 - 1e-3 - sh * 0.2));
}

TEST_CASE("projection along R1 from the horizontal face") {
  // start on {z2 = 0, z1 < 0}; push z2 to -a => state + a*R1, dL1 = a
  const Vec2 z{-2.0, 0.0};
  ModelParams p = kSym;
  p.mu1 = 0.0;
  p.mu2 = -1.0;  // deterministic downward drift
  const double h = 1e-2;
  const StepResult r = step_rbm(p, z, Vec2{0.0, 0.0}, h);
  const double a = 1e-2;  // overshoot depth
  CHECK(r.dL1 == Approx(a));
  CHECK(r.dL2 == 0.0);
  CHECK(r.z.y == 0.0);
  CHECK(r.z.x == Approx(-2.0 + a * p.r1));
}

TEST_CASE("segment dipping through the missing quadrant is reflected") {
  // crossing from the lower flap to the left flap enters through the
  // vertical face first
  ModelParams p = kSym;
  p.mu1 = 0.0;
  p.mu2 = 0.0;
  const Vec2 z{0.01, -0.5};
  // displacement taking the point to (-0.5, 0.01)
  const double h = 1.0;
  const Vec2 xi{-0.51, 0.51};  // identity covariance: d = xi * sqrt(h)
  const StepResult r = step_rbm(p, z, xi, h);
  CHECK(r.dL2 == Approx(0.5));
  CHECK(r.dL1 == 0.0);
  CHECK(r.z.x == 0.0);
  CHECK(r.z.y == Approx(0.01 + 0.5 * p.r2));
}

TEST_CASE("all states stay in S and local times are nonnegative") {
  SimConfig cfg = short_cfg();
  const PathRecord rec = simulate_path(kSym, cfg);
  CHECK(rec.n_steps == cfg.n_steps());
  // a push lands on the face; the along-face coordinate can exceed the
  // push size by at most one step's free displacement
  const double slack =
      std::abs(kSym.mu1) * cfg.h + 7.0 * std::sqrt(kSym.sigma1 * cfg.h);
  for (const StepSample& s : rec.samples) {
    CHECK(in_domain(s.z));
    CHECK(s.dL1 >= 0.0);
    CHECK(s.dL2 >= 0.0);
    if (s.dL1 > 0.0) {
      CHECK(s.z.y == 0.0);
      CHECK(s.z.x <= s.dL1 * kSym.r1 + slack);
    }
    if (s.dL2 > 0.0) {
      CHECK(s.z.x == 0.0);
      CHECK(s.z.y <= s.dL2 * kSym.r2 + slack);
    }
  }
  CHECK(rec.L1_total > 0.0);
  CHECK(rec.L2_total > 0.0);
}

TEST_CASE("seed determinism") {
  const SimConfig cfg = short_cfg();
  const PathRecord a = simulate_path(kSym, cfg);
  const PathRecord b = simulate_path(kSym, cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.L1_total == b.L1_total);
  CHECK(a.L2_total == b.L2_total);
  for (std::size_t i = 0; i < a.samples.size(); i += 1000) {
    CHECK(a.samples[i].z.x == b.samples[i].z.x);
    CHECK(a.samples[i].z.y == b.samples[i].z.y);
  }
  // different replica differs
  const PathRecord c = simulate_path(kSym, cfg, 1);
  CHECK(c.L1_total != a.L1_total);
}

TEST_CASE("drift recovered from increments minus reflection terms") {
  SimConfig cfg = short_cfg();
  cfg.horizon = 400.0;
  cfg.burn_in = 0.0;
  const PathRecord rec = simulate_path(kSym, cfg);
  const StepSample& last = rec.samples.back();
  // Z_T - Z_0 - r1 L1 - L2 ~ mu1 T + N(0, sigma1 T)
  const double res1 =
      last.z.x - cfg.start.x - kSym.r1 * rec.L1_total - rec.L2_total;
  const double res2 =
      last.z.y - cfg.start.y - rec.L1_total - kSym.r2 * rec.L2_total;
  const double se = std::sqrt(kSym.sigma1 * cfg.horizon);
  CHECK(std::abs(res1 - kSym.mu1 * cfg.horizon) < 4 * se);
  CHECK(std::abs(res2 - kSym.mu2 * cfg.horizon) < 4 * se);
}

TEST_CASE("refuses non-recurrent parameters without override") {
  ModelParams p = kSym;
  p.mu1 = 0.5;
  SimConfig cfg = short_cfg();
  CHECK_THROWS_AS(simulate_path(p, cfg), DomainViolation);
  cfg.override_recurrence = true;
  CHECK_NOTHROW(simulate_path(p, cfg));
}

TEST_CASE("fold and quadrant transforms") {
  StepSample s;
  s.z = Vec2{2.0, -1.0};  // in S2, v = -3
  s.dL1 = 0.25;
  s.dL2 = 0.5;
  const StepSample h = hat_step(s, /*v_prev=*/-2.0);  // no crossing
  CHECK(h.z.x == -1.0);
  CHECK(h.z.y == 2.0);
  CHECK(h.dL1 == Approx(0.75));
  CHECK(h.dL2 == 0.0);

  StepSample s2;
  s2.z = Vec2{-1.0, 2.0};  // already in S1, v = 3
  const StepSample h2 = hat_step(s2, 2.5);
  CHECK(h2.z.x == -1.0);
  CHECK(h2.z.y == 2.0);
  CHECK(h2.dL2 == 0.0);

  const StepSample t = tilde_step(h2);
  CHECK(t.z.x == 3.0);
  CHECK(t.z.y == 2.0);

  // diagonal crossing: v goes 0.1 -> -0.05, Tanaka increment 2*0.05
  StepSample sd;
  sd.z = Vec2{1.05, 1.0};
  const StepSample hd = hat_step(sd, 0.1);
  CHECK(hd.dL2 == Approx(0.1));
}

TEST_CASE("transformed paths live in S1 and the quadrant") {
  SimConfig cfg = short_cfg();
  cfg.record_stride = 1;
  const PathRecord rec = simulate_path(kSym, cfg);
  const PathRecord hat = transform_hat(rec);
  for (const StepSample& s : hat.samples) {
    CHECK(s.z.x <= s.z.y + 1e-15);
    CHECK(s.z.y >= 0.0);
    CHECK(s.dL2 >= 0.0);
  }
  CHECK(hat.L1_total == Approx(rec.L1_total + rec.L2_total));
  CHECK(hat.L2_total > 0.0);  // the path does cross the diagonal
  // Tanaka increments telescope: sum dL2 = |v_T| - |v_0| - sum sgn * dv
  double tele = 0.0, vprev = rec.samples.front().z.y - rec.samples.front().z.x;
  for (std::size_t i = 1; i < rec.samples.size(); ++i) {
    const double v = rec.samples[i].z.y - rec.samples[i].z.x;
    tele += std::abs(v) - std::abs(vprev) -
            (vprev >= 0 ? 1.0 : -1.0) * (v - vprev);
    vprev = v;
  }
  CHECK(hat.L2_total == Approx(tele).epsilon(1e-10));

  const PathRecord til = transform_tilde(hat);
  for (const StepSample& s : til.samples) {
    CHECK(s.z.x >= 0.0);
    CHECK(s.z.y >= 0.0);
  }
}

TEST_CASE("too-large steps at the corner raise StuckAtCorner") {
  // enormous h with a huge adverse increment cannot terminate
  ModelParams p = kSym;
  const Vec2 z{0.0, 0.0};
  bool threw = false;
  try {
    for (int i = 0; i < 200 && !threw; ++i) {
      // adversarial oscillation; StuckAtCorner requires a pathological push,
      // which the single-projection scheme resolves, so this should NOT throw
      (void)step_rbm(p, z, Vec2{-50.0, -50.0}, 10.0);
    }
  } catch (const StuckAtCorner&) {
    threw = true;
  }
  CHECK_FALSE(threw);
}
