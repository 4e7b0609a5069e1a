#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "rbm3q/errors.hpp"
#include "rbm3q/model.hpp"

using namespace rbm3q;

namespace {
const ModelParams kSym{-1, -1, 1, 1, 0.0, 2, 2};
const ModelParams kAsym{-1, -2, 1, 2, 0.3, 2, 3};
}  // namespace

TEST_CASE("recurrence conditions") {
  auto r = validate(kSym);
  CHECK(r.recurrent);
  CHECK(r.reflection1);  // -1 - 2*(-1) = 1 > 0

  ModelParams bad = kSym;
  bad.mu1 = 1.0;
  CHECK_FALSE(validate(bad).recurrent);
  CHECK_FALSE(validate(bad).drift1_negative);

  ModelParams small_r = kSym;
  small_r.r1 = 0.5;  // mu1 - r1 mu2 = -0.5 < 0
  CHECK_FALSE(validate(small_r).recurrent);
}

TEST_CASE("ellipticity is enforced") {
  ModelParams p = kSym;
  p.rho = 1.0;  // sigma1*sigma2 - rho^2 = 0
  CHECK_THROWS_AS(validate(p), NonElliptic);
  p.rho = 1.5;
  CHECK_THROWS_AS(validate(p), NonElliptic);
  CHECK(kAsym.theta() == doctest::Approx((1 + 2 - 0.6) / 2));
  CHECK(kAsym.theta() > 0.0);
}

TEST_CASE("symmetry predicate") {
  CHECK(is_symmetric(ModelParams{-1, -1, 1, 1, 0.3, 2, 2}));
  CHECK_FALSE(is_symmetric(ModelParams{-1, -2, 1, 1, 0.3, 2, 2}));
  CHECK_FALSE(is_symmetric(ModelParams{-1, -1, 1, 1, 0.3, 2, 3}));
  CHECK_FALSE(is_symmetric(kAsym));
}

TEST_CASE("wedge angles, sigma=1 rho=0 r=2") {
  const auto w = wedge_angles(kSym);
  CHECK(w.beta == doctest::Approx(1.5 * M_PI).epsilon(1e-12));
  CHECK(w.beta_tilde == doctest::Approx(0.75 * M_PI).epsilon(1e-12));
  CHECK(w.epsilon == doctest::Approx(0.5 * M_PI));
  // tan d = sin(3pi/2)/(2 + cos(3pi/2)) = -1/2, d in (pi/2, pi)
  CHECK(w.delta == doctest::Approx(M_PI - std::atan(0.5)).epsilon(1e-12));
  CHECK(std::tan(w.delta) ==
        doctest::Approx(std::sin(w.beta) / (2 + std::cos(w.beta))));

  CHECK_THROWS_AS(wedge_angles(kAsym), NotSymmetric);
}

TEST_CASE("beta round trip and half-angle range") {
  for (double rho : {-0.7, -0.2, 0.0, 0.4, 0.9}) {
    ModelParams p{-1, -1, 1, 1, rho, 2, 2};
    const auto w = wedge_angles(p);
    CHECK(w.beta > M_PI);
    CHECK(w.beta < 2 * M_PI);
    CHECK(w.beta == doctest::Approx(2 * w.beta_tilde));
    CHECK(w.beta_tilde > 0.5 * M_PI);
    CHECK(w.beta_tilde < M_PI);
    // recover rho from beta
    CHECK(-p.sigma1 * std::cos(w.beta) == doctest::Approx(rho).epsilon(1e-12));
    // alternative half-angle formula
    CHECK(w.beta_tilde ==
          doctest::Approx(std::acos(-std::sqrt(0.5 * (1 - rho / 1.0)))));
  }
}

TEST_CASE("delta = pi/2 when r + cos(beta) vanishes") {
  // cos(beta) = -rho here, so rho = r puts tan(delta) at its pole; the
  // parameters are not recurrent but the angle map is still defined
  const double r = 0.5;
  ModelParams p{-1, -1, 1, 1, r, r, r};
  const auto w = wedge_angles(p);
  CHECK(std::cos(w.beta) == doctest::Approx(-r).epsilon(1e-12));
  CHECK(w.delta == doctest::Approx(0.5 * M_PI).epsilon(1e-9));
}

TEST_CASE("params JSON round trip and stable hash") {
  const char* path = "params_test_roundtrip.json";
  save_params(kAsym, path);
  const ModelParams q = load_params(path);
  CHECK(q.mu1 == kAsym.mu1);
  CHECK(q.mu2 == kAsym.mu2);
  CHECK(q.sigma1 == kAsym.sigma1);
  CHECK(q.sigma2 == kAsym.sigma2);
  CHECK(q.rho == kAsym.rho);
  CHECK(q.r1 == kAsym.r1);
  CHECK(q.r2 == kAsym.r2);
  CHECK(params_hash(q) == params_hash(kAsym));
  std::remove(path);

  // key order in the file must not matter
  {
    FILE* f = std::fopen(path, "w");
    std::fputs(
        "{\"rho\":0.3,\"refl\":[2,3],\"mu\":[-1,-2],\"sigma\":[1,2]}\n", f);
    std::fclose(f);
  }
  const ModelParams q2 = load_params(path);
  CHECK(params_hash(q2) == params_hash(kAsym));
  std::remove(path);
}
