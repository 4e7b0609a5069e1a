#include "rbm3q/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "rbm3q/errors.hpp"

namespace rbm3q {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t replica) {
  std::uint64_t mix = seed;
  (void)splitmix64(mix);
  mix ^= 0x51d2cc5c30a3bfb5ull * (replica + 1);
  s_ = splitmix64(mix);
  if (s_ == 0) s_ = 0x2545f4914f6cdd1dull;
}

std::uint64_t RngStream::next_u64() {
  // xorshift64* on the splitmix-initialized state
  std::uint64_t x = s_;
  x ^= x >> 12;
  x ^= x << 25;
  x ^= x >> 27;
  s_ = x;
  return x * 0x2545f4914f6cdd1dull;
}

double RngStream::uniform() {
  return (next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

bool in_domain(const Vec2& z) { return z.x >= 0.0 || z.y >= 0.0; }

namespace {

struct Chol {
  double l11, l21, l22;
};

Chol cholesky(const ModelParams& p) {
  const double l11 = std::sqrt(p.sigma1);
  const double l21 = p.rho / l11;
  const double l22 = std::sqrt(p.sigma2 - l21 * l21);
  return {l11, l21, l22};
}

// First parameter value s in [0,1] at which z + s*d enters the missing
// quadrant; returns s > 1 when the segment never enters. face_out = 1 when
// the entry crosses the horizontal face {z2=0, z1<=0}, 2 for the vertical
// face, 0 for an exact corner tie.
double first_entry(const Vec2& z, const Vec2& d, int& face_out) {
  constexpr double kNever = 1e30;
  // s at which a coordinate turns negative; "crossing" marks a downward
  // transition through zero (as opposed to starting negative)
  double s1 = kNever, s2 = kNever;
  bool cross1 = false, cross2 = false;
  if (z.x < 0.0) {
    s1 = 0.0;
  } else if (d.x < 0.0) {
    s1 = z.x / -d.x;
    cross1 = true;
  }
  if (z.y < 0.0) {
    s2 = 0.0;
  } else if (d.y < 0.0) {
    s2 = z.y / -d.y;
    cross2 = true;
  }
  const double s1_out = (z.x < 0.0 && d.x > 0.0) ? -z.x / d.x : kNever;
  const double s2_out = (z.y < 0.0 && d.y > 0.0) ? -z.y / d.y : kNever;
  const double lo = std::max(s1, s2);
  const double hi = std::min({s1_out, s2_out, 1.0});
  if (lo > hi || lo > 1.0) {
    face_out = 0;
    return 2.0;
  }
  if (s1 > s2) {
    face_out = 2;  // z1 turns negative last: vertical face
  } else if (s2 > s1) {
    face_out = 1;
  } else if (cross1 && !cross2) {
    face_out = 2;
  } else if (cross2 && !cross1) {
    face_out = 1;
  } else {
    face_out = 0;  // genuine corner tie
  }
  return lo;
}

}  // namespace

StepResult step_rbm(const ModelParams& p, const Vec2& state, const Vec2& xi,
                    double h) {
  const Chol L = cholesky(p);
  const double sh = std::sqrt(h);
  Vec2 d{p.mu1 * h + sh * (L.l11 * xi.x),
         p.mu2 * h + sh * (L.l21 * xi.x + L.l22 * xi.y)};
  Vec2 cur = state;
  StepResult out;
  for (int iter = 0; iter < 100; ++iter) {
    int face = 0;
    const double s = first_entry(cur, d, face);
    Vec2 w{cur.x + d.x, cur.y + d.y};
    if (s > 1.0) {
      out.z = w;
      return out;
    }
    if (face == 0) {
      // corner tie: resolve toward the face with the deeper target violation
      face = (-w.y >= -w.x) ? 1 : 2;
    }
    if (face == 1) {
      const double a = std::max(0.0, -w.y);
      out.z = a > 0.0 ? Vec2{w.x + a * p.r1, 0.0} : w;
      out.dL1 += a;
    } else {
      const double a = std::max(0.0, -w.x);
      out.z = a > 0.0 ? Vec2{0.0, w.y + a * p.r2} : w;
      out.dL2 += a;
    }
    if (in_domain(out.z)) return out;
    // retry from the pushed point with no displacement left (paranoia path)
    cur = out.z;
    d = Vec2{0.0, 0.0};
  }
  throw StuckAtCorner("push-back did not terminate in 100 sub-iterations");
}

void simulate_stream(const ModelParams& p, const SimConfig& cfg, int replica,
                     const StepSink& sink) {
  const RecurrenceReport rep = validate(p);
  if (!rep.recurrent && !cfg.override_recurrence) {
    throw DomainViolation(
        "parameters are not positive recurrent; set override to simulate");
  }
  if (!in_domain(cfg.start)) throw DomainViolation("start point outside S");
  RngStream rng(cfg.seed, static_cast<std::uint64_t>(replica));
  Vec2 z = cfg.start;
  const std::size_t n = cfg.n_steps();
  StepSample s;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 xi{rng.normal(), rng.normal()};
    const StepResult r = step_rbm(p, z, xi, cfg.h);
    z = r.z;
    s.t = (k + 1) * cfg.h;
    s.z = z;
    s.dL1 = r.dL1;
    s.dL2 = r.dL2;
    sink(s);
  }
}

PathRecord simulate_path(const ModelParams& p, const SimConfig& cfg,
                         int replica) {
  PathRecord rec;
  rec.samples.reserve(cfg.n_steps() / cfg.record_stride + 1);
  std::size_t k = 0;
  simulate_stream(p, cfg, replica, [&](const StepSample& s) {
    rec.L1_total += s.dL1;
    rec.L2_total += s.dL2;
    rec.t_end = s.t;
    ++rec.n_steps;
    if (k++ % cfg.record_stride == 0) rec.samples.push_back(s);
  });
  return rec;
}

StepSample hat_step(const StepSample& s, double v_prev) {
  StepSample o = s;
  if (s.z.x > s.z.y) o.z = Vec2{s.z.y, s.z.x};
  o.dL1 = s.dL1 + s.dL2;
  const double v = s.z.y - s.z.x;
  const double sg = v_prev >= 0.0 ? 1.0 : -1.0;
  o.dL2 = std::abs(v) - std::abs(v_prev) - sg * (v - v_prev);
  if (o.dL2 < 0.0) o.dL2 = 0.0;  // guard against rounding
  return o;
}

StepSample tilde_step(const StepSample& s_hat) {
  StepSample o = s_hat;
  o.z = Vec2{-s_hat.z.x + s_hat.z.y, s_hat.z.y};
  return o;
}

PathRecord transform_hat(const PathRecord& path) {
  PathRecord out;
  out.t_end = path.t_end;
  out.n_steps = path.n_steps;
  out.samples.reserve(path.samples.size());
  double v_prev = 0.0;
  bool first = true;
  for (const StepSample& s : path.samples) {
    const double v = s.z.y - s.z.x;
    StepSample o = hat_step(s, first ? v : v_prev);
    if (first) o.dL2 = 0.0;  // no pre-history for the first sample
    first = false;
    v_prev = v;
    out.samples.push_back(o);
    out.L1_total += o.dL1;
    out.L2_total += o.dL2;
  }
  return out;
}

PathRecord transform_tilde(const PathRecord& path_hat) {
  PathRecord out;
  out.t_end = path_hat.t_end;
  out.n_steps = path_hat.n_steps;
  out.L1_total = path_hat.L1_total;
  out.L2_total = path_hat.L2_total;
  out.samples.reserve(path_hat.samples.size());
  for (const StepSample& s : path_hat.samples) out.samples.push_back(tilde_step(s));
  return out;
}

}  // namespace rbm3q
