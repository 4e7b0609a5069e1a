#include "rbm3q/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "rbm3q/errors.hpp"
#include "rbm3q/kernel.hpp"

namespace rbm3q {

namespace {

constexpr double kDomainTol = 1e-12;
constexpr int kTargetBatches = 50;

struct BatchLayout {
  double burn_in = 0.0;
  double batch_len = 0.0;
  int per_replica = 0;

  int batch_of(double t) const {
    if (t <= burn_in) return -1;
    const int b = static_cast<int>((t - burn_in) / batch_len);
    return b >= per_replica ? per_replica - 1 : b;
  }
};

struct Scratch {
  bool has_prev = false;
  Vec2 prev_raw, prev_hat, prev_tilde;
};

// one statistic = one or two per-batch complex sum arrays
struct Accum {
  req::Any request;
  std::vector<Complex> sum;   // primary, size per_replica (local), merged later
  std::vector<Complex> sum2;  // secondary (NDeriv)
};

void reflect_terms(const ModelParams& p, PathKind k, double dL1, double dL2,
                   double& t1, double& t2) {
  switch (k) {
    case PathKind::Raw:
      t1 = p.r1 * dL1 + dL2;
      t2 = dL1 + p.r2 * dL2;
      return;
    case PathKind::Hat:
      t1 = p.r1 * dL1 - 0.5 * dL2;
      t2 = dL1 + 0.5 * dL2;
      return;
    case PathKind::Tilde:
      t1 = (1.0 - p.r1) * dL1 + dL2;
      t2 = dL1 + 0.5 * dL2;
      return;
  }
}

Vec2 drift_of(const ModelParams& p, PathKind k) {
  if (k == PathKind::Tilde) return Vec2{0.0, p.mu1};
  return Vec2{p.mu1, p.mu2};
}

bool in_region(Region r, const Vec2& z) {
  switch (r) {
    case Region::S1:
      return z.x <= z.y && z.y >= 0.0;
    case Region::S2:
      return in_domain(z) && !(z.x <= z.y && z.y >= 0.0);
    case Region::S:
      return in_domain(z);
  }
  return false;
}

}  // namespace

void require_laplace_domain(Region region, Complex x, Complex y) {
  const double rx = x.real(), ry = y.real();
  bool ok = false;
  switch (region) {
    case Region::S1:
      ok = rx >= -kDomainTol && rx + ry <= kDomainTol;
      break;
    case Region::S2:
      ok = ry >= -kDomainTol && rx + ry <= kDomainTol;
      break;
    case Region::S:
      ok = std::abs(rx) <= kDomainTol && std::abs(ry) <= kDomainTol;
      break;
  }
  if (!ok) {
    std::ostringstream os;
    os << "Laplace argument (" << x << ", " << y
       << ") outside the convergence domain of the requested region";
    throw DomainViolation(os.str());
  }
}

void require_strip_domain(Complex s) {
  if (s.real() > kDomainTol) {
    std::ostringstream os;
    os << "diagonal transform argument " << s << " must have Re <= 0";
    throw DomainViolation(os.str());
  }
}

EllRegionInfo ell_region_info(const ModelParams& p, EllAxis axis, Complex x) {
  const KernelId id = axis == EllAxis::One ? KernelId::U : KernelId::V;
  const BranchFamily f = branch_points(p, id, BranchVar::QoverP);
  EllRegionInfo info;
  info.p2 = f.bp_high;
  info.safe = x.real() >= -kDomainTol;
  info.variance_ok = x.real() > -0.5 * f.bp_high + 0.01;
  info.convergent = x.real() > -f.bp_high + 0.01;
  return info;
}

void require_ell_domain(const ModelParams& p, EllAxis axis, Complex x,
                        RegionPolicy policy) {
  const EllRegionInfo info = ell_region_info(p, axis, x);
  const bool ok =
      policy == RegionPolicy::Strict ? info.safe : info.convergent;
  if (!ok) {
    std::ostringstream os;
    os << "ell" << (axis == EllAxis::One ? 1 : 2) << " argument " << x
       << " outside the " << (policy == RegionPolicy::Strict ? "bounded" : "convergent")
       << " region (decay abscissa p2 = " << info.p2 << ")";
    throw DomainViolation(os.str());
  }
}

namespace {

void validate_request(const ModelParams& p, const req::Any& r) {
  if (const auto* L = std::get_if<req::Laplace>(&r)) {
    require_laplace_domain(L->region, L->x, L->y);
  } else if (const auto* Lt = std::get_if<req::LaplaceTilde>(&r)) {
    if (Lt->p.real() > kDomainTol || Lt->q.real() > kDomainTol)
      throw DomainViolation("tilde Laplace argument must have Re <= 0");
  } else if (const auto* M = std::get_if<req::DiagStrip>(&r)) {
    require_strip_domain(M->s);
  } else if (const auto* Ml = std::get_if<req::DiagLT>(&r)) {
    require_strip_domain(Ml->s);
  } else if (const auto* N = std::get_if<req::NDeriv>(&r)) {
    require_strip_domain(N->s);
  } else if (const auto* E = std::get_if<req::Ell>(&r)) {
    require_ell_domain(p, E->axis, E->x, RegionPolicy::Extended);
  } else if (const auto* D = std::get_if<req::EllDiag>(&r)) {
    if (D->q.real() > kDomainTol)
      throw DomainViolation("diagonal boundary transform needs Re q <= 0");
  }
}

struct ReplicaResult {
  std::vector<std::vector<Complex>> sums;   // [stat][batch]
  std::vector<std::vector<Complex>> sums2;
  double time = 0.0;
  double L1 = 0.0, L2 = 0.0;
};

ReplicaResult run_replica(const ModelParams& p, const SimConfig& cfg,
                          int replica, const std::vector<req::Any>& reqs,
                          const BatchLayout& lay, std::size_t stride) {
  const std::size_t ns = reqs.size();
  ReplicaResult out;
  out.sums.assign(ns, std::vector<Complex>(lay.per_replica, Complex{}));
  out.sums2.assign(ns, std::vector<Complex>(lay.per_replica, Complex{}));

  const double eps = cfg.strip_eps();
  const double delta = cfg.fd_delta();
  const double strip_norm = 2.0 * std::sqrt(2.0) * eps;

  bool need_hat = false, need_tilde = false, need_prev = false;
  for (const auto& r : reqs) {
    if (std::holds_alternative<req::LaplaceTilde>(r)) need_tilde = true;
    if (std::holds_alternative<req::EllDiag>(r)) need_tilde = true;
    if (std::holds_alternative<req::DiagLT>(r)) need_hat = true;
    if (const auto* b = std::get_if<req::OccBox>(&r)) {
      if (b->path == PathKind::Hat) need_hat = true;
      if (b->path == PathKind::Tilde) need_tilde = true;
    }
    if (const auto* c = std::get_if<req::CovRate>(&r)) {
      need_prev = true;
      if (c->path != PathKind::Raw) need_hat = true;
      if (c->path == PathKind::Tilde) need_tilde = true;
    }
    if (const auto* rr = std::get_if<req::ReflResidual>(&r)) {
      need_prev = true;
      if (rr->path != PathKind::Raw) need_hat = true;
      if (rr->path == PathKind::Tilde) need_tilde = true;
    }
  }
  need_hat = need_hat || need_tilde;
  need_prev = need_prev || need_hat;

  Scratch sc;
  sc.prev_raw = cfg.start;
  {
    StepSample s0;
    s0.z = cfg.start;
    const StepSample h0 = hat_step(s0, cfg.start.y - cfg.start.x);
    sc.prev_hat = h0.z;
    sc.prev_tilde = tilde_step(h0).z;
  }
  sc.has_prev = true;
  std::size_t k = 0;
  simulate_stream(p, cfg, replica, [&](const StepSample& s) {
    const int batch = lay.batch_of(s.t);
    const bool interior = (k % stride == 0);
    const double wt = static_cast<double>(stride) * cfg.h;
    ++k;
    out.time += (s.t > lay.burn_in) ? cfg.h : 0.0;
    if (s.t > lay.burn_in) {
      out.L1 += s.dL1;
      out.L2 += s.dL2;
    }

    StepSample hs, ts;
    if (need_hat) {
      hs = hat_step(s, sc.prev_raw.y - sc.prev_raw.x);
      if (need_tilde) ts = tilde_step(hs);
    }
    const double v = s.z.y - s.z.x;
    const double diag = 0.5 * (s.z.x + s.z.y);

    if (batch >= 0) {
      for (std::size_t i = 0; i < ns; ++i) {
        const req::Any& r = reqs[i];
        Complex* acc = &out.sums[i][batch];
        if (const auto* L = std::get_if<req::Laplace>(&r)) {
          if (interior && in_region(L->region, s.z))
            *acc += wt * std::exp(L->x * s.z.x + L->y * s.z.y);
        } else if (const auto* Lt = std::get_if<req::LaplaceTilde>(&r)) {
          if (interior)
            *acc += 0.5 * wt * std::exp(Lt->p * ts.z.x + Lt->q * ts.z.y);
        } else if (const auto* M = std::get_if<req::DiagStrip>(&r)) {
          if (interior && std::abs(v - M->offset * std::sqrt(2.0)) <
                              std::sqrt(2.0) * eps)
            *acc += wt / strip_norm * std::exp(M->s * diag);
        } else if (const auto* Ml = std::get_if<req::DiagLT>(&r)) {
          if (hs.dL2 > 0.0)
            *acc += hs.dL2 / (2.0 * p.theta()) * std::exp(Ml->s * diag);
        } else if (const auto* N = std::get_if<req::NDeriv>(&r)) {
          if (interior) {
            if (std::abs(v - delta * std::sqrt(2.0)) < std::sqrt(2.0) * eps)
              *acc += wt / strip_norm * std::exp(N->s * diag);
            if (std::abs(v + delta * std::sqrt(2.0)) < std::sqrt(2.0) * eps)
              out.sums2[i][batch] += wt / strip_norm * std::exp(N->s * diag);
          }
        } else if (const auto* E = std::get_if<req::Ell>(&r)) {
          if (E->axis == EllAxis::One) {
            if (s.dL1 > 0.0) *acc += s.dL1 * std::exp(E->x * s.z.x);
          } else {
            if (s.dL2 > 0.0) *acc += s.dL2 * std::exp(E->x * s.z.y);
          }
        } else if (const auto* D = std::get_if<req::EllDiag>(&r)) {
          if (hs.dL2 > 0.0) *acc += hs.dL2 * std::exp(D->q * ts.z.y);
        } else if (const auto* C = std::get_if<req::CornerNu>(&r)) {
          const double w = C->bandwidth > 0 ? C->bandwidth : 4.0 * std::sqrt(cfg.h);
          if (C->axis == EllAxis::One) {
            if (s.dL1 > 0.0 && std::abs(s.z.x) < w) *acc += s.dL1 / w;
          } else {
            if (s.dL2 > 0.0 && std::abs(s.z.y) < w) *acc += s.dL2 / w;
          }
        } else if (const auto* B = std::get_if<req::OccBox>(&r)) {
          if (interior) {
            const Vec2& z = B->path == PathKind::Raw
                                ? s.z
                                : (B->path == PathKind::Hat ? hs.z : ts.z);
            if (z.x >= B->lo.x && z.x <= B->hi.x && z.y >= B->lo.y &&
                z.y <= B->hi.y)
              *acc += wt;
          }
        } else if (const auto* C2 = std::get_if<req::CovRate>(&r)) {
          if (sc.has_prev) {
            const Vec2& z = C2->path == PathKind::Raw
                                ? s.z
                                : (C2->path == PathKind::Hat ? hs.z : ts.z);
            const Vec2& zp = C2->path == PathKind::Raw
                                 ? sc.prev_raw
                                 : (C2->path == PathKind::Hat ? sc.prev_hat
                                                              : sc.prev_tilde);
            const double dl1 = C2->path == PathKind::Raw ? s.dL1 : hs.dL1;
            const double dl2 = C2->path == PathKind::Raw ? s.dL2 : hs.dL2;
            double t1 = 0, t2 = 0;
            reflect_terms(p, C2->path, dl1, dl2, t1, t2);
            const Vec2 mu = drift_of(p, C2->path);
            const double dw1 = z.x - zp.x - mu.x * cfg.h - t1;
            const double dw2 = z.y - zp.y - mu.y * cfg.h - t2;
            const double wi = C2->i == 0 ? dw1 : dw2;
            const double wj = C2->j == 0 ? dw1 : dw2;
            *acc += wi * wj;
          }
        } else if (const auto* R = std::get_if<req::ReflResidual>(&r)) {
          if (sc.has_prev) {
            const Vec2& z = R->path == PathKind::Raw
                                ? s.z
                                : (R->path == PathKind::Hat ? hs.z : ts.z);
            const Vec2& zp = R->path == PathKind::Raw
                                 ? sc.prev_raw
                                 : (R->path == PathKind::Hat ? sc.prev_hat
                                                             : sc.prev_tilde);
            const double dl1 = R->path == PathKind::Raw ? s.dL1 : hs.dL1;
            const double dl2 = R->path == PathKind::Raw ? s.dL2 : hs.dL2;
            double t1 = 0, t2 = 0;
            reflect_terms(p, R->path, dl1, dl2, t1, t2);
            const Vec2 mu = drift_of(p, R->path);
            *acc += (R->i == 0) ? (z.x - zp.x - mu.x * cfg.h - t1)
                                : (z.y - zp.y - mu.y * cfg.h - t2);
          }
        }
      }
    }
    if (need_prev) {
      sc.prev_raw = s.z;
      if (need_hat) sc.prev_hat = hs.z;
      if (need_tilde) sc.prev_tilde = ts.z;
    }
  });
  return out;
}

}  // namespace

EstimateRun run_estimates(const ModelParams& p, const SimConfig& cfg,
                          const std::vector<req::Any>& requests, int threads,
                          std::size_t update_stride) {
  for (const auto& r : requests) validate_request(p, r);
  BatchLayout lay;
  lay.burn_in = cfg.burn_in;
  lay.per_replica =
      std::max(2, (kTargetBatches + cfg.replicas - 1) / cfg.replicas);
  lay.batch_len = (cfg.horizon - cfg.burn_in) / lay.per_replica;
  if (lay.batch_len <= 0) throw DomainViolation("burn_in must be < horizon");

  const int nthreads =
      threads > 0 ? threads
                  : std::max(1u, std::min<unsigned>(
                                     std::thread::hardware_concurrency(),
                                     static_cast<unsigned>(cfg.replicas)));
  std::vector<ReplicaResult> results(cfg.replicas);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= cfg.replicas) return;
      results[r] = run_replica(p, cfg, r, requests, lay, update_stride);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  EstimateRun run;
  run.results.resize(requests.size());
  for (const auto& rr : results) {
    run.total_time += rr.time;
    run.total_local1 += rr.L1;
    run.total_local2 += rr.L2;
  }
  const int B_total = lay.per_replica * cfg.replicas;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    std::vector<Complex> means;
    means.reserve(B_total);
    const bool is_nderiv = std::holds_alternative<req::NDeriv>(requests[i]);
    const double delta = cfg.fd_delta();
    for (const auto& rr : results) {
      for (int b = 0; b < lay.per_replica; ++b) {
        Complex m = rr.sums[i][b] / lay.batch_len;
        if (is_nderiv) {
          const Complex m2 = rr.sums2[i][b] / lay.batch_len;
          m = -std::sqrt(2.0) * (m - m2) / (2.0 * delta);
        }
        means.push_back(m);
      }
    }
    Complex mean{};
    for (const Complex& m : means) mean += m;
    mean /= static_cast<double>(means.size());
    double vr = 0.0, vi = 0.0;
    for (const Complex& m : means) {
      vr += (m.real() - mean.real()) * (m.real() - mean.real());
      vi += (m.imag() - mean.imag()) * (m.imag() - mean.imag());
    }
    const double nb = static_cast<double>(means.size());
    LaplaceEstimate est;
    est.value = mean;
    est.se_re = std::sqrt(vr / (nb - 1.0) / nb);
    est.se_im = std::sqrt(vi / (nb - 1.0) / nb);
    est.n_effective = nb;
    run.results[i] = est;
  }
  return run;
}

LaplaceEstimate estimate_L(const ModelParams& p, const SimConfig& cfg,
                           Region region, Complex x, Complex y) {
  return run_estimates(p, cfg, {req::Laplace{region, x, y}}).results[0];
}

LaplaceEstimate estimate_m(const ModelParams& p, const SimConfig& cfg,
                           Complex s) {
  return run_estimates(p, cfg, {req::DiagLT{s}}).results[0];
}

LaplaceEstimate estimate_n(const ModelParams& p, const SimConfig& cfg,
                           Complex s) {
  return run_estimates(p, cfg, {req::NDeriv{s}}).results[0];
}

LaplaceEstimate estimate_ell(const ModelParams& p, const SimConfig& cfg,
                             EllAxis axis, Complex x, RegionPolicy policy) {
  require_ell_domain(p, axis, x, policy);
  return run_estimates(p, cfg, {req::Ell{axis, x}}).results[0];
}

CornerDensities estimate_corner_densities(const ModelParams& p,
                                          const SimConfig& cfg) {
  const double w = 4.0 * std::sqrt(cfg.h);
  auto run = run_estimates(
      p, cfg, {req::CornerNu{EllAxis::One, w}, req::CornerNu{EllAxis::Two, w}});
  CornerDensities out;
  out.nu1_0 = run.results[0];
  out.nu2_0 = run.results[1];
  const double visits1 = out.nu1_0.value.real() * run.total_time * w;
  const double visits2 = out.nu2_0.value.real() * run.total_time * w;
  if (visits1 < 100.0 * w || visits2 < 100.0 * w) {
    std::ostringstream os;
    os << "local time near the corner too small for bandwidth " << w
       << " (visits: " << visits1 << ", " << visits2 << ")";
    throw InsufficientBoundaryVisits(os.str());
  }
  out.E = (1.0 - p.r1) * out.nu1_0.value - (1.0 - p.r2) * out.nu2_0.value;
  out.E_se = std::abs(1.0 - p.r1) * out.nu1_0.se_re +
             std::abs(1.0 - p.r2) * out.nu2_0.se_re;
  return out;
}

DensityGrid estimate_density(const ModelParams& p, const SimConfig& cfg,
                             int nx, int ny, int threads) {
  const double mu_norm = std::hypot(p.mu1, p.mu2);
  const double R = 5.0 / mu_norm;
  DensityGrid g;
  g.nx = nx;
  g.ny = ny;
  g.x_lo = -R;
  g.x_hi = R;
  g.y_lo = -R;
  g.y_hi = R;
  const int nb = 16;
  const double blen = (cfg.horizon - cfg.burn_in) / nb;

  const int ndiag = 100;
  const int nray = 100;
  const double diag_max = R;
  const double ray_min = -R;
  const double w_corner = 4.0 * std::sqrt(cfg.h);
  const double eps = cfg.strip_eps();

  struct Local {
    std::vector<double> cells;  // nb * nx * ny
    std::vector<double> diag;
    std::vector<double> nu1, nu2;
    double nu1_0 = 0, nu2_0 = 0;
    double time = 0;
  };
  const int nthreads =
      threads > 0 ? threads
                  : std::max(1u, std::min<unsigned>(
                                     std::thread::hardware_concurrency(),
                                     static_cast<unsigned>(cfg.replicas)));
  std::vector<Local> locals(cfg.replicas);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= cfg.replicas) return;
      Local& L = locals[rep];
      L.cells.assign(static_cast<std::size_t>(nb) * nx * ny, 0.0);
      L.diag.assign(ndiag, 0.0);
      L.nu1.assign(nray, 0.0);
      L.nu2.assign(nray, 0.0);
      simulate_stream(p, cfg, rep, [&](const StepSample& s) {
        if (s.t <= cfg.burn_in) return;
        L.time += cfg.h;
        int b = static_cast<int>((s.t - cfg.burn_in) / blen);
        if (b >= nb) b = nb - 1;
        const int ix = static_cast<int>((s.z.x - g.x_lo) / (g.x_hi - g.x_lo) * nx);
        const int iy = static_cast<int>((s.z.y - g.y_lo) / (g.y_hi - g.y_lo) * ny);
        if (ix >= 0 && ix < nx && iy >= 0 && iy < ny)
          L.cells[(static_cast<std::size_t>(b) * nx + ix) * ny + iy] += cfg.h;
        const double v = s.z.y - s.z.x;
        const double d = 0.5 * (s.z.x + s.z.y);
        if (std::abs(v) < std::sqrt(2.0) * eps && d >= 0 && d < diag_max) {
          const int id = static_cast<int>(d / diag_max * ndiag);
          L.diag[id] += cfg.h / (2.0 * std::sqrt(2.0) * eps);
        }
        if (s.dL1 > 0.0) {
          if (s.z.x > ray_min && s.z.x <= 0.0) {
            int ir = static_cast<int>((s.z.x - ray_min) / (-ray_min) * nray);
            if (ir >= nray) ir = nray - 1;
            L.nu1[ir] += s.dL1;
          }
          if (std::abs(s.z.x) < w_corner) L.nu1_0 += s.dL1 / w_corner;
        }
        if (s.dL2 > 0.0) {
          if (s.z.y > ray_min && s.z.y <= 0.0) {
            int ir = static_cast<int>((s.z.y - ray_min) / (-ray_min) * nray);
            if (ir >= nray) ir = nray - 1;
            L.nu2[ir] += s.dL2;
          }
          if (std::abs(s.z.y) < w_corner) L.nu2_0 += s.dL2 / w_corner;
        }
      });
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const std::size_t ncell = static_cast<std::size_t>(nx) * ny;
  g.cell.assign(ncell, 0.0);
  g.cell_se.assign(ncell, 0.0);
  double total_time = 0.0;
  for (const auto& L : locals) total_time += L.time;
  // batch means over nb*replicas batches per cell
  const int B = nb * cfg.replicas;
  for (std::size_t c = 0; c < ncell; ++c) {
    double mean = 0.0;
    for (const auto& L : locals)
      for (int b = 0; b < nb; ++b) mean += L.cells[b * ncell + c];
    mean /= total_time;
    double var = 0.0;
    for (const auto& L : locals)
      for (int b = 0; b < nb; ++b) {
        const double m = L.cells[b * ncell + c] / blen;
        var += (m - mean) * (m - mean);
      }
    g.cell[c] = mean;
    g.cell_se[c] = std::sqrt(var / (B - 1.0) / B);
  }
  g.mass = 0.0;
  double mass_var = 0.0;
  {
    std::vector<double> bm;
    for (const auto& L : locals)
      for (int b = 0; b < nb; ++b) {
        double s = 0.0;
        for (std::size_t c = 0; c < ncell; ++c) s += L.cells[b * ncell + c];
        bm.push_back(s / blen);
      }
    for (double m : bm) g.mass += m;
    g.mass /= bm.size();
    for (double m : bm) mass_var += (m - g.mass) * (m - g.mass);
    g.mass_se = std::sqrt(mass_var / (bm.size() - 1.0) / bm.size());
  }

  g.diag_z.resize(ndiag);
  g.diag_pi.assign(ndiag, 0.0);
  for (int i = 0; i < ndiag; ++i) {
    g.diag_z[i] = (i + 0.5) * diag_max / ndiag;
    double s = 0.0;
    for (const auto& L : locals) s += L.diag[i];
    g.diag_pi[i] = s / total_time / (diag_max / ndiag);
  }
  g.nu1_z.resize(nray);
  g.nu1_val.assign(nray, 0.0);
  g.nu2_z.resize(nray);
  g.nu2_val.assign(nray, 0.0);
  const double binw = -ray_min / nray;
  for (int i = 0; i < nray; ++i) {
    g.nu1_z[i] = ray_min + (i + 0.5) * binw;
    g.nu2_z[i] = ray_min + (i + 0.5) * binw;
    double s1 = 0.0, s2 = 0.0;
    for (const auto& L : locals) {
      s1 += L.nu1[i];
      s2 += L.nu2[i];
    }
    g.nu1_val[i] = s1 / total_time / binw;
    g.nu2_val[i] = s2 / total_time / binw;
  }
  double c1 = 0.0, c2 = 0.0;
  for (const auto& L : locals) {
    c1 += L.nu1_0;
    c2 += L.nu2_0;
  }
  g.nu1_0 = c1 / total_time;
  g.nu2_0 = c2 / total_time;
  g.E = (1.0 - p.r1) * g.nu1_0 - (1.0 - p.r2) * g.nu2_0;
  return g;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_threshold(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt((n + m) / (static_cast<double>(n) * m));
}

std::vector<double> collect_marginal(const ModelParams& p,
                                     const SimConfig& cfg, int replica,
                                     int coord, double spacing) {
  std::vector<double> out;
  double next_t = cfg.burn_in + spacing;
  simulate_stream(p, cfg, replica, [&](const StepSample& s) {
    if (s.t >= next_t) {
      out.push_back(coord == 0 ? s.z.x : s.z.y);
      next_t += spacing;
    }
  });
  return out;
}

}  // namespace rbm3q
