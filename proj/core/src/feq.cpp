#include "rbm3q/feq.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "rbm3q/errors.hpp"
#include "rbm3q/kernel.hpp"
#include "rbm3q/quadrature.hpp"

namespace rbm3q {

namespace {

const LaplaceEstimate& need(const std::optional<LaplaceEstimate>& e,
                            const char* what) {
  if (!e) throw MissingEstimate(std::string("missing estimate: ") + what);
  return *e;
}

double se2(const LaplaceEstimate& e) {
  return e.se_re * e.se_re + e.se_im * e.se_im;
}

Complex k_poly(const ModelParams& p, Complex x, Complex y) {
  return 0.5 * p.theta() * (y - x) + 0.5 * (p.sigma2 - p.sigma1) * (x + y) +
         (p.mu2 - p.mu1);
}

}  // namespace

ResidualReport make_report(const std::string& eq, Complex x, Complex y,
                           Complex residual, double se) {
  ResidualReport r;
  r.equation = eq;
  r.point_x = x;
  r.point_y = y;
  r.residual = residual;
  r.se = se;
  r.z = se > 0 ? std::abs(residual) / se : INFINITY;
  r.pass = r.z <= 3.0;
  return r;
}

ResidualReport check_feq_S1(const ModelParams& p, const FeqEstimates& est,
                            Complex x, Complex y) {
  const auto& L1 = need(est.L1, "L1");
  const auto& m = need(est.m, "m");
  const auto& n = need(est.n, "n");
  const auto& l1 = need(est.ell1, "ell1");
  if (!est.E) throw MissingEstimate("missing estimate: E");
  const Complex K = kernel_K(p, x, y);
  const Complex k = k_poly(p, x, y);
  const Complex k1 = p.r1 * x + y;
  const Complex res =
      K * L1.value + k * m.value + p.theta() * n.value + k1 * l1.value + *est.E;
  const double var = std::norm(K) * se2(L1) + std::norm(k) * se2(m) +
                     p.theta() * p.theta() * se2(n) + std::norm(k1) * se2(l1) +
                     est.E_se * est.E_se;
  return make_report("feq-S1", x, y, res, std::sqrt(var));
}

ResidualReport check_feq_S2(const ModelParams& p, const FeqEstimates& est,
                            Complex x, Complex y) {
  const auto& L2 = need(est.L2, "L2");
  const auto& m = need(est.m, "m");
  const auto& n = need(est.n, "n");
  const auto& l2 = need(est.ell2, "ell2");
  if (!est.E) throw MissingEstimate("missing estimate: E");
  const Complex K = kernel_K(p, x, y);
  const Complex k = k_poly(p, x, y);
  const Complex k2 = x + p.r2 * y;
  const Complex res = K * L2.value - k * m.value - p.theta() * n.value +
                      k2 * l2.value - *est.E;
  const double var = std::norm(K) * se2(L2) + std::norm(k) * se2(m) +
                     p.theta() * p.theta() * se2(n) + std::norm(k2) * se2(l2) +
                     est.E_se * est.E_se;
  return make_report("feq-S2", x, y, res, std::sqrt(var));
}

ResidualReport check_feq_sum(const ModelParams& p, const FeqEstimates& est,
                             Complex x, Complex y) {
  const auto& L1 = need(est.L1, "L1");
  const auto& L2 = need(est.L2, "L2");
  const auto& l1 = need(est.ell1, "ell1");
  const auto& l2 = need(est.ell2, "ell2");
  const Complex K = kernel_K(p, x, y);
  const Complex k1 = p.r1 * x + y;
  const Complex k2 = x + p.r2 * y;
  const Complex res =
      K * (L1.value + L2.value) + k1 * l1.value + k2 * l2.value;
  const double var = std::norm(K) * (se2(L1) + se2(L2)) +
                     std::norm(k1) * se2(l1) + std::norm(k2) * se2(l2);
  return make_report("feq-sum", x, y, res, std::sqrt(var));
}

std::vector<FeqEstimates> measure_feq(
    const ModelParams& p, const SimConfig& cfg,
    const std::vector<std::pair<Complex, Complex>>& pts, bool with_mn,
    int threads) {
  std::vector<req::Any> reqs;
  for (const auto& [x, y] : pts) {
    reqs.push_back(req::Laplace{Region::S1, x, y});
    reqs.push_back(req::Laplace{Region::S2, x, y});
    reqs.push_back(req::Ell{EllAxis::One, x});
    reqs.push_back(req::Ell{EllAxis::Two, y});
    if (with_mn) {
      reqs.push_back(req::DiagLT{x + y});
      reqs.push_back(req::NDeriv{x + y});
    }
  }
  if (with_mn) {
    reqs.push_back(req::CornerNu{EllAxis::One, 0.0});
    reqs.push_back(req::CornerNu{EllAxis::Two, 0.0});
  }
  const EstimateRun run = run_estimates(p, cfg, reqs, threads);
  std::vector<FeqEstimates> out(pts.size());
  const std::size_t per = with_mn ? 6 : 4;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    FeqEstimates& e = out[i];
    e.L1 = run.results[per * i + 0];
    e.L2 = run.results[per * i + 1];
    e.ell1 = run.results[per * i + 2];
    e.ell2 = run.results[per * i + 3];
    if (with_mn) {
      e.m = run.results[per * i + 4];
      e.n = run.results[per * i + 5];
      const LaplaceEstimate& nu1 = run.results[per * pts.size() + 0];
      const LaplaceEstimate& nu2 = run.results[per * pts.size() + 1];
      e.E = (1.0 - p.r1) * nu1.value - (1.0 - p.r2) * nu2.value;
      e.E_se = std::abs(1.0 - p.r1) * nu1.se_re +
               std::abs(1.0 - p.r2) * nu2.se_re;
    }
  }
  return out;
}

// ---------------- basic adjoint relationship ----------------

namespace {

// value, gradient and hessian of a scalar (complex) field
struct Jet {
  Complex v{0.0, 0.0};
  Complex dx{0.0, 0.0}, dy{0.0, 0.0};
  Complex dxx{0.0, 0.0}, dxy{0.0, 0.0}, dyy{0.0, 0.0};
};

Jet jet_product(const Jet& a, const Jet& b) {
  Jet j;
  j.v = a.v * b.v;
  j.dx = a.dx * b.v + a.v * b.dx;
  j.dy = a.dy * b.v + a.v * b.dy;
  j.dxx = a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx;
  j.dyy = a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy;
  j.dxy = a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy;
  return j;
}

// C^2 taper: 1 on [-W, W], 0 outside [-2W, 2W] (quintic smoothstep)
struct Taper1D {
  double W;
  void eval(double u, double& c, double& c1, double& c2) const {
    const double a = std::abs(u);
    if (a <= W) {
      c = 1.0;
      c1 = c2 = 0.0;
      return;
    }
    if (a >= 2.0 * W) {
      c = c1 = c2 = 0.0;
      return;
    }
    const double s = (a - W) / W, sg = u >= 0 ? 1.0 : -1.0;
    const double s2 = s * s, s3 = s2 * s;
    c = 1.0 - s3 * (10.0 - 15.0 * s + 6.0 * s2);
    const double dcds = -(30.0 * s2 - 60.0 * s3 + 30.0 * s2 * s2);
    const double d2cds2 = -(60.0 * s - 180.0 * s2 + 120.0 * s3);
    c1 = sg * dcds / W;
    c2 = d2cds2 / (W * W);
  }
};

Jet cutoff_jet(double W, double zx, double zy) {
  Taper1D t{W};
  double cx, cx1, cx2, cy, cy1, cy2;
  t.eval(zx, cx, cx1, cx2);
  t.eval(zy, cy, cy1, cy2);
  Jet j;
  j.v = cx * cy;
  j.dx = cx1 * cy;
  j.dy = cx * cy1;
  j.dxx = cx2 * cy;
  j.dyy = cx * cy2;
  j.dxy = cx1 * cy1;
  return j;
}

Jet base_jet(const BarOptions& o, double zx, double zy) {
  Jet j;
  switch (o.fn) {
    case BarFn::One:
      j.v = 1.0;
      break;
    case BarFn::Coord1:
      j.v = zx;
      j.dx = 1.0;
      break;
    case BarFn::Coord2:
      j.v = zy;
      j.dy = 1.0;
      break;
    case BarFn::ExpXY: {
      const Complex e = std::exp(o.x * zx + o.y * zy);
      j.v = e;
      j.dx = o.x * e;
      j.dy = o.y * e;
      j.dxx = o.x * o.x * e;
      j.dyy = o.y * o.y * e;
      j.dxy = o.x * o.y * e;
      break;
    }
  }
  return j;
}

}  // namespace

ResidualReport check_bar(const ModelParams& p, const SimConfig& cfg,
                         const BarOptions& opt, int threads) {
  const double mu_norm = std::hypot(p.mu1, p.mu2);
  const double W = opt.window > 0 ? opt.window : 5.0 / mu_norm;
  const bool tapered = opt.fn != BarFn::One;

  const int nb = std::max(2, 50 / cfg.replicas);
  const double blen = (cfg.horizon - cfg.burn_in) / nb;

  struct Local {
    std::vector<Complex> sum;
    double time = 0.0, inside = 0.0;
  };
  std::vector<Local> locals(cfg.replicas);
  std::atomic<int> next{0};
  const int nthreads = threads > 0
                           ? threads
                           : std::max(1u, std::min<unsigned>(
                                              std::thread::hardware_concurrency(),
                                              static_cast<unsigned>(cfg.replicas)));
  auto worker = [&]() {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= cfg.replicas) return;
      Local& L = locals[rep];
      L.sum.assign(nb, Complex{});
      simulate_stream(p, cfg, rep, [&](const StepSample& s) {
        if (s.t <= cfg.burn_in) return;
        L.time += cfg.h;
        int b = static_cast<int>((s.t - cfg.burn_in) / blen);
        if (b >= nb) b = nb - 1;
        Jet f = base_jet(opt, s.z.x, s.z.y);
        if (tapered) f = jet_product(f, cutoff_jet(W, s.z.x, s.z.y));
        if (std::abs(s.z.x) <= W && std::abs(s.z.y) <= W) L.inside += cfg.h;
        // generator term, time-weighted
        const Complex Gf =
            0.5 * (p.sigma1 * f.dxx + 2.0 * p.rho * f.dxy + p.sigma2 * f.dyy) +
            p.mu1 * f.dx + p.mu2 * f.dy;
        Complex acc = Gf * cfg.h;
        if (s.dL1 > 0.0) acc += (p.r1 * f.dx + f.dy) * s.dL1;
        if (s.dL2 > 0.0) acc += (f.dx + p.r2 * f.dy) * s.dL2;
        L.sum[b] += acc;
      });
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  double total_time = 0.0, inside = 0.0;
  std::vector<Complex> means;
  for (const auto& L : locals) {
    total_time += L.time;
    inside += L.inside;
    for (const Complex& s : L.sum) means.push_back(s / blen);
  }
  if (tapered && inside < 0.9 * total_time) {
    std::ostringstream os;
    os << "cutoff window [" << -W << ", " << W << "]^2 captures only "
       << 100.0 * inside / total_time << "% of the empirical mass";
    throw CutoffTooTight(os.str());
  }
  Complex mean{};
  for (const Complex& m : means) mean += m;
  mean /= static_cast<double>(means.size());
  double vr = 0.0, vi = 0.0;
  for (const Complex& m : means) {
    vr += (m.real() - mean.real()) * (m.real() - mean.real());
    vi += (m.imag() - mean.imag()) * (m.imag() - mean.imag());
  }
  const double nbm = static_cast<double>(means.size());
  const double se =
      std::sqrt((vr + vi) / (nbm - 1.0) / nbm);
  return make_report("bar", opt.x, opt.y, mean, se);
}

double bar_residual_analytic(
    const ModelParams& p, const std::function<double(double, double)>& pi,
    const std::function<double(double)>& nu1,
    const std::function<double(double)>& nu2,
    const std::function<double(double)>& radial_decay, Complex x, Complex y) {
  // interior term: K(x,y) * int_S exp(x z1 + y z2) pi
  const Complex K = kernel_K(p, x, y);
  const auto angular = [&](double phi) {
    const double c1 = std::cos(phi), c2 = std::sin(phi);
    const double drift = (x * c1 + y * c2).real();
    const double dec = radial_decay(phi) - drift;
    if (dec <= 0.02)
      throw DomainViolation("BAR test exponent too large for density decay");
    const Complex ex = x * c1 + y * c2;
    const auto fre = [&](double r) {
      return (std::exp(ex * r) * pi(r * c1, r * c2)).real() * r;
    };
    const auto fim = [&](double r) {
      return (std::exp(ex * r) * pi(r * c1, r * c2)).imag() * r;
    };
    return Complex(integrate_sqrt_exp(fre, dec), integrate_sqrt_exp(fim, dec));
  };
  Complex LS{0.0, 0.0};
  const int nphi = 48;
  const double lo = -0.5 * M_PI, hi = M_PI;
  const GaussRule& g = gauss_rule(20);
  const double hp = (hi - lo) / nphi;
  for (int k = 0; k < nphi; ++k) {
    const double mid = lo + (k + 0.5) * hp, hl = 0.5 * hp;
    for (std::size_t i = 0; i < g.x.size(); ++i)
      LS += hl * g.w[i] * angular(mid + hl * g.x[i]);
  }
  // boundary terms
  const double dec1 = radial_decay(M_PI) + x.real();
  const double dec2 = radial_decay(-0.5 * M_PI) + y.real();
  if (dec1 <= 0.02 || dec2 <= 0.02)
    throw DomainViolation("BAR boundary exponent too large");
  const auto e1 = [&](double s) { return std::exp(-x * s) * nu1(-s); };
  const auto e2 = [&](double s) { return std::exp(-y * s) * nu2(-s); };
  const Complex ell1(
      integrate_sqrt_exp([&](double s) { return e1(s).real(); }, dec1),
      integrate_sqrt_exp([&](double s) { return e1(s).imag(); }, dec1));
  const Complex ell2(
      integrate_sqrt_exp([&](double s) { return e2(s).real(); }, dec2),
      integrate_sqrt_exp([&](double s) { return e2(s).imag(); }, dec2));
  const Complex res =
      K * LS + (p.r1 * x + y) * ell1 + (x + p.r2 * y) * ell2;
  return std::abs(res);
}

}  // namespace rbm3q
