#include "rbm3q/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace rbm3q {

namespace {

// Newton iteration on Legendre polynomials.
GaussRule make_rule(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int order) {
  const GaussRule& r = gauss_rule(order);
  double s = 0.0;
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hp;
    const double mid = lo + 0.5 * hp, hl = 0.5 * hp;
    for (size_t i = 0; i < r.x.size(); ++i) s += hl * r.w[i] * f(mid + hl * r.x[i]);
  }
  return s;
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b,
             double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = integrate(f, a, m, 1, 20);
  const double right = integrate(f, m, b, 1, 20);
  if (depth <= 0 || std::abs(left + right - whole) < tol) return left + right;
  return adapt(f, a, m, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth) {
  return adapt(f, a, b, integrate(f, a, b, 1, 20), abs_tol, max_depth);
}

double integrate_sqrt_exp(const std::function<double(double)>& f, double decay,
                          double rel_tail, int panels) {
  const double L = -std::log(rel_tail) / decay;
  const auto g = [&f](double u) { return 2.0 * u * f(u * u); };
  return integrate(g, 0.0, std::sqrt(L), panels);
}

}  // namespace rbm3q
