#pragma once

#include <functional>
#include <vector>

namespace rbm3q {

// Nodes/weights of n-point Gauss-Legendre on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& gauss_rule(int n = 40);

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels = 8, int order = 40);

// Adaptive panel bisection to an absolute tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth = 14);

// int_0^inf f(r) dr for f ~ r^{-1/2} e^{-decay r}: substitute r = u^2,
// truncate once the exponential tail is below the tolerance.
double integrate_sqrt_exp(const std::function<double(double)>& f, double decay,
                          double rel_tail = 1e-14, int panels = 12);

}  // namespace rbm3q
