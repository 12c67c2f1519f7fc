#pragma once

// Independent numerical oracles for the test suites. These deliberately
// avoid the library's own code paths: the t CDF is obtained by adaptive
// quadrature of the density, not by the incomplete beta function.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(f, a, m);
  const double right = simpson(f, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  if (a == b) return 0.0;
  return adaptive_simpson(f, a, b, simpson(f, a, b), tol, 60);
}

inline double t_pdf(double x, double df) {
  const double log_norm = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                          0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_norm - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

// Student-t CDF by quadrature from 0, using symmetry around the origin.
inline double t_cdf(double x, double df) {
  const double magnitude = std::abs(x);
  const double half = integrate([df](double u) { return t_pdf(u, df); }, 0.0, magnitude);
  return x >= 0.0 ? 0.5 + half : 0.5 - half;
}

// Kolmogorov-Smirnov statistic of a sample against Uniform(lower, upper).
inline double ks_uniform(std::vector<double> sample, double lower, double upper) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = (sample[i] - lower) / (upper - lower);
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(cdf - i / n));
  }
  return d;
}

}  // namespace oracle
