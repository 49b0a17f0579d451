#pragma once
// Ordinary least squares for y = intercept + slope * x.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace spde {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double residual_stderr = 0.0;  ///< sqrt(SSR / (n - 2)); 0 when n == 2
  std::size_t n = 0;
};

inline LinearFit fit_ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("fit_ols: need >= 2 matched points");
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_ols: degenerate abscissae");
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  if (n > 2) {
    f.residual_stderr = std::sqrt(ssr / static_cast<double>(n - 2));
    f.slope_stderr = f.residual_stderr / std::sqrt(sxx);
  }
  return f;
}

}  // namespace spde
