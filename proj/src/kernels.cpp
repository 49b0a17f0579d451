#include "spde/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace spde {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_time_nu(double t, double nu) {
  require(std::isfinite(t) && t > 0.0, "kernel: time must be strictly positive");
  require(std::isfinite(nu) && nu > 0.0, "kernel: nu must be strictly positive");
}

void check_interval(double v, double L, const char* name) {
  if (!(v >= 0.0 && v <= L))
    throw std::invalid_argument(std::string("kernel: ") + name + " outside [0, L]");
}

// Image sum over n in [-N, N]. The direct (x-y) and reflected (x+y) families
// accumulate separately in mirror pairs, which makes the result exactly
// symmetric in (x, y) and makes the Dirichlet sum cancel to the bit at x = 0
// and y = 0.
template <int Sign>
double image_sum(double t, double x, double y, double L, double nu, int n_images) {
  const double inv4nt = 1.0 / (4.0 * nu * t);
  const double norm = 1.0 / std::sqrt(2.0 * kTwoPi * nu * t);
  const double dm = x - y;
  const double dp = x + y;
  auto gauss = [&](double d) { return std::exp(-d * d * inv4nt); };
  double sum_direct = gauss(dm);
  double sum_reflect = gauss(dp);
  for (int n = 1; n <= n_images; ++n) {
    const double shift = 2.0 * n * L;
    sum_direct += gauss(dm - shift) + gauss(dm + shift);
    sum_reflect += gauss(dp - shift) + gauss(dp + shift);
  }
  return norm * (sum_direct + Sign * sum_reflect);
}

}  // namespace

void KernelParams::validate() const {
  require(std::isfinite(length) && length > 0.0, "KernelParams: length must be > 0");
  require(std::isfinite(nu) && nu > 0.0, "KernelParams: nu must be > 0");
  require(images >= 0, "KernelParams: images must be >= 0 (0 = adaptive)");
  if (images == 0) require(std::isfinite(tol) && tol > 0.0, "KernelParams: tol must be > 0");
  require(min_images >= 1, "KernelParams: min_images must be >= 1");
}

double gaussian_kernel(double t, double x, double y, double nu) {
  check_time_nu(t, nu);
  const double d = x - y;
  return std::exp(-d * d / (4.0 * nu * t)) / std::sqrt(2.0 * kTwoPi * nu * t);
}

double image_truncation_error(double t, const KernelParams& params, int n_images) {
  params.validate();
  check_time_nu(t, params.nu);
  require(n_images >= 1, "image_truncation_error: N must be >= 1");
  const double L = params.length;
  const double alpha = L * L / (4.0 * params.nu * t);
  const double norm = 1.0 / std::sqrt(2.0 * kTwoPi * params.nu * t);
  // Blocks bound all four tail terms at distance index m > N:
  //   2 e^{-alpha (2m-1)^2} + e^{-alpha (2m-2)^2} + e^{-alpha (2m)^2}
  auto block = [&](double m) {
    const double a1 = (2.0 * m - 1.0), a2 = (2.0 * m - 2.0), a3 = 2.0 * m;
    return 2.0 * std::exp(-alpha * a1 * a1) + std::exp(-alpha * a2 * a2) +
           std::exp(-alpha * a3 * a3);
  };
  double total = 0.0;
  double b = 0.0;
  int m = n_images + 1;
  for (int i = 0; i < 512; ++i, ++m) {
    b = block(m);
    total += b;
    if (b < 1e-300 || b < total * 1e-20) break;
  }
  // geometric closure for the remaining terms
  const double rho = std::exp(-alpha * (8.0 * m - 4.0));
  if (rho < 1.0) total += b * rho / (1.0 - rho);
  return norm * total;
}

int required_images(double t, const KernelParams& params) {
  params.validate();
  check_time_nu(t, params.nu);
  if (params.images > 0) return params.images;
  int n = params.min_images;
  while (image_truncation_error(t, params, n) > params.tol) {
    if (++n > 1000000) throw std::runtime_error("required_images: truncation did not converge");
  }
  return n;
}

double dirichlet_kernel(double t, double x, double y, const KernelParams& params) {
  params.validate();
  check_time_nu(t, params.nu);
  check_interval(x, params.length, "x");
  check_interval(y, params.length, "y");
  const int n = required_images(t, params);
  return image_sum<-1>(t, x, y, params.length, params.nu, n);
}

double neumann_kernel(double t, double x, double y, const KernelParams& params) {
  params.validate();
  check_time_nu(t, params.nu);
  check_interval(x, params.length, "x");
  check_interval(y, params.length, "y");
  const int n = required_images(t, params);
  return image_sum<+1>(t, x, y, params.length, params.nu, n);
}

double dirichlet_lower_factor(double t, double eps, double nu) {
  check_time_nu(t, nu);
  require(eps > 0.0, "dirichlet_lower_factor: eps must be > 0");
  return 1.0 - 2.0 * std::exp(-eps * eps / (nu * t));
}

namespace {

template <class F>
QuadratureResult integrate_with_breaks(F&& f, double a, double b,
                                       const std::vector<double>& breaks, double tol) {
  std::vector<double> edges{a};
  for (double c : breaks)
    if (c > a && c < b) edges.push_back(c);
  edges.push_back(b);
  const double per_panel_tol = tol / static_cast<double>(edges.size() - 1);
  QuadratureResult total;
  total.converged = true;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto r = quad::simpson_adaptive(f, edges[i], edges[i + 1], per_panel_tol);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.converged = total.converged && r.converged;
  }
  return total;
}

double evaluate_kernel(KernelKind kind, double t, double x, double y,
                       const KernelParams& params, int n_images) {
  switch (kind) {
    case KernelKind::Gaussian:
      return gaussian_kernel(t, x, y, params.nu);
    case KernelKind::Dirichlet:
      return image_sum<-1>(t, x, y, params.length, params.nu, n_images);
    case KernelKind::Neumann:
      return image_sum<+1>(t, x, y, params.length, params.nu, n_images);
  }
  return 0.0;
}

}  // namespace

QuadratureResult kernel_mass_checked(KernelKind kind, double t, double x,
                                     const KernelParams& params) {
  params.validate();
  check_time_nu(t, params.nu);
  check_interval(x, params.length, "x");
  const int n = (kind == KernelKind::Gaussian) ? 0 : required_images(t, params);
  auto f = [&](double y) { return evaluate_kernel(kind, t, x, y, params, n); };
  return integrate_with_breaks(f, 0.0, params.length, {}, 1e-8);
}

double kernel_mass(KernelKind kind, double t, double x, const KernelParams& params) {
  auto r = kernel_mass_checked(kind, t, x, params);
  if (!r.converged)
    throw QuadratureError("kernel_mass: quadrature did not converge", r.error_estimate);
  return r.value;
}

std::vector<double> semigroup_apply(KernelKind kind, const InitialCondition& u0, double t,
                                    const KernelParams& params, std::span<const double> grid) {
  params.validate();
  check_time_nu(t, params.nu);
  u0.validate_on(params.length);
  const int n = (kind == KernelKind::Gaussian) ? 0 : required_images(t, params);
  const auto breaks = u0.breakpoints();
  // A top-hat is constant between its breakpoints; sampling it at panel
  // midpoints keeps the jump off the quadrature nodes.
  const bool piecewise_const = u0.kind() == InitialCondition::Kind::Bump;
  std::vector<double> edges{0.0};
  for (double c : breaks)
    if (c > 0.0 && c < params.length) edges.push_back(c);
  edges.push_back(params.length);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double x : grid) {
    check_interval(x, params.length, "grid point");
    double total = 0.0;
    const double per_panel_tol = 1e-8 / static_cast<double>(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double a = edges[i], b = edges[i + 1];
      const double uc = piecewise_const ? u0(0.5 * (a + b)) : 0.0;
      if (piecewise_const && uc == 0.0) continue;
      auto f = [&](double y) {
        const double k = evaluate_kernel(kind, t, x, y, params, n);
        return piecewise_const ? uc * k : u0(y) * k;
      };
      auto r = quad::simpson_adaptive(f, a, b, per_panel_tol);
      if (!r.converged)
        throw QuadratureError("semigroup_apply: quadrature did not converge", r.error_estimate);
      total += r.value;
    }
    // negatives can only be quadrature/truncation noise near a pinned boundary
    out.push_back(total < 0.0 && total > -1e-10 ? 0.0 : total);
  }
  return out;
}

}  // namespace spde
