#pragma once
// Heat kernels on the whole line and on (0, L) via truncated method-of-images
// sums with a certified truncation bound, plus kernel mass and semigroup
// application by adaptive quadrature.

#include <span>
#include <vector>

#include "spde/initial_condition.hpp"

namespace spde {

struct KernelParams {
  double length = 1.0;  ///< interval length L
  double nu = 1.0;      ///< diffusion coefficient; the kernel is exp(-(x-y)^2/(4 nu t))/sqrt(4 pi nu t)
  double tol = 1e-12;   ///< image-series truncation tolerance (adaptive mode)
  int images = 0;       ///< fixed image count N >= 1; 0 selects adaptive truncation
  int min_images = 3;   ///< floor for the adaptive choice

  void validate() const;
};

enum class KernelKind { Gaussian, Dirichlet, Neumann };

/// Whole-line Gaussian heat kernel.
double gaussian_kernel(double t, double x, double y, double nu);

/// Dirichlet kernel on (0, L): sign-alternating image sum, zero on the boundary.
double dirichlet_kernel(double t, double x, double y, const KernelParams& params);

/// Neumann kernel on (0, L): sign-positive image sum, mass-conserving.
double neumann_kernel(double t, double x, double y, const KernelParams& params);

/// Rigorous upper bound on the absolute tail of either image series beyond
/// images |n| > N, uniform over x, y in [0, L]. Nonincreasing in N.
double image_truncation_error(double t, const KernelParams& params, int n_images);

/// Smallest N >= params.min_images with image_truncation_error <= params.tol
/// (or params.images when a fixed count was requested).
int required_images(double t, const KernelParams& params);

/// Comparison factor 1 - 2 exp(-eps^2/(nu t)); may be negative for large t.
double dirichlet_lower_factor(double t, double eps, double nu = 1.0);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  ///< |last refinement delta|
  bool converged = false;
};

/// Integral of the kernel over y in [0, L]. Neumann mass is 1; Dirichlet mass
/// lies in (0, 1). Throws QuadratureError on nonconvergence.
double kernel_mass(KernelKind kind, double t, double x, const KernelParams& params);
QuadratureResult kernel_mass_checked(KernelKind kind, double t, double x,
                                     const KernelParams& params);

/// (G u0)_t at each x of `grid`: integral of u0(y) * kernel(t, x, y) dy, with
/// quadrature panels split at the kinks of u0.
std::vector<double> semigroup_apply(KernelKind kind, const InitialCondition& u0, double t,
                                    const KernelParams& params, std::span<const double> grid);

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& msg, double achieved)
      : std::runtime_error(msg), achieved_error(achieved) {}
  double achieved_error;
};

namespace quad {
/// Composite Simpson with interval doubling until successive estimates differ
/// by less than tol (absolute). Evaluations are reused across refinements.
template <class F>
QuadratureResult simpson_adaptive(F&& f, double a, double b, double tol, int max_doublings = 16) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  int n = 8;  // initial panel count
  const double h0 = (b - a) / n;
  double trap = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) trap += f(a + i * h0);
  trap *= h0;
  double simpson_prev = 0.0;
  bool have_prev = false;
  double h = h0;
  for (int it = 0; it <= max_doublings; ++it) {
    double mid_sum = 0.0;
    const int m = n;  // midpoints to add
    for (int i = 0; i < m; ++i) mid_sum += f(a + (i + 0.5) * h);
    const double trap_fine = 0.5 * trap + 0.5 * h * mid_sum;
    const double simpson = (4.0 * trap_fine - trap) / 3.0;
    if (have_prev) {
      res.error_estimate = std::abs(simpson - simpson_prev);
      if (res.error_estimate < tol) {
        res.value = simpson;
        res.converged = true;
        return res;
      }
    }
    simpson_prev = simpson;
    have_prev = true;
    trap = trap_fine;
    n *= 2;
    h *= 0.5;
  }
  res.value = simpson_prev;
  return res;
}
}  // namespace quad

}  // namespace spde
