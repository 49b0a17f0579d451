#pragma once
// Weakly singular Volterra renewal equation
//     f(t) = a + b k * int_0^t f(s) / sqrt(t - s) ds
// solved by product integration, its erfc closed form, and the growth
// exponent of f in the parameter k.

#include <cstdint>
#include <span>
#include <vector>

#include "spde/linfit.hpp"

namespace spde {

struct RenewalSpec {
  double a = 1.0;  ///< constant term, > 0
  double b = 1.0;  ///< kernel coefficient, > 0
  double k = 1.0;  ///< scaling parameter, > 0
  double T = 1.0;  ///< horizon, > 0
  int n = 4096;    ///< grid steps, >= 2

  void validate() const;
};

/// Solution values on the uniform grid t_i = i T / n, stored in log form so
/// super-exponential growth stays representable.
struct GridFunction {
  std::vector<double> t;
  std::vector<double> log_f;
  /// a-posteriori |log f_n(T) - log closed_form(T)|; large values flag a grid
  /// too coarse for the requested b*k.
  double log_gap_at_T = 0.0;

  double value(std::size_t i) const;  ///< exp(log_f[i]); +inf past double range
  std::size_t size() const { return t.size(); }
};

/// Product-integration solution (piecewise-linear interpolant, exact moments
/// of the (t-s)^{-1/2} kernel; sqrt-shaped interpolant on the first panel to
/// match the solution's cusp at t = 0). Values are nondecreasing in t, k, a.
/// Throws std::runtime_error when the grid is too coarse for b*k.
GridFunction solve_renewal(const RenewalSpec& spec);

struct LogValue {
  double value;      ///< may overflow to +inf; log_value stays finite
  double log_value;
};

/// Closed form a * exp(c^2 pi t) * erfc(-c sqrt(pi t)), the resolvent of the
/// kernel; evaluated stably through log(2 - erfc(z)).
LogValue renewal_closed_form(double a, double c, double t);

/// Exact second moment of the whole-line parabolic Anderson model with flat
/// unit initial data: E|u_t(x)|^2 = exp(lambda^4 t/(8 nu)) erfc(-lambda^2 sqrt(t/(8 nu))).
LogValue pam_second_moment(double lambda, double t, double nu);

struct ExponentFit {
  LinearFit fit;                       ///< slope of log log f against log k
  std::vector<double> rejected_k;      ///< points with f <= 1 (log log undefined)
};

/// Least-squares growth exponent from samples (k, log f(t; k)).
/// Points with log f <= 0 are rejected; fewer than 3 survivors throws.
ExponentFit growth_exponent(std::span<const double> k, std::span<const double> log_f);

}  // namespace spde
