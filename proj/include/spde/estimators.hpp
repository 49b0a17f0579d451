#pragma once
// Monte Carlo estimation of E|u_t(x)|^2, the L^2 energy, field extrema, and
// the excitation-index fit over a lambda sweep. Results are deterministic in
// (config, master seed) for any worker count: replicas are partitioned into
// fixed chunks whose partial moments merge in chunk order.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spde/linfit.hpp"
#include "spde/sim.hpp"

namespace spde {

/// Streaming mean/variance (Welford accumulation, Chan merge).
struct StreamingMoments {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const StreamingMoments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double d = o.mean - mean;
    const double total = static_cast<double>(n + o.n);
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  /// 95% normal-approximation confidence half-width of the mean.
  double ci_half() const;
};

struct FieldMoment {
  std::vector<double> x;         ///< grid incl. boundary nodes
  std::vector<double> mean_sq;   ///< estimate of E|u_t(x_j)|^2
  std::vector<double> ci_half;   ///< per-point 95% half-widths
  long long n = 0;               ///< requested replicas
  long long n_failed = 0;        ///< non-finite paths (excluded, reported)
  bool reliable = true;          ///< false when n_failed > 1% of n

  long long n_effective() const { return n - n_failed; }
};

struct EnergyEstimate {
  double value = 0.0;    ///< E_t = sqrt(E ||u_t||^2)
  double ci_half = 0.0;  ///< half-width propagated to the sqrt
  double log_value() const;
  double log_ci_half() const;  ///< half-width of log E
};

struct Extrema {
  double inf = 0.0;        ///< I: min over all grid points
  double sup = 0.0;        ///< S: max over all grid points
  double inf_eps = 0.0;    ///< I_eps: min over [eps, L-eps]
  double sup_ci = 0.0;     ///< half-width at the argmax point
};

/// Everything one lambda point produces; `energy` uses per-replica ||u||^2
/// accumulation (honest correlation-free confidence interval).
struct MomentSummary {
  FieldMoment field;
  EnergyEstimate energy;
  StreamingMoments energy_sq;  ///< raw ||u_t||^2 moments across replicas
};

/// Per-grid-point second moments at time t over n independent replicas.
FieldMoment second_moment_field(const SimConfig& cfg, double t, long long n_replicas,
                                std::uint64_t master_seed, int workers = 0);

/// Field moments plus the per-replica energy accumulation in one pass.
MomentSummary estimate_moments(const SimConfig& cfg, double t, long long n_replicas,
                               std::uint64_t master_seed, int workers = 0);

/// sqrt(sum_j estimate_j dx) with trapezoid boundary weights; uncertainty
/// propagated from the per-point half-widths treated as independent.
EnergyEstimate energy_from_field(const FieldMoment& fm, double dx);

/// (I, S, I_eps) of the estimated field; 0 <= eps < L/2.
Extrema field_extrema(const FieldMoment& fm, double eps, double L);

struct SweepPoint {
  double lambda = 0.0;
  double log_energy = 0.0;
  double log_energy_ci = 0.0;
  double inf = 0.0, sup = 0.0, inf_eps = 0.0;
  double sup_ci = 0.0;
  long long n_effective = 0;
  bool energy_defined = true;   ///< false when the estimate was nonpositive
};

struct DroppedPoint {
  double lambda;
  std::string reason;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<LinearFit> fit;        ///< slope of log log E vs log lambda
  std::vector<DroppedPoint> dropped;   ///< window rule or log E <= 0
  double lambda_fit_min = 0.0, lambda_fit_max = 0.0;  ///< fit window actually used
  std::string status;                  ///< "ok" or reason the slope is undefined
};

/// OLS fit of log log E against log lambda. Drops points with
/// lambda^2 dx > 0.2 (outside the continuum window) and points with
/// log E <= 0; requires >= 3 survivors for a defined slope.
SweepResult fit_excitation_index(const std::vector<SweepPoint>& points, double dx);

}  // namespace spde
