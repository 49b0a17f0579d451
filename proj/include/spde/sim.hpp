#pragma once
// Finite-difference Euler-Maruyama discretization of the stochastic heat
// equation du = nu u_xx dt + lambda sigma(u) dW on (0, L) with Dirichlet or
// Neumann boundary conditions and discretized space-time white noise.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/initial_condition.hpp"
#include "spde/kernels.hpp"
#include "spde/rng.hpp"

namespace spde {

enum class BoundaryCondition { Dirichlet, Neumann };

/// Multiplicative noise coefficient with recorded linear-growth bounds
/// l = inf |sigma(u)/u|, Lbound = sup |sigma(u)/u| (both finite, positive).
struct NoiseCoefficient {
  enum class Kind { Linear, SinePerturbed };
  Kind kind = Kind::Linear;
  double c = 1.0;      ///< overall scale, > 0
  double delta = 0.0;  ///< sine perturbation amplitude, 0 <= delta < 1

  static NoiseCoefficient linear(double c);
  static NoiseCoefficient sine_perturbed(double c, double delta);

  double operator()(double u) const {
    return kind == Kind::Linear ? c * u : c * u * (1.0 + delta * std::sin(u));
  }
  double lower_bound() const { return c * (1.0 - delta); }
  double upper_bound() const { return c * (1.0 + delta); }
  void validate() const;
};

struct SimConfig {
  KernelParams params;                      ///< supplies L and nu
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  NoiseCoefficient sigma;
  InitialCondition u0 = InitialCondition::flat(1.0);
  int nx = 255;        ///< interior grid points; dx = L/(nx+1)
  double dt = 1e-5;
  double t_end = 0.1;
  double lambda = 1.0;  ///< noise level

  double dx() const { return params.length / (nx + 1); }
  std::size_t step_count() const;  ///< t_end / dt, validated integral

  /// Throws std::invalid_argument on constraint violations (CFL
  /// nu dt/dx^2 <= 1/4, positivity, u0 support). Returns warnings
  /// (continuum-window check lambda^2 dx > 0.2) without failing.
  std::vector<std::string> validate() const;
};

struct FieldSnapshot {
  double time = 0.0;
  std::vector<double> u;  ///< nx+2 values including both boundary nodes
};

struct PathFailure : std::runtime_error {
  PathFailure(double t, const std::string& what) : std::runtime_error(what), time(t) {}
  double time;
};

/// Independent centered Gaussians with variance dt/dx (cell-averaged white
/// noise for the update u += lambda sigma(u) xi).
void noise_increments(GaussianRng& rng, int nx, double dt, double dx, std::span<double> out);

/// One explicit Euler-Maruyama step; interior update
///   u_j += nu dt/dx^2 (u_{j+1} - 2u_j + u_{j-1}) + lambda sigma(u_j) xi_j,
/// Dirichlet boundaries pinned to zero, Neumann via mass-conserving mirror
/// stencil. Throws PathFailure when the state leaves the finite range.
void step(FieldSnapshot& state, const SimConfig& cfg, GaussianRng& rng);

/// Initial snapshot: u0 sampled on the nx+2 grid (Dirichlet boundary nodes zeroed).
FieldSnapshot initial_snapshot(const SimConfig& cfg);

/// Full path, deterministic in (cfg, seed). output_times must be multiples of
/// dt inside [0, t_end]; snapshots are emitted in time order.
std::vector<FieldSnapshot> simulate_path(const SimConfig& cfg, std::uint64_t seed,
                                         std::span<const double> output_times);

/// Reusable single-path engine (avoids per-replica allocation).
class PathRunner {
 public:
  explicit PathRunner(const SimConfig& cfg);

  /// Runs from t=0 to step index `n_steps`; returns the final field
  /// (nx+2 values). Throws PathFailure on non-finite states.
  const std::vector<double>& run(std::uint64_t seed, std::size_t n_steps);

  const SimConfig& config() const { return cfg_; }

 private:
  template <bool kDirichlet, class Sigma>
  void advance(GaussianRng& rng, std::size_t n_steps, const Sigma& sigma);

  SimConfig cfg_;
  double r_;            // nu dt / dx^2
  double noise_scale_;  // lambda * sqrt(dt/dx)
  std::vector<double> u_, scratch_;
};

}  // namespace spde
