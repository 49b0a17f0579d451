#pragma once
// Line-oriented "key = value" experiment configs with bracketed sections,
// '#' comments, full validation diagnostics, and command-line overrides.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/sim.hpp"

namespace spde {

enum class ExperimentMode { KernelsCheck, Renewal, PamValidate, Sweep };

std::string to_string(ExperimentMode m);

struct ConfigDiagnostic {
  int line = 0;           ///< 1-based; 0 for cross-field constraints
  std::string key;
  std::string message;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<ConfigDiagnostic> diags);
  std::vector<ConfigDiagnostic> diagnostics;
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::Sweep;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int workers = 0;  ///< 0 = SPDE_WORKERS env or hardware concurrency

  // [kernel]
  double length = 1.0;
  double nu = 0.5;
  double kernel_tol = 1e-12;
  int images = 0;

  // [sim]
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int nx = 511;
  double dt = 0.0;  ///< 0 = CFL-maximal: t_end / ceil(t_end / (dx^2/(4 nu)))
  double t_end = 0.02;
  double lambda = 1.0;
  std::string sigma_kind = "linear";  ///< linear | sine
  double sigma_c = 1.0;
  double sigma_delta = 0.0;
  std::string u0_kind = "bump";  ///< bump | flat
  double u0_center = 0.5;
  double u0_halfwidth = 0.2;
  double u0_height = 1.0;
  long long replicas = 10000;
  double epsilon = -1.0;  ///< I_eps window; < 0 selects the default L/4

  // [sweep]
  double lambda_min = 2.0;
  double lambda_max = 6.0;
  int lambda_count = 5;
  std::string inject = "none";  ///< none | quartic (synthetic E = exp(lambda^4))

  // [renewal]
  double renewal_a = 1.0;
  double renewal_b = 1.0;
  double renewal_T = 1.0;
  int renewal_n = 4096;
  double k_min = 1e2;
  double k_max = 1e4;
  int k_count = 9;

  double epsilon_or_default() const { return epsilon < 0.0 ? 0.25 * length : epsilon; }
  double resolved_dt() const;
  std::vector<double> lambda_grid() const;  ///< geometric
  std::vector<double> k_grid() const;       ///< geometric

  SimConfig to_sim_config() const;  ///< throws ConfigError on constraint violations
  NoiseCoefficient noise_coefficient() const;
  InitialCondition initial_condition() const;

  /// Canonical "section.key = value" dump of the effective config.
  std::string canonical_dump() const;
  /// FNV-1a 64 over the canonical dump, as 16 hex digits.
  std::string hash() const;
  /// Worker count after the SPDE_WORKERS fallback and hardware default.
  int resolved_workers() const;
};

/// Parses config text. All keys optional; unknown keys get a did-you-mean
/// suggestion. Aggregates every diagnostic before throwing ConfigError.
ExperimentConfig parse_config(const std::string& text);

/// Applies "key=value" or "section.key=value" overrides (command line wins).
void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides);

/// Cross-field validation shared by parse and overrides: CFL bound, grids,
/// sigma/u0 constraints. Returns warnings; throws ConfigError on violations.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

}  // namespace spde
