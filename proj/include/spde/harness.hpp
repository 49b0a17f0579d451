#pragma once
// Experiment harness: runs the validation suites and lambda sweeps described
// by an ExperimentConfig and writes CSV / JSON / SVG outputs.

#include <string>
#include <vector>

#include "spde/config.hpp"
#include "spde/estimators.hpp"
#include "spde/renewal.hpp"

namespace spde {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitCheckFailure = 3,
  kExitRuntimeFailure = 4,
};

struct CheckResult {
  std::string name;
  double worst = 0.0;      ///< worst-case slack / residual observed
  double threshold = 0.0;  ///< pass when worst <= threshold
  bool pass = false;
  std::string detail;      ///< where the worst case occurred
};

struct KernelsCheckReport {
  std::vector<CheckResult> checks;
  double certified_neumann_ratio = 0.0;  ///< empirical c_T on the test grid
  double ratio_horizon = 0.0;            ///< the T the ratio was certified for
  bool pass = false;
};

struct RenewalCheckReport {
  struct SolverRow {
    double k;
    double max_rel_error;
  };
  std::vector<SolverRow> solver_rows;  ///< solver vs closed form
  double solver_tolerance = 0.0;
  ExponentFit exponent;                ///< closed-form family over the k grid
  double exponent_target = 2.0;
  double exponent_tolerance = 0.02;
  bool pass = false;
};

struct PamValidateReport {
  double lambda = 0.0;
  double t = 0.0;
  double estimate = 0.0;
  double ci_half = 0.0;
  double oracle = 0.0;
  double z_score = 0.0;      ///< |estimate - oracle| / ci_half
  double rel_error = 0.0;
  long long n_effective = 0;
  long long n_failed = 0;
  bool pass = false;
};

KernelsCheckReport run_kernels_check(const ExperimentConfig& cfg);
RenewalCheckReport run_renewal_check(const ExperimentConfig& cfg);
PamValidateReport run_pam_validate(const ExperimentConfig& cfg);

struct SweepRunResult {
  SweepResult sweep;
  std::string csv_path, summary_path, svg_path;
};

/// Runs the sweep over the lambda grid and writes sweep.csv, summary.json and
/// loglog.svg into cfg.out_dir. Deterministic in (config, seed) for any
/// worker count.
SweepRunResult run_sweep(const ExperimentConfig& cfg);

/// Writes validation.json for the given mode's report into cfg.out_dir;
/// returns the file path.
std::string write_validation_json(const ExperimentConfig& cfg, const KernelsCheckReport& r);
std::string write_validation_json(const ExperimentConfig& cfg, const RenewalCheckReport& r);
std::string write_validation_json(const ExperimentConfig& cfg, const PamValidateReport& r);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

}  // namespace spde
