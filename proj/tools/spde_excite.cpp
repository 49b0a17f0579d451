// spde-excite: configuration-driven experiment harness.
//
//   spde-excite <mode> --config <path> [--seed N] [--out DIR] [--workers N]
//               [key=value overrides...]
//
// Modes: kernels-check | renewal | pam-validate | sweep.
// Exit codes: 0 ok, 2 config error, 3 check failure, 4 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spde/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read config file " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void print_checks(const std::vector<spde::CheckResult>& checks) {
  for (const auto& c : checks)
    std::printf("  %-34s %-4s worst=%.3e threshold=%.3e %s\n", c.name.c_str(),
                c.pass ? "ok" : "FAIL", c.worst, c.threshold,
                c.detail.empty() ? "" : ("@ " + c.detail).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic heat equation excitation-index laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int workers = -1;
  bool seed_set = false, out_set = false, workers_set = false;
  std::vector<std::string> overrides;

  for (const char* name : {"kernels-check", "renewal", "pam-validate", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file");
    sub->add_option("--seed", seed, "master seed (wins over config)")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--out", out_dir, "output directory")
        ->each([&](const std::string&) { out_set = true; });
    sub->add_option("--workers", workers, "worker threads (0 = auto)")
        ->each([&](const std::string&) { workers_set = true; });
    sub->add_option("overrides", overrides, "key=value config overrides");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string mode_name = app.get_subcommands().front()->get_name();

  spde::ExperimentConfig cfg;
  std::vector<std::string> warnings;
  try {
    std::string text;
    if (!config_path.empty()) text = read_file(config_path);
    cfg = spde::parse_config(text);
    // subcommand and flags win over the config file
    std::vector<std::string> all_overrides{"mode=" + mode_name};
    if (seed_set) all_overrides.push_back("seed=" + std::to_string(seed));
    if (out_set) all_overrides.push_back("out_dir=" + out_dir);
    if (workers_set) all_overrides.push_back("workers=" + std::to_string(workers));
    all_overrides.insert(all_overrides.end(), overrides.begin(), overrides.end());
    spde::apply_overrides(cfg, all_overrides);
    warnings = spde::validate_config(cfg);
  } catch (const spde::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return spde::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return spde::kExitConfigError;
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  try {
    switch (cfg.mode) {
      case spde::ExperimentMode::KernelsCheck: {
        const auto rep = spde::run_kernels_check(cfg);
        const auto path = spde::write_validation_json(cfg, rep);
        print_checks(rep.checks);
        std::printf("certified neumann/gaussian ratio (t <= %.3g): %.6g\n", rep.ratio_horizon,
                    rep.certified_neumann_ratio);
        std::printf("%s -> %s\n", rep.pass ? "PASS" : "FAIL", path.c_str());
        return rep.pass ? spde::kExitOk : spde::kExitCheckFailure;
      }
      case spde::ExperimentMode::Renewal: {
        const auto rep = spde::run_renewal_check(cfg);
        const auto path = spde::write_validation_json(cfg, rep);
        for (const auto& row : rep.solver_rows)
          std::printf("  solver k=%-8.4g max rel error vs closed form: %.3e\n", row.k,
                      row.max_rel_error);
        std::printf("  exponent fit: %.4f +- %.4f (target %.2f +- %.2f)\n",
                    rep.exponent.fit.slope, rep.exponent.fit.slope_stderr, rep.exponent_target,
                    rep.exponent_tolerance);
        std::printf("%s -> %s\n", rep.pass ? "PASS" : "FAIL", path.c_str());
        return rep.pass ? spde::kExitOk : spde::kExitCheckFailure;
      }
      case spde::ExperimentMode::PamValidate: {
        const auto rep = spde::run_pam_validate(cfg);
        const auto path = spde::write_validation_json(cfg, rep);
        std::printf("  estimate %.6g +- %.3g, oracle %.6g, z = %.2f, rel = %.3g%%\n",
                    rep.estimate, rep.ci_half, rep.oracle, rep.z_score, 100.0 * rep.rel_error);
        std::printf("%s -> %s\n", rep.pass ? "PASS" : "FAIL", path.c_str());
        return rep.pass ? spde::kExitOk : spde::kExitCheckFailure;
      }
      case spde::ExperimentMode::Sweep: {
        const auto res = spde::run_sweep(cfg);
        for (const auto& p : res.sweep.points)
          std::printf("  lambda=%-8.4g log E=%-10.4g (+-%.3g) n_eff=%lld\n", p.lambda,
                      p.log_energy, p.log_energy_ci, p.n_effective);
        if (res.sweep.fit)
          std::printf("  slope of log log E vs log lambda: %.4f +- %.4f over [%g, %g]\n",
                      res.sweep.fit->slope, res.sweep.fit->slope_stderr,
                      res.sweep.lambda_fit_min, res.sweep.lambda_fit_max);
        else
          std::printf("  %s\n", res.sweep.status.c_str());
        std::printf("wrote %s, %s, %s\n", res.csv_path.c_str(), res.summary_path.c_str(),
                    res.svg_path.c_str());
        return spde::kExitOk;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return spde::kExitRuntimeFailure;
  }
  return spde::kExitOk;
}
