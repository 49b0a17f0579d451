// Python bindings for the main operations: heat kernels, the renewal solver,
// the PAM moment oracle, path simulation and Monte Carlo moment estimation.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spde/estimators.hpp"
#include "spde/kernels.hpp"
#include "spde/renewal.hpp"
#include "spde/rng.hpp"
#include "spde/sim.hpp"

namespace py = pybind11;
using namespace spde;

namespace {

KernelParams make_params(double length, double nu, double tol, int images) {
  KernelParams p;
  p.length = length;
  p.nu = nu;
  p.tol = tol;
  p.images = images;
  p.validate();
  return p;
}

KernelKind parse_kind(const std::string& kind) {
  if (kind == "gaussian") return KernelKind::Gaussian;
  if (kind == "dirichlet") return KernelKind::Dirichlet;
  if (kind == "neumann") return KernelKind::Neumann;
  throw std::invalid_argument("kind must be gaussian | dirichlet | neumann");
}

InitialCondition make_u0(const std::string& kind, double height, double center,
                         double halfwidth) {
  return kind == "flat" ? InitialCondition::flat(height)
                        : InitialCondition::bump(center, halfwidth, height);
}

}  // namespace

PYBIND11_MODULE(spdelab, m) {
  m.doc() =
      "Stochastic heat equation laboratory: interval heat kernels by the method "
      "of images, a weakly singular renewal solver, and Monte Carlo "
      "second-moment estimation for noise-excitation studies";

  py::class_<SimConfig>(m, "SimConfig")
      .def_readonly("nx", &SimConfig::nx)
      .def_readonly("dt", &SimConfig::dt)
      .def_readonly("t_end", &SimConfig::t_end)
      .def_readonly("lam", &SimConfig::lambda)
      .def_property_readonly("dx", &SimConfig::dx);

  m.def(
      "sim_config",
      [](double length, double nu, const std::string& bc, const std::string& u0,
         double u0_height, double u0_center, double u0_halfwidth, int nx, double dt,
         double t_end, double lam, double sigma_c, double sigma_delta) {
        SimConfig cfg;
        cfg.params = make_params(length, nu, 1e-12, 0);
        cfg.bc = bc == "neumann" ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
        cfg.sigma = sigma_delta > 0.0 ? NoiseCoefficient::sine_perturbed(sigma_c, sigma_delta)
                                      : NoiseCoefficient::linear(sigma_c);
        cfg.u0 = make_u0(u0, u0_height, u0_center, u0_halfwidth);
        cfg.nx = nx;
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.lambda = lam;
        cfg.validate();
        return cfg;
      },
      py::arg("length") = 1.0, py::arg("nu") = 0.5, py::arg("bc") = "dirichlet",
      py::arg("u0") = "bump", py::arg("u0_height") = 1.0, py::arg("u0_center") = 0.5,
      py::arg("u0_halfwidth") = 0.2, py::arg("nx") = 255, py::arg("dt") = 1e-5,
      py::arg("t_end") = 0.02, py::arg("lam") = 1.0, py::arg("sigma_c") = 1.0,
      py::arg("sigma_delta") = 0.0,
      "Validated simulation config (CFL checked)");

  m.def(
      "gaussian_kernel",
      [](double t, double x, double y, double nu) { return gaussian_kernel(t, x, y, nu); },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("nu") = 1.0);

  m.def(
      "dirichlet_kernel",
      [](double t, double x, double y, double length, double nu, double tol, int images) {
        return dirichlet_kernel(t, x, y, make_params(length, nu, tol, images));
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("length") = 1.0, py::arg("nu") = 1.0,
      py::arg("tol") = 1e-12, py::arg("images") = 0);

  m.def(
      "neumann_kernel",
      [](double t, double x, double y, double length, double nu, double tol, int images) {
        return neumann_kernel(t, x, y, make_params(length, nu, tol, images));
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("length") = 1.0, py::arg("nu") = 1.0,
      py::arg("tol") = 1e-12, py::arg("images") = 0);

  m.def(
      "image_truncation_error",
      [](double t, int n_images, double length, double nu) {
        return image_truncation_error(t, make_params(length, nu, 1e-12, 0), n_images);
      },
      py::arg("t"), py::arg("n_images"), py::arg("length") = 1.0, py::arg("nu") = 1.0);

  m.def("dirichlet_lower_factor", &dirichlet_lower_factor, py::arg("t"), py::arg("eps"),
        py::arg("nu") = 1.0);

  m.def(
      "kernel_mass",
      [](const std::string& kind, double t, double x, double length, double nu) {
        return kernel_mass(parse_kind(kind), t, x, make_params(length, nu, 1e-12, 0));
      },
      py::arg("kind"), py::arg("t"), py::arg("x"), py::arg("length") = 1.0,
      py::arg("nu") = 1.0);

  m.def(
      "semigroup_apply",
      [](const std::string& kind, const std::string& u0, double t, std::vector<double> grid,
         double u0_height, double u0_center, double u0_halfwidth, double length, double nu) {
        return semigroup_apply(parse_kind(kind), make_u0(u0, u0_height, u0_center, u0_halfwidth),
                               t, make_params(length, nu, 1e-12, 0), grid);
      },
      py::arg("kind"), py::arg("u0"), py::arg("t"), py::arg("grid"),
      py::arg("u0_height") = 1.0, py::arg("u0_center") = 0.5, py::arg("u0_halfwidth") = 0.2,
      py::arg("length") = 1.0, py::arg("nu") = 1.0);

  m.def(
      "solve_renewal",
      [](double a, double b, double k, double T, int n) {
        RenewalSpec spec{a, b, k, T, n};
        const auto g = solve_renewal(spec);
        py::dict d;
        d["t"] = g.t;
        d["log_f"] = g.log_f;
        d["log_gap_at_T"] = g.log_gap_at_T;
        return d;
      },
      py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("k") = 1.0, py::arg("T") = 1.0,
      py::arg("n") = 4096);

  m.def(
      "renewal_closed_form",
      [](double a, double c, double t) {
        const auto v = renewal_closed_form(a, c, t);
        return py::make_tuple(v.value, v.log_value);
      },
      py::arg("a"), py::arg("c"), py::arg("t"),
      "Returns (value, log_value) of a e^{c^2 pi t} erfc(-c sqrt(pi t))");

  m.def(
      "pam_second_moment",
      [](double lam, double t, double nu) {
        const auto v = pam_second_moment(lam, t, nu);
        return py::make_tuple(v.value, v.log_value);
      },
      py::arg("lam"), py::arg("t"), py::arg("nu") = 0.5);

  m.def(
      "growth_exponent",
      [](std::vector<double> k, std::vector<double> log_f) {
        const auto e = growth_exponent(k, log_f);
        py::dict d;
        d["slope"] = e.fit.slope;
        d["intercept"] = e.fit.intercept;
        d["slope_stderr"] = e.fit.slope_stderr;
        d["residual_stderr"] = e.fit.residual_stderr;
        d["rejected_k"] = e.rejected_k;
        return d;
      },
      py::arg("k"), py::arg("log_f"));

  m.def("derive_replica_seed", &derive_replica_seed, py::arg("master"), py::arg("index"));

  m.def(
      "simulate_path",
      [](const SimConfig& cfg, std::uint64_t seed, std::vector<double> output_times) {
        const auto snaps = simulate_path(cfg, seed, output_times);
        py::list out;
        for (const auto& s : snaps) out.append(py::make_tuple(s.time, s.u));
        return out;
      },
      py::arg("config"), py::arg("seed"), py::arg("output_times"),
      "Deterministic in (config, seed); returns [(time, values), ...]");

  m.def(
      "second_moment_field",
      [](const SimConfig& cfg, double t, long long n_replicas, std::uint64_t seed, int workers) {
        FieldMoment fm;
        {
          py::gil_scoped_release release;
          fm = second_moment_field(cfg, t, n_replicas, seed, workers);
        }
        py::dict d;
        d["x"] = fm.x;
        d["mean_sq"] = fm.mean_sq;
        d["ci_half"] = fm.ci_half;
        d["n"] = fm.n;
        d["n_failed"] = fm.n_failed;
        d["reliable"] = fm.reliable;
        return d;
      },
      py::arg("config"), py::arg("t"), py::arg("n_replicas"), py::arg("seed"),
      py::arg("workers") = 0);
}
