#include "spde/sim.hpp"

#include <cmath>
#include <cstdio>

namespace spde {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

NoiseCoefficient NoiseCoefficient::linear(double c) {
  NoiseCoefficient s;
  s.kind = Kind::Linear;
  s.c = c;
  s.validate();
  return s;
}

NoiseCoefficient NoiseCoefficient::sine_perturbed(double c, double delta) {
  NoiseCoefficient s;
  s.kind = Kind::SinePerturbed;
  s.c = c;
  s.delta = delta;
  s.validate();
  return s;
}

void NoiseCoefficient::validate() const {
  require(std::isfinite(c) && c > 0.0, "NoiseCoefficient: c must be > 0");
  require(delta >= 0.0 && delta < 1.0, "NoiseCoefficient: delta must be in [0, 1)");
}

std::size_t SimConfig::step_count() const {
  const double raw = t_end / dt;
  const auto n = static_cast<std::size_t>(std::llround(raw));
  require(n >= 1 && std::abs(raw - static_cast<double>(n)) < 1e-6,
          "SimConfig: t_end must be an integral number of steps");
  return n;
}

std::vector<std::string> SimConfig::validate() const {
  params.validate();
  sigma.validate();
  u0.validate_on(params.length);
  require(nx >= 1, "SimConfig: nx must be >= 1");
  require(std::isfinite(dt) && dt > 0.0, "SimConfig: dt must be > 0");
  require(t_end >= dt, "SimConfig: t_end must be >= dt");
  require(lambda >= 0.0, "SimConfig: lambda must be >= 0");
  const double h = dx();
  const double cfl = params.nu * dt / (h * h);
  if (cfl > 0.25 + 1e-12) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "SimConfig: CFL violation: nu*dt/dx^2 = %.6g > 1/4 (dt = %.6g, nx = %d, "
                  "dx = %.6g; require dt <= %.6g)",
                  cfl, dt, nx, h, 0.25 * h * h / params.nu);
    throw std::invalid_argument(buf);
  }
  std::vector<std::string> warnings;
  if (lambda * lambda * h > 0.2) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "lambda^2*dx = %.4g > 0.2: grid does not resolve the noise correlation "
                  "length; moment growth will degrade toward lambda^2",
                  lambda * lambda * h);
    warnings.emplace_back(buf);
  }
  return warnings;
}

void noise_increments(GaussianRng& rng, int nx, double dt, double dx, std::span<double> out) {
  require(dt > 0.0 && dx > 0.0, "noise_increments: dt and dx must be > 0");
  require(out.size() >= static_cast<std::size_t>(nx), "noise_increments: output too small");
  const double scale = std::sqrt(dt / dx);
  for (int j = 0; j < nx; ++j) out[j] = scale * rng.next_normal();
}

FieldSnapshot initial_snapshot(const SimConfig& cfg) {
  FieldSnapshot s;
  s.time = 0.0;
  const int total = cfg.nx + 2;
  const double h = cfg.dx();
  s.u.resize(total);
  for (int j = 0; j < total; ++j) s.u[j] = cfg.u0(j * h);
  if (cfg.bc == BoundaryCondition::Dirichlet) {
    s.u.front() = 0.0;
    s.u.back() = 0.0;
  }
  return s;
}

namespace {

struct LinearSigma {
  double c;
  double operator()(double u) const { return c * u; }
};
struct SineSigma {
  double c, delta;
  double operator()(double u) const { return c * u * (1.0 + delta * std::sin(u)); }
};

// One EM step over the nx+2 field. Returns the sum of the new state for the
// finiteness check (any NaN/Inf poisons the sum).
template <bool kDirichlet, class Sigma>
double em_step(const double* u, double* un, int nx, double r, double noise_scale,
               const Sigma& sigma, GaussianRng& rng) {
  double acc = 0.0;
  if constexpr (kDirichlet) {
    un[0] = 0.0;
    un[nx + 1] = 0.0;
  } else {
    un[0] = u[0] + r * (u[1] - u[0]);
    un[nx + 1] = u[nx + 1] + r * (u[nx] - u[nx + 1]);
    acc += un[0] + un[nx + 1];
  }
  for (int j = 1; j <= nx; ++j) {
    const double uj = u[j];
    const double v =
        uj + r * (u[j + 1] - 2.0 * uj + u[j - 1]) + noise_scale * sigma(uj) * rng.next_normal();
    un[j] = v;
    acc += v;
  }
  return acc;
}

[[noreturn]] void fail_nonfinite(double t) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "path hit a non-finite value at t = %.9g", t);
  throw PathFailure(t, buf);
}

}  // namespace

void step(FieldSnapshot& state, const SimConfig& cfg, GaussianRng& rng) {
  const double h = cfg.dx();
  const double r = cfg.params.nu * cfg.dt / (h * h);
  const double ns = cfg.lambda * std::sqrt(cfg.dt / h);
  require(state.u.size() == static_cast<std::size_t>(cfg.nx + 2),
          "step: state size does not match nx");
  static thread_local std::vector<double> scratch;
  scratch.resize(state.u.size());
  double sum;
  if (cfg.bc == BoundaryCondition::Dirichlet) {
    if (cfg.sigma.kind == NoiseCoefficient::Kind::Linear)
      sum = em_step<true>(state.u.data(), scratch.data(), cfg.nx, r, ns,
                          LinearSigma{cfg.sigma.c}, rng);
    else
      sum = em_step<true>(state.u.data(), scratch.data(), cfg.nx, r, ns,
                          SineSigma{cfg.sigma.c, cfg.sigma.delta}, rng);
  } else {
    if (cfg.sigma.kind == NoiseCoefficient::Kind::Linear)
      sum = em_step<false>(state.u.data(), scratch.data(), cfg.nx, r, ns,
                           LinearSigma{cfg.sigma.c}, rng);
    else
      sum = em_step<false>(state.u.data(), scratch.data(), cfg.nx, r, ns,
                           SineSigma{cfg.sigma.c, cfg.sigma.delta}, rng);
  }
  state.u.swap(scratch);
  state.time += cfg.dt;
  if (!std::isfinite(sum)) fail_nonfinite(state.time);
}

PathRunner::PathRunner(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const double h = cfg_.dx();
  r_ = cfg_.params.nu * cfg_.dt / (h * h);
  noise_scale_ = cfg_.lambda * std::sqrt(cfg_.dt / h);
  u_.resize(cfg_.nx + 2);
  scratch_.resize(cfg_.nx + 2);
}

template <bool kDirichlet, class Sigma>
void PathRunner::advance(GaussianRng& rng, std::size_t n_steps, const Sigma& sigma) {
  double* u = u_.data();
  double* un = scratch_.data();
  const int nx = cfg_.nx;
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double sum = em_step<kDirichlet>(u, un, nx, r_, noise_scale_, sigma, rng);
    std::swap(u, un);
    if (!std::isfinite(sum)) {
      if (u != u_.data()) u_.swap(scratch_);
      fail_nonfinite(static_cast<double>(s + 1) * cfg_.dt);
    }
  }
  if (u != u_.data()) u_.swap(scratch_);
}

const std::vector<double>& PathRunner::run(std::uint64_t seed, std::size_t n_steps) {
  const int total = cfg_.nx + 2;
  const double h = cfg_.dx();
  for (int j = 0; j < total; ++j) u_[j] = cfg_.u0(j * h);
  if (cfg_.bc == BoundaryCondition::Dirichlet) {
    u_.front() = 0.0;
    u_.back() = 0.0;
  }
  GaussianRng rng(seed);
  const bool dirich = cfg_.bc == BoundaryCondition::Dirichlet;
  if (cfg_.sigma.kind == NoiseCoefficient::Kind::Linear) {
    const LinearSigma sg{cfg_.sigma.c};
    dirich ? advance<true>(rng, n_steps, sg) : advance<false>(rng, n_steps, sg);
  } else {
    const SineSigma sg{cfg_.sigma.c, cfg_.sigma.delta};
    dirich ? advance<true>(rng, n_steps, sg) : advance<false>(rng, n_steps, sg);
  }
  return u_;
}

std::vector<FieldSnapshot> simulate_path(const SimConfig& cfg, std::uint64_t seed,
                                         std::span<const double> output_times) {
  cfg.validate();
  const std::size_t n_steps = cfg.step_count();
  std::vector<std::size_t> out_steps;
  out_steps.reserve(output_times.size());
  for (double t : output_times) {
    require(t >= 0.0 && t <= cfg.t_end + 1e-12, "simulate_path: output time outside [0, t_end]");
    const double raw = t / cfg.dt;
    const auto s = static_cast<std::size_t>(std::llround(raw));
    require(std::abs(raw - static_cast<double>(s)) < 1e-6,
            "simulate_path: output times must be multiples of dt");
    require(s <= n_steps, "simulate_path: output time beyond t_end");
    out_steps.push_back(s);
  }
  for (std::size_t i = 1; i < out_steps.size(); ++i)
    require(out_steps[i - 1] < out_steps[i], "simulate_path: output times must increase");

  FieldSnapshot state = initial_snapshot(cfg);
  GaussianRng rng(seed);
  std::vector<FieldSnapshot> out;
  out.reserve(out_steps.size());
  std::size_t cur = 0;
  for (std::size_t target : out_steps) {
    while (cur < target) {
      step(state, cfg, rng);
      ++cur;
    }
    state.time = static_cast<double>(cur) * cfg.dt;
    out.push_back(state);
  }
  return out;
}

}  // namespace spde
