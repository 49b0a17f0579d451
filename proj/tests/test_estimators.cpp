#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spde/estimators.hpp"
#include "spde/kernels.hpp"
#include "spde/renewal.hpp"

using namespace spde;
using doctest::Approx;

namespace {

SimConfig small_config(BoundaryCondition bc, double lambda) {
  SimConfig cfg;
  cfg.params.length = 1.0;
  cfg.params.nu = 0.5;
  cfg.bc = bc;
  cfg.sigma = NoiseCoefficient::linear(1.0);
  cfg.u0 = bc == BoundaryCondition::Neumann ? InitialCondition::flat(1.0)
                                            : InitialCondition::bump(0.5, 0.2, 1.0);
  cfg.nx = 63;
  cfg.dt = 5e-5;
  cfg.t_end = 0.01;
  cfg.lambda = lambda;
  return cfg;
}

}  // namespace

TEST_CASE("streaming moments: welford matches two-pass, merge is exact") {
  std::vector<double> xs;
  GaussianRng rng(5);
  for (int i = 0; i < 1000; ++i) xs.push_back(3.0 + 2.0 * rng.next_normal());
  StreamingMoments all;
  for (double x : xs) all.add(x);
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (xs.size() - 1);
  CHECK(all.mean == Approx(mean).epsilon(1e-12));
  CHECK(all.variance() == Approx(var).epsilon(1e-12));
  // chunked merge gives the same result for any partition
  StreamingMoments a, b, c;
  for (int i = 0; i < 321; ++i) a.add(xs[i]);
  for (int i = 321; i < 700; ++i) b.add(xs[i]);
  for (int i = 700; i < 1000; ++i) c.add(xs[i]);
  a.merge(b);
  a.merge(c);
  CHECK(a.n == all.n);
  CHECK(a.mean == Approx(all.mean).epsilon(1e-13));
  CHECK(a.variance() == Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("lambda=0 field equals the deterministic solution with zero width") {
  auto cfg = small_config(BoundaryCondition::Dirichlet, 0.0);
  const auto fm = second_moment_field(cfg, cfg.t_end, 16, 99, 2);
  std::vector<double> xs(fm.x.begin(), fm.x.end());
  const auto exact = semigroup_apply(KernelKind::Dirichlet, cfg.u0, cfg.t_end, cfg.params, xs);
  for (std::size_t j = 0; j < fm.mean_sq.size(); ++j) {
    CHECK(fm.ci_half[j] == 0.0);  // all replicas identical
    // nx=63 with a sampled top-hat: discretization error O(dx), not noise
    CHECK(fm.mean_sq[j] == Approx(exact[j] * exact[j]).epsilon(0.3).scale(1e-4));
  }
  CHECK(fm.n_failed == 0);
  CHECK(fm.reliable);
}

TEST_CASE("estimates are deterministic in (config, seed) for any worker count") {
  auto cfg = small_config(BoundaryCondition::Neumann, 1.5);
  const auto one = estimate_moments(cfg, cfg.t_end, 200, 77, 1);
  const auto eight = estimate_moments(cfg, cfg.t_end, 200, 77, 8);
  CHECK(one.field.mean_sq == eight.field.mean_sq);  // bitwise
  CHECK(one.field.ci_half == eight.field.ci_half);
  CHECK(one.energy.value == eight.energy.value);
  const auto other = estimate_moments(cfg, cfg.t_end, 200, 78, 2);
  CHECK(one.energy.value != other.energy.value);
}

TEST_CASE("confidence width shrinks like 1/sqrt(n)") {
  auto cfg = small_config(BoundaryCondition::Neumann, 1.0);
  const auto small = estimate_moments(cfg, cfg.t_end, 500, 4, 2);
  const auto big = estimate_moments(cfg, cfg.t_end, 2000, 4, 2);
  const int mid = cfg.nx / 2;
  const double ratio = small.field.ci_half[mid] / big.field.ci_half[mid];
  CHECK(ratio == Approx(2.0).epsilon(0.2));  // 4x replicas -> half width +-10%ish
}

TEST_CASE("monte carlo matches the exact discrete second-moment recursion") {
  // the recursion is the exact E|u|^2 of the scheme for linear sigma, so the
  // sample mean must agree within a few confidence half-widths
  for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    auto cfg = small_config(bc, 1.2);
    oracle::DiscreteSecondMoment exact(cfg);
    exact.advance(cfg.step_count());
    const auto est = estimate_moments(cfg, cfg.t_end, 4000, 2024, 2);
    int checked = 0;
    for (int j : {1, cfg.nx / 4, cfg.nx / 2, (3 * cfg.nx) / 4, cfg.nx}) {
      const double ref = exact.second_moment(j);
      if (ref <= 0.0) continue;
      const double ci = est.field.ci_half[j];
      REQUIRE(ci > 0.0);
      CHECK(std::abs(est.field.mean_sq[j] - ref) < 4.0 * ci);
      ++checked;
    }
    CHECK(checked >= 3);
    // energy agrees too
    const double e_ref = std::sqrt(exact.energy_sq(cfg.dx()));
    CHECK(std::abs(est.energy.value - e_ref) < 4.0 * est.energy.ci_half + 1e-12);
  }
}

TEST_CASE("monte carlo matches the whole-line PAM oracle away from boundaries") {
  // small grid version of the exact-moment validation: nx=127, t=0.01
  SimConfig cfg = small_config(BoundaryCondition::Neumann, 1.0);
  cfg.nx = 127;
  cfg.dt = 2e-5;
  const auto est = estimate_moments(cfg, cfg.t_end, 4000, 31, 2);
  const double oracle_m = pam_second_moment(1.0, cfg.t_end, cfg.params.nu).value;
  const int mid = (cfg.nx + 2) / 2;
  CHECK(std::abs(est.field.mean_sq[mid] - oracle_m) <
        4.0 * est.field.ci_half[mid] + 0.01 * oracle_m);
}

TEST_CASE("energy_from_field: constants and dirichlet L2 identity") {
  FieldMoment fm;
  const int n = 101;
  const double dx = 1.0 / (n - 1);
  fm.x.resize(n);
  fm.mean_sq.assign(n, 1.0);
  fm.ci_half.assign(n, 0.0);
  for (int j = 0; j < n; ++j) fm.x[j] = j * dx;
  CHECK(energy_from_field(fm, dx).value == Approx(1.0).epsilon(1e-12));
  fm.mean_sq.assign(n, 4.0);
  CHECK(energy_from_field(fm, dx).value == Approx(2.0).epsilon(1e-12));

  // the deterministic bump field: energy_from_field on the semigroup output
  // agrees with an independent quadrature of its squared L2 norm
  KernelParams kp;
  kp.length = 1.0;
  kp.nu = 0.5;
  const auto u0 = InitialCondition::bump(0.5, 0.2, 1.0);
  const int fine = 1000;
  FieldMoment gm;
  gm.x.resize(fine + 1);
  for (int j = 0; j <= fine; ++j) gm.x[j] = j / static_cast<double>(fine);
  const auto gvals = semigroup_apply(KernelKind::Dirichlet, u0, 0.01, kp, gm.x);
  gm.mean_sq.resize(fine + 1);
  for (int j = 0; j <= fine; ++j) gm.mean_sq[j] = gvals[j] * gvals[j];
  gm.ci_half.assign(fine + 1, 0.0);
  const auto eg = energy_from_field(gm, 1.0 / fine);
  std::vector<double> probe(1);
  const auto exact_norm_sq = oracle::simpson(
      [&](double x) {
        probe[0] = x;
        return std::pow(semigroup_apply(KernelKind::Dirichlet, u0, 0.01, kp, probe)[0], 2);
      },
      0.0, 1.0, 512);
  CHECK(eg.value == Approx(std::sqrt(exact_norm_sq)).epsilon(1e-5));
  CHECK(eg.ci_half == 0.0);

  // at lambda=0 the per-replica energy accumulation and the field route agree
  auto cfg = small_config(BoundaryCondition::Dirichlet, 0.0);
  const auto est = estimate_moments(cfg, cfg.t_end, 8, 1, 1);
  const auto e = energy_from_field(est.field, cfg.dx());
  CHECK(est.energy.value == Approx(e.value).epsilon(1e-12));
}

TEST_CASE("field extrema: ordering, boundary zeros, window") {
  FieldMoment fm;
  const int n = 11;
  fm.x.resize(n);
  fm.mean_sq.resize(n);
  fm.ci_half.assign(n, 0.1);
  for (int j = 0; j < n; ++j) {
    fm.x[j] = j * 0.1;
    fm.mean_sq[j] = std::sin(3.14159265358979324 * j * 0.1);
  }
  const auto ex = field_extrema(fm, 0.25, 1.0);
  CHECK(ex.inf == 0.0);
  CHECK(ex.sup == Approx(1.0));
  CHECK(ex.inf <= ex.inf_eps);
  CHECK(ex.inf_eps <= ex.sup);
  // brute-force window scan
  double brute = 1e300;
  for (int j = 0; j < n; ++j)
    if (fm.x[j] >= 0.25 && fm.x[j] <= 0.75) brute = std::min(brute, fm.mean_sq[j]);
  CHECK(ex.inf_eps == brute);
  CHECK_THROWS_AS(field_extrema(fm, 0.6, 1.0), std::invalid_argument);

  const auto constant = [&] {
    FieldMoment c = fm;
    c.mean_sq.assign(n, 2.5);
    return field_extrema(c, 0.2, 1.0);
  }();
  CHECK(constant.inf == constant.sup);
  CHECK(constant.inf == constant.inf_eps);
}

TEST_CASE("fit_excitation_index: synthetic slopes, drops, invariance") {
  auto mk = [](double lambda, double log_e) {
    SweepPoint p;
    p.lambda = lambda;
    p.log_energy = log_e;
    return p;
  };
  std::vector<SweepPoint> quartic, quadratic;
  for (double lam : {2.0, 3.0, 4.0, 5.0, 6.0}) {
    quartic.push_back(mk(lam, 0.3 * std::pow(lam, 4)));
    quadratic.push_back(mk(lam, lam * lam));
  }
  const auto f4 = fit_excitation_index(quartic, 1.0 / 512);
  REQUIRE(f4.fit.has_value());
  CHECK(f4.fit->slope == Approx(4.0).epsilon(1e-10));
  CHECK(f4.fit->residual_stderr == Approx(0.0).scale(1.0).epsilon(1e-9));
  const auto f2 = fit_excitation_index(quadratic, 1.0 / 512);
  CHECK(f2.fit->slope == Approx(2.0).epsilon(1e-10));

  // E -> E^c rescales log E, which shifts the log log intercept exactly and
  // leaves the slope untouched
  std::vector<SweepPoint> powed = quartic;
  for (auto& p : powed) p.log_energy *= 7.0;
  const auto fp = fit_excitation_index(powed, 1.0 / 512);
  CHECK(fp.fit->slope == Approx(f4.fit->slope).epsilon(1e-12));
  CHECK(fp.fit->intercept == Approx(f4.fit->intercept + std::log(7.0)).epsilon(1e-10));

  // E -> 5E only perturbs the slope at order log(5)/log E; with log E >> 1 it
  // is invariant to high accuracy
  std::vector<SweepPoint> scaled;
  for (double lam : {4.0, 5.0, 6.0, 7.0, 8.0}) scaled.push_back(mk(lam, std::pow(lam, 4)));
  const auto fbig = fit_excitation_index(scaled, 1e-4);
  for (auto& p : scaled) p.log_energy += std::log(5.0);
  const auto fs = fit_excitation_index(scaled, 1e-4);
  CHECK(fs.fit->slope == Approx(fbig.fit->slope).epsilon(0.005));
  CHECK(fs.fit->intercept != fbig.fit->intercept);

  // continuum-window rule drops large lambda
  std::vector<SweepPoint> windowed = quartic;
  windowed.push_back(mk(40.0, 0.3 * std::pow(40.0, 4)));  // 40^2/512 = 3.1 > 0.2
  const auto fw = fit_excitation_index(windowed, 1.0 / 512);
  REQUIRE(fw.dropped.size() == 1);
  CHECK(fw.dropped[0].lambda == 40.0);
  CHECK(fw.lambda_fit_max == 6.0);

  // log E <= 0 points are dropped; fewer than 3 usable -> undefined
  std::vector<SweepPoint> thin{mk(2.0, -0.5), mk(3.0, 0.4), mk(4.0, 1.0)};
  const auto ft = fit_excitation_index(thin, 1.0 / 512);
  CHECK(!ft.fit.has_value());
  CHECK(ft.status.find("undefined") != std::string::npos);
  CHECK(ft.dropped.size() == 1);
}

TEST_CASE("dirichlet supremum never exceeds neumann supremum (matched config)") {
  auto cfg_d = small_config(BoundaryCondition::Dirichlet, 2.0);
  auto cfg_n = cfg_d;
  cfg_n.bc = BoundaryCondition::Neumann;
  const auto est_d = estimate_moments(cfg_d, cfg_d.t_end, 2000, 5, 2);
  const auto est_n = estimate_moments(cfg_n, cfg_n.t_end, 2000, 5, 2);
  const auto ex_d = field_extrema(est_d.field, 0.25, 1.0);
  const auto ex_n = field_extrema(est_n.field, 0.25, 1.0);
  CHECK(ex_d.sup <= ex_n.sup + ex_d.sup_ci + ex_n.sup_ci);
}
