#include <cmath>
#include <vector>

#include "doctest.h"
#include "spde/renewal.hpp"

using namespace spde;
using doctest::Approx;

TEST_CASE("closed form: anchors and stability") {
  CHECK(renewal_closed_form(1.0, 0.0, 5.0).value == Approx(1.0));
  CHECK(renewal_closed_form(3.0, 1.0, 0.0).value == Approx(3.0));
  // e^pi erfc(-sqrt(pi))
  CHECK(renewal_closed_form(1.0, 1.0, 1.0).value == Approx(45.99932608938286).epsilon(1e-12));
  // large argument: log value = 100 pi + log 2 without overflow
  const auto big = renewal_closed_form(1.0, 10.0, 1.0);
  CHECK(big.log_value == Approx(314.8524125395393).epsilon(1e-12));
  // far past double range the log stays finite
  const auto huge = renewal_closed_form(1.0, 40.0, 1.0);
  CHECK(std::isinf(huge.value));
  CHECK(huge.log_value == Approx(1600.0 * 3.141592653589793 + std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(renewal_closed_form(-1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(renewal_closed_form(1.0, -0.5, 1.0), std::invalid_argument);
}

TEST_CASE("solver: no-noise limit is constant") {
  RenewalSpec spec;
  spec.a = 1.0;
  spec.b = 1.0;
  spec.k = 1e-14;  // k -> 0 limit
  spec.T = 2.0;
  spec.n = 64;
  const auto g = solve_renewal(spec);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.value(i) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solver matches the closed form at n=4096") {
  RenewalSpec spec;  // a=1, b=1, k=1, T=1
  spec.n = 4096;
  const auto g = solve_renewal(spec);
  CHECK(g.value(g.size() - 1) == Approx(45.99932608938286).epsilon(1e-4));
  double maxrel = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double exact = renewal_closed_form(1.0, 1.0, g.t[i]).log_value;
    maxrel = std::max(maxrel, std::abs(std::expm1(g.log_f[i] - exact)));
  }
  CHECK(maxrel < 1e-4);
  CHECK(g.log_gap_at_T < 1e-4);
}

TEST_CASE("solver converges under grid refinement") {
  double prev = 0.0;
  for (int n : {512, 1024, 2048, 4096}) {
    RenewalSpec spec;
    spec.k = 1.7;
    spec.n = n;
    const auto g = solve_renewal(spec);
    double maxrel = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double exact = renewal_closed_form(1.0, 1.7, g.t[i]).log_value;
      maxrel = std::max(maxrel, std::abs(std::expm1(g.log_f[i] - exact)));
    }
    if (prev > 0.0) CHECK(maxrel < prev);
    prev = maxrel;
  }
}

TEST_CASE("solver: log-domain path handles super-exponential growth") {
  RenewalSpec spec;  // c = 30: f(1) ~ e^{900 pi}, forced into log arithmetic
  spec.k = 30.0;
  spec.n = 8192;
  const auto g = solve_renewal(spec);
  const double exact = renewal_closed_form(1.0, 30.0, 1.0).log_value;
  CHECK(g.log_f.back() == Approx(exact).epsilon(0.02));
  bool nondecreasing = true;
  for (std::size_t i = 1; i < g.size(); ++i)
    nondecreasing = nondecreasing && g.log_f[i] >= g.log_f[i - 1] - 1e-12;
  CHECK(nondecreasing);
}

TEST_CASE("solver reports a grid too coarse for the requested k") {
  RenewalSpec spec;
  spec.k = 5000.0;
  spec.n = 1024;
  CHECK_THROWS_WITH_AS(solve_renewal(spec), doctest::Contains("grid too coarse"),
                       std::runtime_error);
}

TEST_CASE("solution is monotone in t, k and a") {
  auto solve = [](double a, double k, int n) {
    RenewalSpec s;
    s.a = a;
    s.k = k;
    s.n = n;
    return solve_renewal(s);
  };
  const auto base = solve(1.0, 1.0, 256);
  bool mono_t = true;
  for (std::size_t i = 1; i < base.size(); ++i)
    mono_t = mono_t && base.log_f[i] >= base.log_f[i - 1] - 1e-12;
  CHECK(mono_t);
  const auto more_k = solve(1.0, 1.5, 256);
  const auto more_a = solve(2.0, 1.0, 256);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(more_k.log_f[i] >= base.log_f[i] - 1e-12);
    CHECK(more_a.log_f[i] >= base.log_f[i] - 1e-12);
  }
}

TEST_CASE("growth exponent: synthetic families recover exact slopes") {
  std::vector<double> ks, lf2, lf4;
  for (double k = 2.0; k <= 64.0; k *= 2.0) {
    ks.push_back(k);
    lf2.push_back(k * k);          // f = e^{k^2}
    lf4.push_back(k * k * k * k);  // f = e^{k^4}
  }
  CHECK(growth_exponent(ks, lf2).fit.slope == Approx(2.0).epsilon(1e-12));
  CHECK(growth_exponent(ks, lf4).fit.slope == Approx(4.0).epsilon(1e-12));
  CHECK(growth_exponent(ks, lf2).fit.residual_stderr == Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("growth exponent: closed-form family gives 2 over k in [1e2, 1e4]") {
  std::vector<double> ks, lf;
  for (int i = 0; i < 9; ++i) {
    const double k = 100.0 * std::pow(100.0, i / 8.0);
    ks.push_back(k);
    lf.push_back(renewal_closed_form(1.0, k, 1.0).log_value);
  }
  const auto fit = growth_exponent(ks, lf);
  CHECK(fit.fit.slope == Approx(2.0).epsilon(0.01));
  CHECK(fit.rejected_k.empty());
}

TEST_CASE("growth exponent rejects points with f <= 1 and needs 3 survivors") {
  const std::vector<double> ks{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> lf{-0.5, 1.0, 2.0, 3.0};  // first point unusable
  const auto fit = growth_exponent(ks, lf);
  CHECK(fit.rejected_k.size() == 1);
  CHECK(fit.fit.n == 3);
  const std::vector<double> bad{-1.0, -2.0, 1.0, 2.0};
  CHECK_THROWS_AS(growth_exponent(ks, bad), std::invalid_argument);
}

TEST_CASE("pam second moment: anchors and renewal consistency") {
  CHECK(pam_second_moment(0.0, 3.0, 0.5).value == Approx(1.0));
  CHECK(pam_second_moment(1.0, 1.0, 0.5).value == Approx(1.9523604891825571).epsilon(1e-12));
  CHECK(pam_second_moment(3.0, 0.5, 0.5).log_value == Approx(10.818143782881048).epsilon(1e-12));
  // identical to the closed form with c = lambda^2 / sqrt(8 pi nu)
  for (double lam : {0.5, 1.0, 2.0, 4.0})
    for (double nu : {0.5, 1.0}) {
      const double c = lam * lam / std::sqrt(8.0 * 3.141592653589793 * nu);
      CHECK(pam_second_moment(lam, 0.7, nu).log_value ==
            renewal_closed_form(1.0, c, 0.7).log_value);
    }
  // cross-check by the grid solver
  RenewalSpec spec;
  spec.b = 1.0;
  spec.k = 1.0 / std::sqrt(8.0 * 3.141592653589793 * 0.5);  // lambda=1, nu=1/2
  spec.n = 4096;
  const auto g = solve_renewal(spec);
  CHECK(g.value(g.size() - 1) == Approx(pam_second_moment(1.0, 1.0, 0.5).value).epsilon(1e-4));
}
