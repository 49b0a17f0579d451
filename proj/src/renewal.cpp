#include "spde/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spde {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Exact moments of (t_i - s)^{-1/2} against the piecewise-linear hat basis.
// For a panel at distance m = i - k (panel [t_k, t_{k+1}], target t_i):
//   alpha(m): weight of f_k, beta(m): weight of f_{k+1}.
struct PiWeights {
  std::vector<double> alpha, beta;  // index m-1 holds alpha(m)/beta(m)
  std::vector<double> w_first0, w_first1;  // first panel, sqrt interpolant, per target i

  PiWeights(int n, double h) : alpha(n), beta(n), w_first0(n), w_first1(n) {
    for (int m = 1; m <= n; ++m) {
      const double q = m * h, p = (m - 1) * h;
      const double sq = std::sqrt(q), sp = std::sqrt(p);
      const double i0 = 2.0 * (sq - sp);
      const double i1 = (2.0 / 3.0) * (q * sq - p * sp);
      alpha[m - 1] = (i1 - p * i0) / h;
      beta[m - 1] = (q * i0 - i1) / h;
    }
    // The solution has a sqrt cusp at t = 0, so the first panel interpolates
    // f(s) ~ f0 + (f1 - f0) sqrt(s/h). J = int_0^h sqrt(s) (t-s)^{-1/2} ds.
    const double sh = std::sqrt(h);
    for (int i = 1; i <= n; ++i) {
      const double t = i * h;
      const double ratio = std::min(1.0, std::sqrt(h / t));
      const double j = t * std::asin(ratio) - std::sqrt(std::max(0.0, h * (t - h)));
      const double i0 = 2.0 * (std::sqrt(t) - std::sqrt(t - h));
      w_first0[i - 1] = i0 - j / sh;
      w_first1[i - 1] = j / sh;
    }
  }
};

}  // namespace

void RenewalSpec::validate() const {
  require(a > 0.0 && std::isfinite(a), "RenewalSpec: a must be > 0");
  require(b > 0.0 && std::isfinite(b), "RenewalSpec: b must be > 0");
  require(k > 0.0 && std::isfinite(k), "RenewalSpec: k must be > 0");
  require(T > 0.0 && std::isfinite(T), "RenewalSpec: T must be > 0");
  require(n >= 2, "RenewalSpec: n must be >= 2");
}

double GridFunction::value(std::size_t i) const {
  const double lf = log_f.at(i);
  return lf > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(lf);
}

LogValue renewal_closed_form(double a, double c, double t) {
  require(a > 0.0 && std::isfinite(a), "renewal_closed_form: a must be > 0");
  require(c >= 0.0 && std::isfinite(c), "renewal_closed_form: c must be >= 0");
  require(t >= 0.0 && std::isfinite(t), "renewal_closed_form: t must be >= 0");
  const double z = c * std::sqrt(kPi * t);
  // a e^{z^2} erfc(-z) = a e^{z^2} (2 - erfc(z)); 2 - erfc(z) in [1, 2), no cancellation
  const double log_v = std::log(a) + z * z + std::log(2.0 - std::erfc(z));
  LogValue out;
  out.log_value = log_v;
  out.value = log_v > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(log_v);
  return out;
}

LogValue pam_second_moment(double lambda, double t, double nu) {
  require(lambda >= 0.0 && std::isfinite(lambda), "pam_second_moment: lambda must be >= 0");
  require(t > 0.0 && std::isfinite(t), "pam_second_moment: t must be > 0");
  require(nu > 0.0 && std::isfinite(nu), "pam_second_moment: nu must be > 0");
  const double c = lambda * lambda / std::sqrt(8.0 * kPi * nu);
  return renewal_closed_form(1.0, c, t);
}

GridFunction solve_renewal(const RenewalSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const double h = spec.T / n;
  const double c = spec.b * spec.k;
  const PiWeights w(n, h);

  const double wself = w.beta[0];
  // first-step self weight (pi/2) sqrt(h) is the largest implicit weight
  if (c * std::max(wself, w.w_first1[0]) >= 1.0)
    throw std::runtime_error(
        "solve_renewal: grid too coarse for b*k (implicit kernel weight c*O(sqrt(h)) >= 1); "
        "increase n or reduce k");

  GridFunction g;
  g.t.resize(n + 1);
  g.log_f.resize(n + 1);
  for (int i = 0; i <= n; ++i) g.t[i] = i * h;
  g.log_f[0] = std::log(spec.a);

  // Values stay inside double range whenever the closed form does.
  const bool value_domain = renewal_closed_form(spec.a, c, spec.T).log_value < 600.0;

  if (value_domain) {
    std::vector<double> f(n + 1);
    f[0] = spec.a;
    for (int i = 1; i <= n; ++i) {
      double acc = w.w_first0[i - 1] * f[0];
      if (i >= 2) acc += w.w_first1[i - 1] * f[1];
      for (int k2 = 1; k2 < i; ++k2) acc += w.alpha[i - k2 - 1] * f[k2];
      for (int k2 = 1; k2 + 1 < i; ++k2) acc += w.beta[i - k2 - 1] * f[k2 + 1];
      const double self = (i == 1) ? w.w_first1[0] : wself;
      f[i] = (spec.a + c * acc) / (1.0 - c * self);
      g.log_f[i] = std::log(f[i]);
    }
  } else {
    // log-domain accumulation (log-sum-exp); weights are all nonnegative
    const double log_c = std::log(c);
    std::vector<double> term;
    term.reserve(2 * n + 2);
    auto log_w = [](double v) {
      return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    };
    for (int i = 1; i <= n; ++i) {
      term.clear();
      term.push_back(std::log(spec.a));
      term.push_back(log_c + log_w(w.w_first0[i - 1]) + g.log_f[0]);
      if (i >= 2) term.push_back(log_c + log_w(w.w_first1[i - 1]) + g.log_f[1]);
      for (int k2 = 1; k2 < i; ++k2)
        term.push_back(log_c + log_w(w.alpha[i - k2 - 1]) + g.log_f[k2]);
      for (int k2 = 1; k2 + 1 < i; ++k2)
        term.push_back(log_c + log_w(w.beta[i - k2 - 1]) + g.log_f[k2 + 1]);
      const double mx = *std::max_element(term.begin(), term.end());
      double s = 0.0;
      for (double tv : term) s += std::exp(tv - mx);
      const double self = (i == 1) ? w.w_first1[0] : wself;
      g.log_f[i] = mx + std::log(s) - std::log1p(-c * self);
    }
  }
  g.log_gap_at_T = std::abs(g.log_f[n] - renewal_closed_form(spec.a, c, spec.T).log_value);
  return g;
}

ExponentFit growth_exponent(std::span<const double> k, std::span<const double> log_f) {
  require(k.size() == log_f.size(), "growth_exponent: mismatched inputs");
  ExponentFit out;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < k.size(); ++i) {
    require(k[i] > 0.0, "growth_exponent: k values must be > 0");
    if (log_f[i] > 0.0) {
      xs.push_back(std::log(k[i]));
      ys.push_back(std::log(log_f[i]));
    } else {
      out.rejected_k.push_back(k[i]);
    }
  }
  if (xs.size() < 3)
    throw std::invalid_argument(
        "growth_exponent: fewer than 3 points with f > 1 (log log undefined)");
  out.fit = fit_ols(xs, ys);
  return out;
}

}  // namespace spde
