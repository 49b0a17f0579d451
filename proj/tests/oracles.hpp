#pragma once
// Test-side oracles, independent of the implementation paths they check:
//  - eigenfunction (sine/cosine) series for the interval heat kernels,
//  - brute-force quadrature,
//  - exact second-moment recursion of the discretized scheme for linear sigma.

#include <cmath>
#include <cstddef>
#include <vector>

#include "spde/sim.hpp"

namespace oracle {

constexpr double kPi = 3.14159265358979323846264338328;

// p_D(t,x,y) = (2/L) sum_n sin(n pi x/L) sin(n pi y/L) exp(-nu n^2 pi^2 t/L^2)
inline double dirichlet_eigen(double t, double x, double y, double L, double nu,
                              int terms = 2000) {
  double s = 0.0;
  for (int n = 1; n <= terms; ++n) {
    const double rate = nu * n * n * kPi * kPi * t / (L * L);
    if (rate > 745.0) break;
    s += std::sin(n * kPi * x / L) * std::sin(n * kPi * y / L) * std::exp(-rate);
  }
  return 2.0 / L * s;
}

// p_N(t,x,y) = 1/L + (2/L) sum_n cos(n pi x/L) cos(n pi y/L) exp(-nu n^2 pi^2 t/L^2)
inline double neumann_eigen(double t, double x, double y, double L, double nu,
                            int terms = 2000) {
  double s = 0.0;
  for (int n = 1; n <= terms; ++n) {
    const double rate = nu * n * n * kPi * kPi * t / (L * L);
    if (rate > 745.0) break;
    s += std::cos(n * kPi * x / L) * std::cos(n * kPi * y / L) * std::exp(-rate);
  }
  return 1.0 / L + 2.0 / L * s;
}

// plain composite Simpson on a fixed fine grid (power of two panels)
template <class F>
double simpson(F&& f, double a, double b, int n = 4096) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Exact second moment E[u_j u_k] of the Euler-Maruyama scheme with
// sigma(u) = c u:  M <- A M A^T + (lambda c)^2 (dt/dx) diag(M_jj), noise on
// interior nodes only. State covers all nx+2 nodes.
class DiscreteSecondMoment {
 public:
  explicit DiscreteSecondMoment(const spde::SimConfig& cfg) : cfg_(cfg) {
    const int total = cfg.nx + 2;
    const double h = cfg.dx();
    r_ = cfg.params.nu * cfg.dt / (h * h);
    std::vector<double> u0(total);
    for (int j = 0; j < total; ++j) u0[j] = cfg.u0(j * h);
    if (cfg.bc == spde::BoundaryCondition::Dirichlet) {
      u0.front() = 0.0;
      u0.back() = 0.0;
    }
    m_.assign(total * total, 0.0);
    for (int j = 0; j < total; ++j)
      for (int k = 0; k < total; ++k) m_[j * total + k] = u0[j] * u0[k];
  }

  void advance(std::size_t steps) {
    const int total = cfg_.nx + 2;
    std::vector<double> b(total * total), c(total * total), diag(total);
    const double q = cfg_.lambda * cfg_.lambda * cfg_.sigma.c * cfg_.sigma.c * cfg_.dt / cfg_.dx();
    for (std::size_t s = 0; s < steps; ++s) {
      for (int j = 0; j < total; ++j) diag[j] = m_[j * total + j];
      apply_rows(m_.data(), b.data(), total);
      transpose(b.data(), c.data(), total);
      apply_rows(c.data(), b.data(), total);
      transpose(b.data(), m_.data(), total);
      for (int j = 1; j <= cfg_.nx; ++j) m_[j * total + j] += q * diag[j];
    }
  }

  double second_moment(int j) const { return m_[j * (cfg_.nx + 2) + j]; }

  double energy_sq(double dx) const {
    const int total = cfg_.nx + 2;
    double s = 0.0;
    for (int j = 0; j < total; ++j)
      s += (j == 0 || j == total - 1 ? 0.5 : 1.0) * second_moment(j);
    return s * dx;
  }

 private:
  void apply_rows(const double* in, double* out, int total) const {
    const int nx = total - 2;
    for (int col = 0; col < total; ++col) {
      if (cfg_.bc == spde::BoundaryCondition::Dirichlet) {
        out[0 * total + col] = 0.0;
        out[(total - 1) * total + col] = 0.0;
      } else {
        out[0 * total + col] = in[0 * total + col] + r_ * (in[1 * total + col] - in[0 * total + col]);
        out[(total - 1) * total + col] =
            in[(total - 1) * total + col] +
            r_ * (in[(total - 2) * total + col] - in[(total - 1) * total + col]);
      }
    }
    for (int j = 1; j <= nx; ++j)
      for (int col = 0; col < total; ++col)
        out[j * total + col] =
            in[j * total + col] + r_ * (in[(j + 1) * total + col] - 2.0 * in[j * total + col] +
                                        in[(j - 1) * total + col]);
  }

  static void transpose(const double* in, double* out, int total) {
    for (int j = 0; j < total; ++j)
      for (int k = 0; k < total; ++k) out[k * total + j] = in[j * total + k];
  }

  spde::SimConfig cfg_;
  double r_ = 0.0;
  std::vector<double> m_;
};

}  // namespace oracle
