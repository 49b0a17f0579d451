#include "spde/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace spde {

namespace {

constexpr double kZ95 = 1.959963984540054;  // 97.5% normal quantile
constexpr long long kChunk = 32;            // replicas per deterministic chunk

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Per-chunk partial state; chunks merge in index order, so the result is
// independent of which worker ran which chunk.
struct ChunkAccum {
  std::vector<StreamingMoments> point_sq;  // per grid node, u^2
  StreamingMoments energy_sq;              // per replica, ||u||^2 (trapezoid)
  long long failed = 0;
};

}  // namespace

double StreamingMoments::ci_half() const {
  if (n < 2) return 0.0;
  return kZ95 * std::sqrt(variance() / static_cast<double>(n));
}

double EnergyEstimate::log_value() const { return std::log(value); }
double EnergyEstimate::log_ci_half() const { return value > 0.0 ? ci_half / value : 0.0; }

MomentSummary estimate_moments(const SimConfig& cfg, double t, long long n_replicas,
                               std::uint64_t master_seed, int workers) {
  require(n_replicas >= 2, "estimate_moments: need >= 2 replicas");
  require(t > 0.0 && t <= cfg.t_end + 1e-12, "estimate_moments: t must lie in (0, t_end]");
  cfg.validate();
  const double raw_steps = t / cfg.dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(raw_steps));
  require(std::abs(raw_steps - static_cast<double>(n_steps)) < 1e-6 && n_steps >= 1,
          "estimate_moments: t must be a multiple of dt");

  const int total_nodes = cfg.nx + 2;
  const double h = cfg.dx();
  const long long n_chunks = (n_replicas + kChunk - 1) / kChunk;
  std::vector<ChunkAccum> chunks(static_cast<std::size_t>(n_chunks));

  std::atomic<long long> next_chunk{0};
  const int n_workers = std::min<long long>(resolve_workers(workers), n_chunks);

  auto worker_fn = [&]() {
    PathRunner runner(cfg);
    for (;;) {
      const long long chunk = next_chunk.fetch_add(1, std::memory_order_relaxed);
      if (chunk >= n_chunks) break;
      auto& acc = chunks[static_cast<std::size_t>(chunk)];
      acc.point_sq.resize(total_nodes);
      const long long lo = chunk * kChunk;
      const long long hi = std::min(n_replicas, lo + kChunk);
      for (long long rep = lo; rep < hi; ++rep) {
        const std::uint64_t seed = derive_replica_seed(master_seed, static_cast<std::uint64_t>(rep));
        try {
          const std::vector<double>& u = runner.run(seed, n_steps);
          double norm_sq = 0.0;
          for (int j = 0; j < total_nodes; ++j) {
            const double sq = u[j] * u[j];
            acc.point_sq[j].add(sq);
            norm_sq += (j == 0 || j == total_nodes - 1) ? 0.5 * sq : sq;
          }
          acc.energy_sq.add(norm_sq * h);
        } catch (const PathFailure&) {
          ++acc.failed;
        }
      }
    }
  };

  if (n_workers <= 1) {
    worker_fn();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker_fn);
  }

  // Deterministic merge in chunk order.
  MomentSummary out;
  std::vector<StreamingMoments> merged(total_nodes);
  StreamingMoments energy_sq;
  long long failed = 0;
  for (const auto& acc : chunks) {
    if (acc.point_sq.empty()) continue;
    for (int j = 0; j < total_nodes; ++j) merged[j].merge(acc.point_sq[j]);
    energy_sq.merge(acc.energy_sq);
    failed += acc.failed;
  }

  FieldMoment& fm = out.field;
  fm.x.resize(total_nodes);
  fm.mean_sq.resize(total_nodes);
  fm.ci_half.resize(total_nodes);
  for (int j = 0; j < total_nodes; ++j) {
    fm.x[j] = j * h;
    fm.mean_sq[j] = merged[j].mean;
    fm.ci_half[j] = merged[j].ci_half();
  }
  fm.n = n_replicas;
  fm.n_failed = failed;
  fm.reliable = failed * 100 <= n_replicas;  // flag when > 1% of paths failed

  out.energy_sq = energy_sq;
  EnergyEstimate& en = out.energy;
  const double mean_e2 = std::max(0.0, energy_sq.mean);
  en.value = std::sqrt(mean_e2);
  en.ci_half = en.value > 0.0 ? energy_sq.ci_half() / (2.0 * en.value) : 0.0;
  return out;
}

FieldMoment second_moment_field(const SimConfig& cfg, double t, long long n_replicas,
                                std::uint64_t master_seed, int workers) {
  return estimate_moments(cfg, t, n_replicas, master_seed, workers).field;
}

EnergyEstimate energy_from_field(const FieldMoment& fm, double dx) {
  require(!fm.mean_sq.empty(), "energy_from_field: empty field");
  require(dx > 0.0, "energy_from_field: dx must be > 0");
  double sum = 0.0, var = 0.0;
  const std::size_t n = fm.mean_sq.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
    sum += w * fm.mean_sq[j];
    const double c = w * dx * fm.ci_half[j];
    var += c * c;  // per-point errors treated as independent
  }
  EnergyEstimate e;
  const double e2 = std::max(0.0, sum * dx);
  e.value = std::sqrt(e2);
  e.ci_half = e.value > 0.0 ? std::sqrt(var) / (2.0 * e.value) : 0.0;
  return e;
}

Extrema field_extrema(const FieldMoment& fm, double eps, double L) {
  require(!fm.mean_sq.empty(), "field_extrema: empty field");
  require(eps >= 0.0 && eps < 0.5 * L, "field_extrema: need 0 <= eps < L/2");
  Extrema ex;
  ex.inf = fm.mean_sq[0];
  ex.sup = fm.mean_sq[0];
  std::size_t arg_sup = 0;
  bool any_eps = false;
  ex.inf_eps = 0.0;
  for (std::size_t j = 0; j < fm.mean_sq.size(); ++j) {
    const double v = fm.mean_sq[j];
    ex.inf = std::min(ex.inf, v);
    if (v > ex.sup) {
      ex.sup = v;
      arg_sup = j;
    }
    if (fm.x[j] >= eps - 1e-12 && fm.x[j] <= L - eps + 1e-12) {
      ex.inf_eps = any_eps ? std::min(ex.inf_eps, v) : v;
      any_eps = true;
    }
  }
  require(any_eps, "field_extrema: restricted window [eps, L-eps] contains no grid point");
  ex.sup_ci = fm.ci_half[arg_sup];
  return ex;
}

SweepResult fit_excitation_index(const std::vector<SweepPoint>& points, double dx) {
  SweepResult res;
  res.points = points;
  std::vector<double> xs, ys;
  std::vector<double> used_lambdas;
  for (const auto& p : points) {
    if (p.lambda * p.lambda * dx > 0.2) {
      res.dropped.push_back({p.lambda, "outside continuum window (lambda^2*dx > 0.2)"});
      continue;
    }
    if (!p.energy_defined || !(p.log_energy > 0.0)) {
      res.dropped.push_back({p.lambda, "log E <= 0 (log log undefined)"});
      continue;
    }
    xs.push_back(std::log(p.lambda));
    ys.push_back(std::log(p.log_energy));
    used_lambdas.push_back(p.lambda);
  }
  if (xs.size() < 3) {
    res.status = "slope: undefined (insufficient points)";
    return res;
  }
  res.fit = fit_ols(xs, ys);
  res.lambda_fit_min = *std::min_element(used_lambdas.begin(), used_lambdas.end());
  res.lambda_fit_max = *std::max_element(used_lambdas.begin(), used_lambdas.end());
  res.status = "ok";
  return res;
}

}  // namespace spde
