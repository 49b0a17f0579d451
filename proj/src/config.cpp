#include "spde/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace spde {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

enum class ValueKind { Double, Int, LongLong, Uint64, Enum, String };

struct KeySpec {
  const char* section;
  const char* key;
  ValueKind kind;
  std::vector<std::string> enum_values;  // for Enum kind
};

const std::vector<KeySpec>& key_registry() {
  static const std::vector<KeySpec> reg = {
      {"experiment", "mode", ValueKind::Enum, {"kernels-check", "renewal", "pam-validate", "sweep"}},
      {"experiment", "seed", ValueKind::Uint64, {}},
      {"experiment", "out_dir", ValueKind::String, {}},
      {"experiment", "workers", ValueKind::Int, {}},
      {"kernel", "length", ValueKind::Double, {}},
      {"kernel", "nu", ValueKind::Double, {}},
      {"kernel", "tol", ValueKind::Double, {}},
      {"kernel", "images", ValueKind::Int, {}},
      {"sim", "bc", ValueKind::Enum, {"dirichlet", "neumann"}},
      {"sim", "nx", ValueKind::Int, {}},
      {"sim", "dt", ValueKind::Double, {}},
      {"sim", "t_end", ValueKind::Double, {}},
      {"sim", "lambda", ValueKind::Double, {}},
      {"sim", "sigma", ValueKind::Enum, {"linear", "sine"}},
      {"sim", "sigma_c", ValueKind::Double, {}},
      {"sim", "sigma_delta", ValueKind::Double, {}},
      {"sim", "u0", ValueKind::Enum, {"bump", "flat"}},
      {"sim", "u0_center", ValueKind::Double, {}},
      {"sim", "u0_halfwidth", ValueKind::Double, {}},
      {"sim", "u0_height", ValueKind::Double, {}},
      {"sim", "replicas", ValueKind::LongLong, {}},
      {"sim", "epsilon", ValueKind::Double, {}},
      {"sweep", "lambda_min", ValueKind::Double, {}},
      {"sweep", "lambda_max", ValueKind::Double, {}},
      {"sweep", "lambda_count", ValueKind::Int, {}},
      {"sweep", "inject", ValueKind::Enum, {"none", "quartic"}},
      {"renewal", "a", ValueKind::Double, {}},
      {"renewal", "b", ValueKind::Double, {}},
      {"renewal", "T", ValueKind::Double, {}},
      {"renewal", "n", ValueKind::Int, {}},
      {"renewal", "k_min", ValueKind::Double, {}},
      {"renewal", "k_max", ValueKind::Double, {}},
      {"renewal", "k_count", ValueKind::Int, {}},
  };
  return reg;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& ks : key_registry())
    if (key == ks.key) return &ks;
  return nullptr;
}

std::string nearest_key(const std::string& key) {
  int best = 3;  // suggest only within edit distance 2
  std::string name;
  for (const auto& ks : key_registry()) {
    const int d = levenshtein(key, ks.key);
    if (d < best) {
      best = d;
      name = ks.key;
    }
  }
  return name;
}

bool parse_double(const std::string& v, double& out) {
  char* end = nullptr;
  out = std::strtod(v.c_str(), &end);
  return end && *end == '\0' && !v.empty() && std::isfinite(out);
}

bool parse_ll(const std::string& v, long long& out) {
  char* end = nullptr;
  out = std::strtoll(v.c_str(), &end, 10);
  return end && *end == '\0' && !v.empty();
}

// Applies one key to cfg. Returns an error message or empty on success.
std::string apply_key(ExperimentConfig& cfg, const KeySpec& ks, const std::string& value) {
  const std::string key = ks.key;
  auto bad_number = [&] { return "value '" + value + "' is not a valid number for '" + key + "'"; };
  double d = 0.0;
  long long ll = 0;
  if (ks.kind == ValueKind::Double && !parse_double(value, d)) return bad_number();
  if ((ks.kind == ValueKind::Int || ks.kind == ValueKind::LongLong || ks.kind == ValueKind::Uint64) &&
      !parse_ll(value, ll))
    return bad_number();
  if (ks.kind == ValueKind::Enum &&
      std::find(ks.enum_values.begin(), ks.enum_values.end(), value) == ks.enum_values.end()) {
    std::string opts;
    for (const auto& e : ks.enum_values) opts += (opts.empty() ? "" : ", ") + e;
    return "value '" + value + "' for '" + key + "' must be one of: " + opts;
  }

  if (key == "mode") {
    cfg.mode = value == "kernels-check"  ? ExperimentMode::KernelsCheck
               : value == "renewal"      ? ExperimentMode::Renewal
               : value == "pam-validate" ? ExperimentMode::PamValidate
                                         : ExperimentMode::Sweep;
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(ll);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "workers") {
    cfg.workers = static_cast<int>(ll);
  } else if (key == "length") {
    cfg.length = d;
  } else if (key == "nu") {
    cfg.nu = d;
  } else if (key == "tol") {
    cfg.kernel_tol = d;
  } else if (key == "images") {
    cfg.images = static_cast<int>(ll);
  } else if (key == "bc") {
    cfg.bc = value == "neumann" ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
  } else if (key == "nx") {
    cfg.nx = static_cast<int>(ll);
  } else if (key == "dt") {
    cfg.dt = d;
  } else if (key == "t_end") {
    cfg.t_end = d;
  } else if (key == "lambda") {
    cfg.lambda = d;
  } else if (key == "sigma") {
    cfg.sigma_kind = value;
  } else if (key == "sigma_c") {
    cfg.sigma_c = d;
  } else if (key == "sigma_delta") {
    cfg.sigma_delta = d;
  } else if (key == "u0") {
    cfg.u0_kind = value;
  } else if (key == "u0_center") {
    cfg.u0_center = d;
  } else if (key == "u0_halfwidth") {
    cfg.u0_halfwidth = d;
  } else if (key == "u0_height") {
    cfg.u0_height = d;
  } else if (key == "replicas") {
    cfg.replicas = ll;
  } else if (key == "epsilon") {
    cfg.epsilon = d;
  } else if (key == "lambda_min") {
    cfg.lambda_min = d;
  } else if (key == "lambda_max") {
    cfg.lambda_max = d;
  } else if (key == "lambda_count") {
    cfg.lambda_count = static_cast<int>(ll);
  } else if (key == "inject") {
    cfg.inject = value;
  } else if (key == "a") {
    cfg.renewal_a = d;
  } else if (key == "b") {
    cfg.renewal_b = d;
  } else if (key == "T") {
    cfg.renewal_T = d;
  } else if (key == "n") {
    cfg.renewal_n = static_cast<int>(ll);
  } else if (key == "k_min") {
    cfg.k_min = d;
  } else if (key == "k_max") {
    cfg.k_max = d;
  } else if (key == "k_count") {
    cfg.k_count = static_cast<int>(ll);
  } else {
    return "unhandled key '" + key + "'";
  }
  return {};
}

}  // namespace

std::string to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::KernelsCheck:
      return "kernels-check";
    case ExperimentMode::Renewal:
      return "renewal";
    case ExperimentMode::PamValidate:
      return "pam-validate";
    case ExperimentMode::Sweep:
      return "sweep";
  }
  return "?";
}

ConfigError::ConfigError(std::vector<ConfigDiagnostic> diags)
    : std::runtime_error([&diags] {
        std::string msg = "config error:";
        for (const auto& d : diags) {
          msg += "\n  ";
          if (d.line > 0) msg += "line " + std::to_string(d.line) + ": ";
          if (!d.key.empty()) msg += "[" + d.key + "] ";
          msg += d.message;
        }
        return msg;
      }()),
      diagnostics(std::move(diags)) {}

double ExperimentConfig::resolved_dt() const {
  if (dt > 0.0) return dt;
  const double h = length / (nx + 1);
  const double dt_max = 0.25 * h * h / nu;
  const double steps = std::ceil(t_end / dt_max - 1e-12);
  return t_end / steps;
}

std::vector<double> ExperimentConfig::lambda_grid() const {
  std::vector<double> g(static_cast<std::size_t>(lambda_count));
  if (lambda_count == 1) {
    g[0] = lambda_min;
    return g;
  }
  const double ratio = std::log(lambda_max / lambda_min) / (lambda_count - 1);
  for (int i = 0; i < lambda_count; ++i) g[i] = lambda_min * std::exp(ratio * i);
  return g;
}

std::vector<double> ExperimentConfig::k_grid() const {
  std::vector<double> g(static_cast<std::size_t>(k_count));
  if (k_count == 1) {
    g[0] = k_min;
    return g;
  }
  const double ratio = std::log(k_max / k_min) / (k_count - 1);
  for (int i = 0; i < k_count; ++i) g[i] = k_min * std::exp(ratio * i);
  return g;
}

NoiseCoefficient ExperimentConfig::noise_coefficient() const {
  return sigma_kind == "sine" ? NoiseCoefficient::sine_perturbed(sigma_c, sigma_delta)
                              : NoiseCoefficient::linear(sigma_c);
}

InitialCondition ExperimentConfig::initial_condition() const {
  return u0_kind == "flat" ? InitialCondition::flat(u0_height)
                           : InitialCondition::bump(u0_center, u0_halfwidth, u0_height);
}

SimConfig ExperimentConfig::to_sim_config() const {
  SimConfig sc;
  sc.params.length = length;
  sc.params.nu = nu;
  sc.params.tol = kernel_tol;
  sc.params.images = images;
  sc.bc = bc;
  sc.sigma = noise_coefficient();
  sc.u0 = initial_condition();
  sc.nx = nx;
  sc.dt = resolved_dt();
  sc.t_end = t_end;
  sc.lambda = lambda;
  return sc;
}

std::string ExperimentConfig::canonical_dump() const {
  char buf[64];
  auto g17 = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  // out_dir and workers are execution details: they must not change results,
  // so they stay out of the canonical dump and the hash
  os << "experiment.mode = " << to_string(mode) << "\n";
  os << "experiment.seed = " << seed << "\n";
  os << "kernel.length = " << g17(length) << "\n";
  os << "kernel.nu = " << g17(nu) << "\n";
  os << "kernel.tol = " << g17(kernel_tol) << "\n";
  os << "kernel.images = " << images << "\n";
  os << "sim.bc = " << (bc == BoundaryCondition::Neumann ? "neumann" : "dirichlet") << "\n";
  os << "sim.nx = " << nx << "\n";
  os << "sim.dt = " << g17(dt) << "\n";
  os << "sim.t_end = " << g17(t_end) << "\n";
  os << "sim.lambda = " << g17(lambda) << "\n";
  os << "sim.sigma = " << sigma_kind << "\n";
  os << "sim.sigma_c = " << g17(sigma_c) << "\n";
  os << "sim.sigma_delta = " << g17(sigma_delta) << "\n";
  os << "sim.u0 = " << u0_kind << "\n";
  os << "sim.u0_center = " << g17(u0_center) << "\n";
  os << "sim.u0_halfwidth = " << g17(u0_halfwidth) << "\n";
  os << "sim.u0_height = " << g17(u0_height) << "\n";
  os << "sim.replicas = " << replicas << "\n";
  os << "sim.epsilon = " << g17(epsilon) << "\n";
  os << "sweep.lambda_min = " << g17(lambda_min) << "\n";
  os << "sweep.lambda_max = " << g17(lambda_max) << "\n";
  os << "sweep.lambda_count = " << lambda_count << "\n";
  os << "sweep.inject = " << inject << "\n";
  os << "renewal.a = " << g17(renewal_a) << "\n";
  os << "renewal.b = " << g17(renewal_b) << "\n";
  os << "renewal.T = " << g17(renewal_T) << "\n";
  os << "renewal.n = " << renewal_n << "\n";
  os << "renewal.k_min = " << g17(k_min) << "\n";
  os << "renewal.k_max = " << g17(k_max) << "\n";
  os << "renewal.k_count = " << k_count << "\n";
  return os.str();
}

std::string ExperimentConfig::hash() const {
  const std::string dump = canonical_dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int ExperimentConfig::resolved_workers() const {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("SPDE_WORKERS")) {
    long long v = 0;
    if (parse_ll(env, v) && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<ConfigDiagnostic> errs;
  auto err = [&errs](const std::string& key, const std::string& msg) {
    errs.push_back({0, key, msg});
  };
  if (!(cfg.length > 0.0)) err("length", "must be > 0");
  if (!(cfg.nu > 0.0)) err("nu", "must be > 0");
  if (!(cfg.kernel_tol > 0.0)) err("tol", "must be > 0");
  if (cfg.images < 0) err("images", "must be >= 0 (0 = adaptive)");
  if (cfg.nx < 1) err("nx", "must be >= 1");
  if (cfg.dt < 0.0) err("dt", "must be >= 0 (0 = CFL-maximal)");
  if (!(cfg.t_end > 0.0)) err("t_end", "must be > 0");
  if (cfg.lambda < 0.0) err("lambda", "must be >= 0");
  if (!(cfg.sigma_c > 0.0)) err("sigma_c", "must be > 0");
  if (!(cfg.sigma_delta >= 0.0 && cfg.sigma_delta < 1.0)) err("sigma_delta", "must be in [0, 1)");
  if (cfg.u0_kind == "bump") {
    if (!(cfg.u0_halfwidth > 0.0)) err("u0_halfwidth", "must be > 0");
    if (!(cfg.u0_center - cfg.u0_halfwidth > 0.0 &&
          cfg.u0_center + cfg.u0_halfwidth < cfg.length))
      err("u0_center", "bump support must lie strictly inside (0, length)");
  }
  if (cfg.u0_height < 0.0) err("u0_height", "must be >= 0");
  if (cfg.replicas < 2) err("replicas", "must be >= 2");
  if (cfg.epsilon >= 0.5 * cfg.length) err("epsilon", "must be < length/2");
  if (!(cfg.lambda_min > 0.0)) err("lambda_min", "must be > 0");
  if (cfg.lambda_max < cfg.lambda_min) err("lambda_max", "must be >= lambda_min");
  if (cfg.lambda_count < 1) err("lambda_count", "must be >= 1");
  if (!(cfg.renewal_a > 0.0)) err("a", "must be > 0");
  if (!(cfg.renewal_b > 0.0)) err("b", "must be > 0");
  if (!(cfg.renewal_T > 0.0)) err("T", "must be > 0");
  if (cfg.renewal_n < 2) err("n", "must be >= 2");
  if (!(cfg.k_min > 0.0)) err("k_min", "must be > 0");
  if (cfg.k_max < cfg.k_min) err("k_max", "must be >= k_min");
  if (cfg.k_count < 3) err("k_count", "must be >= 3 (exponent fit needs 3 points)");
  if (cfg.workers < 0) err("workers", "must be >= 0 (0 = auto)");

  // CFL applies to an explicitly requested dt; the auto choice satisfies it.
  if (errs.empty() && cfg.dt > 0.0) {
    const double h = cfg.length / (cfg.nx + 1);
    const double bound = 0.25 * h * h / cfg.nu;
    if (cfg.dt > bound * (1.0 + 1e-12)) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "CFL violation: dt = %.6g exceeds dx^2/(4 nu) = %.6g at nx = %d "
                    "(dx = %.6g); reduce dt or nx",
                    cfg.dt, bound, cfg.nx, h);
      err("dt", buf);
    }
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));

  std::vector<std::string> warnings;
  const double h = cfg.length / (cfg.nx + 1);
  const double lam_top = cfg.mode == ExperimentMode::Sweep ? cfg.lambda_max : cfg.lambda;
  if (lam_top * lam_top * h > 0.2) {
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "lambda^2*dx = %.4g > 0.2 at lambda = %.4g: outside the continuum window, "
                  "such points are dropped from the index fit",
                  lam_top * lam_top * h, lam_top);
    warnings.emplace_back(buf);
  }
  return warnings;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<ConfigDiagnostic> diags;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        diags.push_back({lineno, "", "malformed section header '" + line + "'"});
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      const bool known =
          std::any_of(key_registry().begin(), key_registry().end(),
                      [&](const KeySpec& ks) { return section == ks.section; });
      if (!known) {
        diags.push_back({lineno, section, "unknown section [" + section + "]"});
        section.clear();
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      diags.push_back({lineno, "", "expected 'key = value', got '" + line + "'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const KeySpec* ks = find_key(key);
    if (!ks) {
      std::string msg = "unknown key '" + key + "'";
      if (const std::string near = nearest_key(key); !near.empty())
        msg += "; did you mean '" + near + "'?";
      diags.push_back({lineno, key, msg});
      continue;
    }
    if (!section.empty() && section != ks->section) {
      diags.push_back({lineno, key, "key '" + key + "' belongs to [" + ks->section + "]"});
      continue;
    }
    if (value.empty()) {
      diags.push_back({lineno, key, "missing value for '" + key + "'"});
      continue;
    }
    if (std::string msg = apply_key(cfg, *ks, value); !msg.empty())
      diags.push_back({lineno, key, msg});
  }
  if (!diags.empty()) throw ConfigError(std::move(diags));
  validate_config(cfg);  // throws on constraint violations
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& overrides) {
  std::vector<ConfigDiagnostic> diags;
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) {
      diags.push_back({0, ov, "override must be key=value"});
      continue;
    }
    std::string key = trim(ov.substr(0, eq));
    const std::string value = trim(ov.substr(eq + 1));
    std::string section;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      section = key.substr(0, dot);
      key = key.substr(dot + 1);
    }
    const KeySpec* ks = find_key(key);
    if (!ks) {
      std::string msg = "unknown key '" + key + "'";
      if (const std::string near = nearest_key(key); !near.empty())
        msg += "; did you mean '" + near + "'?";
      diags.push_back({0, key, msg});
      continue;
    }
    if (!section.empty() && section != ks->section) {
      diags.push_back({0, key, "key '" + key + "' belongs to [" + std::string(ks->section) + "]"});
      continue;
    }
    if (std::string msg = apply_key(cfg, *ks, value); !msg.empty())
      diags.push_back({0, key, msg});
  }
  if (!diags.empty()) throw ConfigError(std::move(diags));
  validate_config(cfg);
}

}  // namespace spde
