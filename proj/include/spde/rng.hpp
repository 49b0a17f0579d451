#pragma once
// Deterministic random number generation for the Monte Carlo layer:
// splitmix64 seed derivation, xoshiro256++ streams, and a 256-layer
// ziggurat normal sampler. All integer arithmetic, so seed derivation
// is stable across platforms.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

namespace spde {

constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for replica `index` of the stream rooted at `master`.
/// Injective in `index` for fixed master (the mix is a bijection and
/// master + gamma*(index+1) is injective mod 2^64).
inline std::uint64_t derive_replica_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64_mix(master + kSplitmixGamma * (index + 1));
}

/// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) {
      sm += kSplitmixGamma;
      w = splitmix64_mix(sm);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1], safe as a log() argument.
  double next_unit_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_;
};

namespace detail {

// 256-layer ziggurat tables for the standard normal (one-sided, f(x)=exp(-x^2/2)).
// Fast path compares the 53-bit mantissa against an integer threshold
// k[i] = 2^53 x_{i+1}/x_i, so accepted draws cost one load-compare plus one
// multiply by w[i] = x_i 2^-53.
struct ZigguratTables {
  static constexpr double kR = 3.6541528853610088;
  static constexpr double kV = 4.92867323399e-3;
  struct Fast {
    std::uint64_t k;
    double w;
  };
  Fast fast[256];
  double x[257];
  double y[257];

  ZigguratTables() {
    const double f_r = std::exp(-0.5 * kR * kR);
    x[0] = kV / f_r;  // base strip virtual width
    x[1] = kR;
    y[0] = 0.0;
    y[1] = f_r;
    for (int i = 2; i <= 255; ++i) {
      y[i] = y[i - 1] + kV / x[i - 1];
      x[i] = std::sqrt(-2.0 * std::log(y[i]));
    }
    x[256] = 0.0;
    y[256] = 1.0;
    for (int i = 0; i < 256; ++i) {
      fast[i].w = x[i] * 0x1.0p-53;
      fast[i].k = static_cast<std::uint64_t>((x[i + 1] / x[i]) * 0x1.0p53);
    }
  }

  static const ZigguratTables& instance() {
    static const ZigguratTables t;
    return t;
  }
};

}  // namespace detail

/// Gaussian stream over an xoshiro256++ state.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed)
      : rng_(seed), tab_(detail::ZigguratTables::instance()) {}

  std::uint64_t next_u64() { return rng_.next(); }
  double next_unit() { return rng_.next_unit(); }

  /// Standard normal draw.
  double next_normal() {
    const std::uint64_t u = rng_.next();
    const std::uint64_t m = u >> 11;             // 53-bit mantissa
    const std::uint64_t sign_bit = (u & 256u) << 55;
    const auto& f = tab_.fast[u & 255u];
    if (m < f.k) {                               // fully inside the layer (~98%)
      const double xv = static_cast<double>(m) * f.w;
      return std::bit_cast<double>(std::bit_cast<std::uint64_t>(xv) | sign_bit);
    }
    return slow_path(u & 255u, static_cast<double>(m) * f.w, sign_bit);
  }

 private:
  double slow_path(std::uint64_t layer, double xv, std::uint64_t sign_bit) {
    for (;;) {
      if (layer == 0) {  // tail beyond R (Marsaglia rejection)
        double xt, yt;
        do {
          xt = -std::log(rng_.next_unit_pos()) / detail::ZigguratTables::kR;
          yt = -std::log(rng_.next_unit_pos());
        } while (yt + yt < xt * xt);
        const double v = detail::ZigguratTables::kR + xt;
        return std::bit_cast<double>(std::bit_cast<std::uint64_t>(v) | sign_bit);
      }
      const double yv =
          tab_.y[layer] + rng_.next_unit() * (tab_.y[layer + 1] - tab_.y[layer]);
      if (yv < std::exp(-0.5 * xv * xv))
        return std::bit_cast<double>(std::bit_cast<std::uint64_t>(xv) | sign_bit);
      const std::uint64_t u = rng_.next();
      const std::uint64_t m = u >> 11;
      layer = u & 255u;
      const auto& f = tab_.fast[layer];
      xv = static_cast<double>(m) * f.w;
      if (m < f.k)
        return std::bit_cast<double>(std::bit_cast<std::uint64_t>(xv) | sign_bit);
    }
  }

  Xoshiro256pp rng_;
  const detail::ZigguratTables& tab_;
};

}  // namespace spde
