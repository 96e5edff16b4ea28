#pragma once

#include <cmath>
#include <cstdint>

namespace sliceattrib {

// Deterministic RNG used throughout the project.  We deliberately avoid
// std::normal_distribution and friends because their output sequences are
// implementation-defined; experiment reproducibility requires bit-identical
// streams on every platform.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derive an independent substream seed from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0xA0761D6478BD642FULL * (stream + 1));
  splitmix64(s);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {
    // Warm up so nearby seeds decorrelate.
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() { return splitmix64(s_); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // index in [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    // Modulo bias is negligible for the small n used here.
    return next_u64() % n;
  }

  // Standard normal via Box-Muller.  Two values per transform, cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape >= 0.01 assumed.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  // Student-t with dof nu, scaled to unit variance (requires nu > 2).
  double student_t_unit_variance(double nu) {
    const double z = normal();
    const double g = chi_squared(nu);
    const double t = z / std::sqrt(g / nu);
    return t * std::sqrt((nu - 2.0) / nu);
  }

 private:
  std::uint64_t s_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace sliceattrib
