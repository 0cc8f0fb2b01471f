#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace newsseg {

/// Deterministic random stream. Wraps the (fully specified) mt19937_64
/// engine and draws values without going through std distributions, whose
/// output is implementation-defined. Same seed -> same bytes everywhere.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : engine_(seed) {}
  RngStream(uint64_t seed, uint64_t stream)
      : engine_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_int(uint64_t n) {
    // Rejection sampling keeps the draw unbiased.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (one value per call; the pair's second
  /// half is discarded to keep call sites order-independent).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Normal truncated to [-2, 2] standard deviations, then scaled.
  double truncated_normal(double stddev) {
    double x;
    do {
      x = normal();
    } while (x < -2.0 || x > 2.0);
    return x * stddev;
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace newsseg
