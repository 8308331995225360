#pragma once

#include <array>
#include <cstdint>

namespace sclsim {

/// Streaming first and second moments (Welford's recurrence).
struct WelfordAccumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void update(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  /// m2 / (n - 1); only meaningful for n >= 2.
  double sample_variance() const { return m2 / static_cast<double>(n - 1); }
  /// m2 / n; only meaningful for n >= 1.
  double population_variance() const { return m2 / static_cast<double>(n); }

  void reset() { *this = WelfordAccumulator{}; }
};

inline WelfordAccumulator welford_update(WelfordAccumulator acc, double x) {
  acc.update(x);
  return acc;
}

/// Per-class moments keyed by one observable byte, plus the pooled moments.
struct ClassedAccumulator {
  std::array<WelfordAccumulator, 256> classes{};
  WelfordAccumulator global{};

  void update(std::uint8_t cls, double x) {
    classes[cls].update(x);
    global.update(x);
  }

  void reset() { *this = ClassedAccumulator{}; }
};

}  // namespace sclsim
