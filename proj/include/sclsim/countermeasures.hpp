#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sclsim/rng.hpp"

namespace sclsim {

/// Adds N(0, sigma_cm^2) per step.
struct NoiseInjector {
  double sigma_cm = 0.0;
};

/// Pulls each value toward `target`: v' = (1 - strength) * v + strength * target.
struct Equalizer {
  double strength = 1.0;
  double target = 0.0;
};

/// Circular shift of the window by a uniform offset in [0, max_shift] steps.
struct RandomDelay {
  std::uint32_t max_shift = 0;
};

using CountermeasureKind = std::variant<NoiseInjector, Equalizer, RandomDelay>;

std::string kind_name(const CountermeasureKind& kind);

/// Throws ConfigError (under `key`) on out-of-range parameters.
void validate(const CountermeasureKind& kind, const std::string& key);

/// Transforms one region's series for one window in place and returns the
/// extra energy spent.
double apply_cm(std::span<double> region_series, const CountermeasureKind& kind, Rng& rng);

struct OverheadReport {
  double extra_energy = 0.0;
  std::vector<std::uint64_t> windows_active;  // per acc

  explicit OverheadReport(std::size_t n_accs = 0) : windows_active(n_accs, 0) {}

  void add(double energy, std::uint32_t acc_id);
};

OverheadReport overhead_accumulate(OverheadReport report, double extra_energy, std::uint32_t acc_id);

}  // namespace sclsim
