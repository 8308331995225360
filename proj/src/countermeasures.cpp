#include "sclsim/countermeasures.hpp"

#include <algorithm>
#include <cmath>

#include "sclsim/errors.hpp"

namespace sclsim {

std::string kind_name(const CountermeasureKind& kind) {
  struct {
    std::string operator()(const NoiseInjector&) const { return "noise_injector"; }
    std::string operator()(const Equalizer&) const { return "equalizer"; }
    std::string operator()(const RandomDelay&) const { return "random_delay"; }
  } visitor;
  return std::visit(visitor, kind);
}

void validate(const CountermeasureKind& kind, const std::string& key) {
  if (const auto* n = std::get_if<NoiseInjector>(&kind)) {
    if (!(n->sigma_cm >= 0.0) || !std::isfinite(n->sigma_cm))
      throw ConfigError(key + ".sigma_cm", "must be >= 0");
  } else if (const auto* e = std::get_if<Equalizer>(&kind)) {
    if (!(e->strength >= 0.0 && e->strength <= 1.0))
      throw ConfigError(key + ".strength", "must be in [0, 1]");
    if (!std::isfinite(e->target)) throw ConfigError(key + ".target", "must be finite");
  }
}

double apply_cm(std::span<double> region_series, const CountermeasureKind& kind, Rng& rng) {
  double extra = 0.0;
  if (const auto* n = std::get_if<NoiseInjector>(&kind)) {
    for (auto& v : region_series) {
      const double added = rng.gaussian(n->sigma_cm);
      v += added;
      extra += std::abs(added);
    }
  } else if (const auto* e = std::get_if<Equalizer>(&kind)) {
    const double keep = 1.0 - e->strength;
    for (auto& v : region_series) {
      const double pulled = keep * v + e->strength * e->target;
      extra += std::max(0.0, pulled - v);
      v = pulled;
    }
  } else if (const auto* d = std::get_if<RandomDelay>(&kind)) {
    if (!region_series.empty()) {
      const auto offset = rng.uniform_int(0, d->max_shift) % region_series.size();
      std::rotate(region_series.rbegin(), region_series.rbegin() + static_cast<std::ptrdiff_t>(offset),
                  region_series.rend());
    }
  }
  return extra;
}

void OverheadReport::add(double energy, std::uint32_t acc_id) {
  extra_energy += energy;
  if (acc_id >= windows_active.size()) windows_active.resize(acc_id + 1, 0);
  ++windows_active[acc_id];
}

OverheadReport overhead_accumulate(OverheadReport report, double extra_energy, std::uint32_t acc_id) {
  report.add(extra_energy, acc_id);
  return report;
}

}  // namespace sclsim
