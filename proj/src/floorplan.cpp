#include "sclsim/floorplan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sclsim/errors.hpp"

namespace sclsim {

Floorplan Floorplan::grid(std::int32_t width, std::int32_t height) {
  Floorplan fp;
  fp.width = width;
  fp.height = height;
  for (std::int32_t y = 0; y < height; ++y)
    for (std::int32_t x = 0; x < width; ++x) fp.regions.push_back({x, y});
  const auto n = static_cast<std::uint32_t>(fp.regions.size());
  for (auto& row : fp.op_map)
    for (std::uint32_t i = 0; i < 16; ++i) row[i] = n == 0 ? 0 : i % n;
  return fp;
}

void Floorplan::validate() const {
  if (width <= 0) throw ConfigError("floorplan.width", "must be positive");
  if (height <= 0) throw ConfigError("floorplan.height", "must be positive");
  if (regions.empty()) throw ConfigError("floorplan.regions", "at least one region required");
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& c = regions[r];
    if (c.x < 0 || c.x >= width || c.y < 0 || c.y >= height)
      throw ConfigError("floorplan.regions", "region " + std::to_string(r) + " outside the grid");
  }
  for (std::size_t k = 0; k < kOpKindCount; ++k)
    for (auto region : op_map[k])
      if (region >= regions.size())
        throw ConfigError("floorplan.op_map." + std::string(kOpKindNames[k]),
                          "region " + std::to_string(region) + " does not exist");
}

void SensorParams::validate() const {
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw ConfigError("sensors.f0", "must be > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("sensors.gamma", "must be >= 0");
  if (window < 1) throw ConfigError("sensors.window", "must be >= 1");
  if (!(sigma_jitter >= 0.0) || !std::isfinite(sigma_jitter))
    throw ConfigError("sensors.sigma_jitter", "must be >= 0");
}

std::vector<SensorPlacement> place_sensors_even(std::int32_t width, std::int32_t height,
                                                std::uint32_t n_sensors) {
  const auto k = static_cast<std::uint32_t>(std::lround(std::sqrt(static_cast<double>(n_sensors))));
  if (n_sensors == 0 || k * k != n_sensors)
    throw PlacementError("sensors.n_sensors", "NotPerfectSquare: " + std::to_string(n_sensors));
  if (static_cast<std::int64_t>(k) > width || static_cast<std::int64_t>(k) > height)
    throw PlacementError("sensors.n_sensors", "GridTooSmall: " + std::to_string(k) + "x" +
                                                  std::to_string(k) + " sensors on " +
                                                  std::to_string(width) + "x" +
                                                  std::to_string(height));
  auto centre = [k](std::uint32_t i, std::int32_t dim) {
    return static_cast<std::int32_t>((2 * static_cast<std::int64_t>(i) + 1) * dim / (2 * k));
  };
  std::vector<SensorPlacement> out;
  out.reserve(n_sensors);
  for (std::uint32_t j = 0; j < k; ++j)
    for (std::uint32_t i = 0; i < k; ++i)
      out.push_back({static_cast<std::uint32_t>(out.size()), centre(i, width), centre(j, height)});
  return out;
}

double local_power(std::span<const double> region_powers, const SensorPlacement& sensor,
                   const Floorplan& floorplan, double kernel_scale) {
  double sum = 0.0;
  for (std::size_t r = 0; r < region_powers.size(); ++r) {
    const auto& c = floorplan.regions[r];
    sum += region_powers[r] * attenuation(distance_sq(sensor.x, sensor.y, c.x, c.y), kernel_scale);
  }
  return sum;
}

SensorReading ro_count(double mean_power, std::uint32_t window_steps, const SensorParams& params,
                       Rng& rng) {
  const double droop = params.gamma * mean_power;
  const double ideal = std::max(0.0, params.f0 * window_steps * (1.0 - droop));
  const double noisy = std::round(ideal + rng.gaussian(params.sigma_jitter));
  SensorReading reading;
  reading.count = noisy > 0.0 ? static_cast<std::int64_t>(noisy) : 0;
  reading.saturated = droop >= 1.0;
  return reading;
}

SensorArray::SensorArray(const Floorplan& floorplan, std::vector<SensorPlacement> placements,
                         double kernel_scale)
    : placements_(std::move(placements)),
      regions_(floorplan.regions),
      n_regions_(floorplan.region_count()),
      weights_(placements_.size() * n_regions_) {
  for (std::size_t s = 0; s < placements_.size(); ++s)
    for (std::size_t r = 0; r < n_regions_; ++r) {
      const auto& p = placements_[s];
      const auto& c = regions_[r];
      weights_[s * n_regions_ + r] = attenuation(distance_sq(p.x, p.y, c.x, c.y), kernel_scale);
    }
}

double SensorArray::local_power(std::size_t sensor, std::span<const double> region_powers) const {
  const double* w = weights_.data() + sensor * n_regions_;
  double sum = 0.0;
  for (std::size_t r = 0; r < n_regions_; ++r) sum += region_powers[r] * w[r];
  return sum;
}

std::uint32_t SensorArray::nearest_sensor(std::uint32_t region) const {
  const auto& c = regions_.at(region);
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : placements_) {
    const double d = distance_sq(p.x, p.y, c.x, c.y);
    if (d < best_d) {
      best_d = d;
      best = p.sensor_id;
    }
  }
  return best;
}

}  // namespace sclsim
