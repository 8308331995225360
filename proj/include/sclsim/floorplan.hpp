#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sclsim/op_kind.hpp"
#include "sclsim/rng.hpp"

namespace sclsim {

struct GridCell {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Region id for every (op kind, state byte index) pair.
using OpMap = std::array<std::array<std::uint32_t, 16>, kOpKindCount>;

/// 2-D grid abstraction of the chip layout. Region ids are dense indices
/// into `regions`.
struct Floorplan {
  std::int32_t width = 0;
  std::int32_t height = 0;
  std::vector<GridCell> regions;
  OpMap op_map{};

  std::size_t region_count() const { return regions.size(); }
  std::uint32_t region_of(OpKind kind, std::size_t byte_index) const {
    return op_map[static_cast<std::size_t>(kind)][byte_index];
  }

  /// One region per cell, id = y * width + x; byte i of every op kind maps
  /// to region i mod region_count.
  static Floorplan grid(std::int32_t width, std::int32_t height);

  /// Throws ConfigError when a region lies outside the grid or the op map
  /// points past the region list.
  void validate() const;
};

struct SensorParams {
  double f0 = 1000.0;        // oscillations per time step, free running
  double gamma = 0.01;       // power-to-frequency sensitivity
  std::uint32_t window = 1;  // time steps per sampling window
  double sigma_jitter = 0.0; // count-domain noise

  void validate() const;
};

struct SensorPlacement {
  std::uint32_t sensor_id = 0;
  std::int32_t x = 0;
  std::int32_t y = 0;
};

struct SensorReading {
  std::uint32_t sensor_id = 0;
  std::uint64_t window_idx = 0;
  std::int64_t count = 0;
  bool saturated = false;
};

/// Spatial attenuation w(d) = 1 / (1 + (d / scale)^2), given d^2.
inline double attenuation(double distance_sq, double scale = 1.0) {
  return 1.0 / (1.0 + distance_sq / (scale * scale));
}

inline double distance_sq(std::int32_t ax, std::int32_t ay, std::int32_t bx, std::int32_t by) {
  const double dx = static_cast<double>(ax - bx);
  const double dy = static_cast<double>(ay - by);
  return dx * dx + dy * dy;
}

/// k x k sensors at the centres of a uniform partition of the grid:
/// coordinate i along a dimension is floor((2i + 1) * dim / (2k)).
std::vector<SensorPlacement> place_sensors_even(std::int32_t width, std::int32_t height,
                                                std::uint32_t n_sensors);

double local_power(std::span<const double> region_powers, const SensorPlacement& sensor,
                   const Floorplan& floorplan, double kernel_scale = 1.0);

/// Digital counter of a ring oscillator over `window_steps` steps given the
/// window-mean local power.
SensorReading ro_count(double mean_power, std::uint32_t window_steps, const SensorParams& params,
                       Rng& rng);

/// Sensors with their attenuation weights precomputed against a floorplan.
class SensorArray {
 public:
  SensorArray(const Floorplan& floorplan, std::vector<SensorPlacement> placements,
              double kernel_scale = 1.0);

  std::size_t size() const { return placements_.size(); }
  const std::vector<SensorPlacement>& placements() const { return placements_; }
  std::span<const double> weights(std::size_t sensor) const {
    return {weights_.data() + sensor * n_regions_, n_regions_};
  }

  /// Same arithmetic as local_power(), with cached weights.
  double local_power(std::size_t sensor, std::span<const double> region_powers) const;

  /// Sensor minimising distance to `region`, ties to the lowest id.
  std::uint32_t nearest_sensor(std::uint32_t region) const;

 private:
  std::vector<SensorPlacement> placements_;
  std::vector<GridCell> regions_;
  std::size_t n_regions_;
  std::vector<double> weights_;
};

}  // namespace sclsim
