#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sclsim/detection.hpp"
#include "sclsim/floorplan.hpp"

namespace sclsim {

enum class AccMode : std::uint8_t { off, on };
enum class Transition : std::uint8_t { activated, deactivated };

std::string_view to_string(Transition t);

/// Two-threshold state machine of one adaptive countermeasure cell.
class HysteresisState {
 public:
  /// Throws InvalidThresholds unless 0 <= th_low < th_high, both finite.
  HysteresisState(double th_low, double th_high, AccMode mode = AccMode::off);

  AccMode mode() const { return mode_; }
  double th_low() const { return th_low_; }
  double th_high() const { return th_high_; }

 private:
  friend std::pair<HysteresisState, std::optional<Transition>> hysteresis_step(HysteresisState,
                                                                               double);
  AccMode mode_;
  double th_low_;
  double th_high_;
};

/// off -> on iff score >= th_high; on -> off iff score < th_low.
std::pair<HysteresisState, std::optional<Transition>> hysteresis_step(HysteresisState state,
                                                                      double score);

struct ControllerEvent {
  std::uint64_t window_idx = 0;
  std::uint32_t sensor_id = 0;
  std::uint32_t acc_id = 0;
  Transition transition = Transition::activated;
  double score = 0.0;
};

/// sensor -> acc, and acc -> protected regions.
struct SensorAccMap {
  std::vector<std::uint32_t> acc_of_sensor;
  std::vector<std::vector<std::uint32_t>> regions_of_acc;

  std::size_t acc_count() const { return regions_of_acc.size(); }

  /// One acc per sensor; each region goes to its nearest sensor's acc
  /// (ties to the lowest sensor id).
  static SensorAccMap nearest(const SensorArray& sensors, std::size_t n_regions);

  /// Throws ConfigError when a sensor points past the acc list or an acc
  /// protects no region.
  void validate(std::size_t n_sensors, std::size_t n_regions) const;
};

struct TickResult {
  std::vector<ControllerEvent> events;
  std::vector<bool> active_regions;
};

/// Applies hysteresis_step per acc, on the maximum score among the acc's
/// scored sensors. Accs with no scored sensor this window keep their mode.
TickResult controller_tick(std::span<const LeakageScore> scores, std::vector<HysteresisState>& states,
                           const SensorAccMap& map, std::size_t n_regions,
                           std::uint64_t window_idx);

std::vector<bool> active_regions(std::span<const HysteresisState> states, const SensorAccMap& map,
                                 std::size_t n_regions);

}  // namespace sclsim
