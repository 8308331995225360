#include "sclsim/controller.hpp"

#include <cmath>
#include <string>

#include "sclsim/errors.hpp"

namespace sclsim {

std::string_view to_string(Transition t) {
  return t == Transition::activated ? "activated" : "deactivated";
}

HysteresisState::HysteresisState(double th_low, double th_high, AccMode mode)
    : mode_(mode), th_low_(th_low), th_high_(th_high) {
  if (!std::isfinite(th_low) || !std::isfinite(th_high) || th_low < 0.0 || !(th_low < th_high))
    throw InvalidThresholds();
}

std::pair<HysteresisState, std::optional<Transition>> hysteresis_step(HysteresisState state,
                                                                      double score) {
  if (state.mode_ == AccMode::off && score >= state.th_high_) {
    state.mode_ = AccMode::on;
    return {state, Transition::activated};
  }
  if (state.mode_ == AccMode::on && score < state.th_low_) {
    state.mode_ = AccMode::off;
    return {state, Transition::deactivated};
  }
  return {state, std::nullopt};
}

SensorAccMap SensorAccMap::nearest(const SensorArray& sensors, std::size_t n_regions) {
  SensorAccMap map;
  map.acc_of_sensor.resize(sensors.size());
  map.regions_of_acc.resize(sensors.size());
  for (std::uint32_t s = 0; s < sensors.size(); ++s) map.acc_of_sensor[s] = s;
  for (std::uint32_t r = 0; r < n_regions; ++r)
    map.regions_of_acc[sensors.nearest_sensor(r)].push_back(r);
  return map;
}

void SensorAccMap::validate(std::size_t n_sensors, std::size_t n_regions) const {
  if (acc_of_sensor.size() != n_sensors)
    throw ConfigError("controller.sensor_acc_map", "expected one acc per sensor (" +
                                                       std::to_string(n_sensors) + ")");
  for (auto acc : acc_of_sensor)
    if (acc >= regions_of_acc.size())
      throw ConfigError("controller.sensor_acc_map", "acc " + std::to_string(acc) + " undefined");
  for (std::size_t a = 0; a < regions_of_acc.size(); ++a) {
    if (regions_of_acc[a].empty())
      throw ConfigError("controller.acc_regions", "acc " + std::to_string(a) + " protects no region");
    for (auto r : regions_of_acc[a])
      if (r >= n_regions)
        throw ConfigError("controller.acc_regions", "region " + std::to_string(r) + " undefined");
  }
}

std::vector<bool> active_regions(std::span<const HysteresisState> states, const SensorAccMap& map,
                                 std::size_t n_regions) {
  std::vector<bool> active(n_regions, false);
  for (std::size_t a = 0; a < states.size(); ++a)
    if (states[a].mode() == AccMode::on)
      for (auto r : map.regions_of_acc[a]) active[r] = true;
  return active;
}

TickResult controller_tick(std::span<const LeakageScore> scores, std::vector<HysteresisState>& states,
                           const SensorAccMap& map, std::size_t n_regions,
                           std::uint64_t window_idx) {
  struct Best {
    bool present = false;
    double value = 0.0;
    std::uint32_t sensor = 0;
  };
  std::vector<Best> best(states.size());
  for (const auto& s : scores) {
    if (s.sensor_id >= map.acc_of_sensor.size()) throw UnmappedSensor(s.sensor_id);
    auto& b = best[map.acc_of_sensor[s.sensor_id]];
    if (!b.present || s.value > b.value || (s.value == b.value && s.sensor_id < b.sensor)) {
      b = {true, s.value, s.sensor_id};
    }
  }

  TickResult result;
  for (std::uint32_t a = 0; a < states.size(); ++a) {
    if (!best[a].present) continue;
    auto [next, transition] = hysteresis_step(states[a], best[a].value);
    states[a] = next;
    if (transition)
      result.events.push_back({window_idx, best[a].sensor, a, *transition, best[a].value});
  }
  result.active_regions = active_regions(states, map, n_regions);
  return result;
}

}  // namespace sclsim
