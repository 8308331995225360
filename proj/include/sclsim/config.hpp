#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sclsim/aes.hpp"
#include "sclsim/controller.hpp"
#include "sclsim/countermeasures.hpp"
#include "sclsim/detection.hpp"
#include "sclsim/dut_model.hpp"
#include "sclsim/floorplan.hpp"

namespace sclsim {

enum class Mode : std::uint8_t { calibrate, run, attack, sweep };
enum class Regime : std::uint8_t { off, forced_on, adaptive };

std::string_view to_string(Mode mode);
std::string_view to_string(Regime regime);
std::optional<Mode> parse_mode(std::string_view s);

struct SensorConfig {
  std::uint32_t n_sensors = 4;
  SensorParams params{1000.0, 0.01, 1, 1.0};
  double kernel_scale = 1.0;
};

struct DetectorConfig {
  DetectorKind kind = DetectorKind::nicv_on(0);
  double score_scale = 10.0;
  std::uint64_t min_samples = 2048;  // per window position, nicv only
  double tvla_threshold = 4.5;
};

struct ControllerConfig {
  double th_low = 2.0;
  double th_high = 4.5;
  std::optional<std::vector<std::uint32_t>> sensor_acc_map;            // nullopt: identity
  std::optional<std::vector<std::vector<std::uint32_t>>> acc_regions;  // nullopt: nearest
};

/// Countermeasure armed on one acc. `auto_target` equalizers flatten
/// toward the calibration mean of each protected region.
struct ArmedCountermeasure {
  CountermeasureKind kind = NoiseInjector{32.0};
  bool auto_target = true;
};

struct CountermeasureConfig {
  ArmedCountermeasure base{};
  std::map<std::uint32_t, ArmedCountermeasure> per_acc;
  Regime regime = Regime::adaptive;
  std::uint64_t calib_traces = 256;

  const ArmedCountermeasure& for_acc(std::uint32_t acc) const {
    auto it = per_acc.find(acc);
    return it == per_acc.end() ? base : it->second;
  }
};

struct AttackConfig {
  bool enabled = true;
  double sigma_attacker = 40.0;
  std::uint8_t byte_index = 0;
  std::uint64_t step = 256;
  std::uint64_t max_traces = 16384;
  std::uint32_t capture_begin = 0;
  std::uint32_t capture_end = 48;
  std::uint32_t replications = 1;
};

struct SweepConfig {
  std::vector<double> th_high{4.5, 6.0, 8.0};
  std::vector<double> th_low{1.0, 1.5, 2.0};
  std::uint32_t replications = 1;
};

struct OutputConfig {
  bool events = true;
  bool scores = false;
  bool readings = false;
  bool region_traces = false;
  std::uint64_t max_export_traces = 64;
};

struct ExperimentConfig {
  Mode mode = Mode::run;
  std::uint64_t seed = 1;
  std::uint64_t n_traces = 8192;
  Block key = *parse_hex_block("2b7e151628aed2a6abf7158809cf4f3c");
  Block fixed_plaintext{};
  Floorplan floorplan = Floorplan::grid(4, 4);
  SensorConfig sensors{};
  LeakageModelParams leakage{2.0, 1.0, 0.5, LeakageMode::hamming_weight};
  DetectorConfig detector{};
  ControllerConfig controller{};
  CountermeasureConfig countermeasure{};
  AttackConfig attack{};
  SweepConfig sweep{};
  OutputConfig output{};
  unsigned threads = 1;  // not part of the report; results never depend on it

  /// Throws ConfigError naming the key path of the first violation.
  void validate() const;

  std::vector<SensorPlacement> sensor_placements() const;
  SensorAccMap resolve_acc_map(const SensorArray& sensors) const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; `#` starts a comment.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_value_file(const std::string& path);

/// Applies entries in order on top of `base` and validates the result.
ExperimentConfig apply_key_values(ExperimentConfig base, const KeyValues& entries);

/// Canonical key=value form with stable ordering; excludes `threads`.
KeyValues to_key_values(const ExperimentConfig& config);

std::string format_double(double v);

}  // namespace sclsim
