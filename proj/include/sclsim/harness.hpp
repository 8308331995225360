#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sclsim/attack_eval.hpp"
#include "sclsim/config.hpp"
#include "sclsim/controller.hpp"
#include "sclsim/countermeasures.hpp"
#include "sclsim/simulation.hpp"

namespace sclsim {

struct SensorTvla {
  std::uint32_t sensor_id = 0;
  std::optional<double> max_abs_t;                  // after all traces
  std::optional<std::uint64_t> first_crossing;      // traces until max |t| >= threshold
  std::size_t degenerate_positions = 0;
};

struct TvlaCheckpoint {
  std::uint64_t traces = 0;
  std::vector<std::optional<double>> max_abs_t;  // per sensor
};

struct CalibrationSummary {
  std::uint64_t traces = 0;
  double threshold = 4.5;
  std::vector<SensorTvla> sensors;
  std::vector<TvlaCheckpoint> series;
  std::vector<double> region_means;  // random-class traces only
};

struct AttackOutcome {
  std::optional<std::size_t> mtd;  // nullopt: not disclosed
  std::optional<std::size_t> rank_of_true_key;
  std::optional<std::uint8_t> top_guess;
  double true_key_corr = 0.0;
  std::array<double, 256> max_abs_corr{};
  std::size_t traces = 0;
};

/// One simulator run under one regime and seed.
struct RegimeOutcome {
  Regime regime = Regime::adaptive;
  std::uint64_t seed = 0;
  std::uint32_t replication = 0;
  double th_low = 0.0;
  double th_high = 0.0;
  std::uint64_t traces = 0;
  std::uint64_t epochs = 1;
  std::uint64_t saturated_readings = 0;
  std::vector<ControllerEvent> events;
  std::vector<ScoreSummary> scores;
  OverheadReport overhead;
  std::optional<AttackOutcome> attack;

  std::size_t activations() const;
};

struct RegimeSummary {
  Regime regime = Regime::adaptive;
  std::optional<std::size_t> median_mtd;
  double median_overhead = 0.0;
};

struct FrontierRow {
  double th_high = 0.0;
  double th_low = 0.0;
  std::optional<std::size_t> median_mtd;
  double median_overhead = 0.0;
  std::size_t median_activations = 0;
};

struct RunReport {
  ExperimentConfig config;
  std::optional<CalibrationSummary> calibration;
  std::vector<RegimeOutcome> runs;
  std::vector<RegimeSummary> regimes;  // attack mode
  std::vector<FrontierRow> frontier;   // sweep mode
  std::vector<LeakageScore> score_series;
  std::vector<ExportedTrace> exported;
  std::string detector_name;
  double wall_clock_ms = 0.0;
};

/// MTD ordering key: not-disclosed sorts after every count.
std::size_t mtd_rank(const std::optional<std::size_t>& mtd);

/// Lower median; not-disclosed entries sort last.
std::optional<std::size_t> median_mtd(std::vector<std::optional<std::size_t>> values);
double median(std::vector<double> values);

/// Runs `jobs` indexed tasks on `threads` workers. Results must be written
/// by index; the schedule never affects them.
void parallel_for(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& task);

/// TVLA calibration: strict fixed/random alternation, countermeasures off.
RunReport run_calibration(const ExperimentConfig& config);

/// One closed-loop run with the label-free detector and the controller.
RunReport run_closed_loop(const ExperimentConfig& config);

struct RunArtifacts {
  std::vector<LeakageScore> score_series;
  std::vector<ExportedTrace> exported;
};

/// Single simulation used by the run, attack and sweep modes. Artifacts
/// are collected per the config's output section when `artifacts` is set.
RegimeOutcome simulate_regime(const ExperimentConfig& config, Regime regime, std::uint64_t seed,
                              std::uint64_t n_traces, bool with_attack,
                              RunArtifacts* artifacts = nullptr);

/// attack: MTD under off / adaptive / forced-on with shared seeds.
/// sweep: (th_high, th_low) grid of the adaptive regime.
RunReport run_attack_sweep(const ExperimentConfig& config);

RunReport run_mode(const ExperimentConfig& config);

}  // namespace sclsim
