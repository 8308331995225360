#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sclsim/attack_eval.hpp"
#include "sclsim/config.hpp"
#include "sclsim/controller.hpp"
#include "sclsim/countermeasures.hpp"
#include "sclsim/detection.hpp"
#include "sclsim/dut_model.hpp"
#include "sclsim/floorplan.hpp"
#include "sclsim/rng.hpp"

namespace sclsim {

struct SimulationOptions {
  Regime regime = Regime::adaptive;
  bool capture_attack = true;
  bool record_scores = false;          // last score of each sensor per encryption
  std::uint64_t export_traces = 0;     // keep readings + post-countermeasure power of the first N
  bool countermeasures = true;         // false: no countermeasure cells are built at all
};

struct ScoreSummary {
  std::optional<double> max;
  std::optional<double> final;
  std::uint64_t windows_scored = 0;
};

struct ExportedTrace {
  std::uint64_t trace_id = 0;
  RegionPowerTrace power;                 // post-countermeasure
  std::vector<SensorReading> readings;    // window-major
};

/// Mean power of every region over `n_traces` random encryptions; the
/// default equalizer targets.
std::vector<double> region_calibration_means(const ExperimentConfig& config, std::uint64_t seed,
                                             std::uint64_t n_traces);

/// The closed loop, one encryption at a time. Within each sensor window:
/// countermeasures on active regions, then sensing and attacker capture,
/// then detection and the controller tick that sets the regions active for
/// the next window.
class ClosedLoopSimulator {
 public:
  ClosedLoopSimulator(const ExperimentConfig& config, std::uint64_t seed, SimulationOptions options);

  /// Encrypts a plaintext drawn from the plaintext stream.
  void run_trace();
  void run_trace(const Block& plaintext);

  Block next_plaintext();

  std::uint64_t traces_run() const { return traces_run_; }
  std::size_t windows_per_trace() const { return n_windows_; }
  const SensorArray& sensors() const { return sensors_; }
  const SensorAccMap& acc_map() const { return map_; }

  /// Counts of the last encryption, [window][sensor].
  const std::vector<std::int64_t>& last_counts() const { return last_counts_; }
  const RegionPowerTrace& last_trace() const { return trace_; }
  const TracedEncryption& last_encryption() const { return encryption_; }

  const std::vector<ControllerEvent>& events() const { return events_; }
  const OverheadReport& overhead() const { return overhead_; }
  const AttackTraceSet& attack_traces() const { return attack_; }
  const std::vector<ScoreSummary>& score_summary() const { return summary_; }
  const std::vector<LeakageScore>& score_series() const { return score_series_; }
  const std::vector<ExportedTrace>& exported() const { return exported_; }
  std::uint64_t epochs() const { return epochs_; }
  std::uint64_t saturated_readings() const { return saturated_; }
  std::vector<AccMode> acc_modes() const;

 private:
  struct ArmedRegion {
    std::uint32_t region;
    CountermeasureKind kind;
  };

  void apply_countermeasures(std::size_t begin, std::size_t end);
  void reset_detectors();

  ExperimentConfig config_;
  SimulationOptions options_;
  SensorArray sensors_;
  SensorAccMap map_;
  RoundKeys round_keys_;
  std::size_t n_regions_;
  std::size_t n_steps_;
  std::size_t n_windows_;
  std::uint32_t capture_begin_;
  std::uint32_t capture_end_;

  Rng plaintext_rng_;
  Rng noise_rng_;
  Rng jitter_rng_;
  Rng cm_rng_;
  Rng attacker_rng_;

  std::vector<std::vector<ArmedRegion>> armed_;  // per acc
  std::vector<HysteresisState> states_;
  std::vector<bool> active_acc_;
  std::vector<bool> transformed_;
  std::vector<NicvSensorDetector> detectors_;

  TracedEncryption encryption_;
  RegionPowerTrace trace_;
  std::vector<double> series_buf_;
  std::vector<double> observable_row_;
  std::vector<std::int64_t> last_counts_;
  std::vector<LeakageScore> window_scores_;

  std::uint64_t traces_run_ = 0;
  std::uint64_t window_idx_ = 0;
  std::uint64_t epochs_ = 1;
  std::uint64_t saturated_ = 0;
  std::vector<ControllerEvent> events_;
  OverheadReport overhead_;
  AttackTraceSet attack_;
  std::vector<ScoreSummary> summary_;
  std::vector<LeakageScore> score_series_;
  std::vector<ExportedTrace> exported_;
};

}  // namespace sclsim
