#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sclsim/welford.hpp"

namespace sclsim {

enum class StatStatus : std::uint8_t { ok, insufficient_samples, degenerate_variance };

/// Non-throwing statistic result for hot loops.
struct StatResult {
  StatStatus status = StatStatus::ok;
  double value = 0.0;

  bool ok() const { return status == StatStatus::ok; }
};

/// Welch's t between two streamed populations, using sample variances.
StatResult welch_t_checked(const WelfordAccumulator& a, const WelfordAccumulator& b) noexcept;
double welch_t(const WelfordAccumulator& a, const WelfordAccumulator& b);

/// Normalized inter-class variance Var(E[P|X]) / Var(P) with population
/// variances and count-weighted class means.
StatResult nicv_checked(const ClassedAccumulator& classed) noexcept;
double nicv(const ClassedAccumulator& classed);

struct DetectorKind {
  enum class Type : std::uint8_t { tvla_fixed_random, nicv };

  Type type = Type::nicv;
  std::uint8_t byte_index = 0;  // plaintext byte conditioned on (nicv only)

  static DetectorKind tvla() { return {Type::tvla_fixed_random, 0}; }
  static DetectorKind nicv_on(std::uint8_t byte_index) { return {Type::nicv, byte_index}; }

  std::string name() const;
};

struct LeakageScore {
  std::uint32_t sensor_id = 0;
  std::uint64_t window_idx = 0;
  double value = 0.0;
};

/// Fixed/random class pair for the TVLA detector.
struct TvlaState {
  WelfordAccumulator fixed;
  WelfordAccumulator random;
};

/// |t|. Throws what welch_t throws.
LeakageScore score(const DetectorKind& kind, const TvlaState& state, std::uint32_t sensor_id,
                   std::uint64_t window_idx);

/// nicv * score_scale. Throws what nicv throws.
LeakageScore score(const DetectorKind& kind, const ClassedAccumulator& state, double score_scale,
                   std::uint32_t sensor_id, std::uint64_t window_idx);

/// Run-mode detector of one sensor. Each sampling-window position within an
/// encryption keeps its own classed accumulator; the sensor statistic is the
/// maximum NICV over positions holding at least `min_samples` samples.
class NicvSensorDetector {
 public:
  NicvSensorDetector(std::size_t n_positions, std::uint64_t min_samples);

  void update(std::size_t position, std::uint8_t cls, double sample);
  std::optional<double> max_nicv() const;
  std::size_t argmax_position() const { return best_pos_; }
  const ClassedAccumulator& position(std::size_t p) const { return positions_[p]; }
  std::size_t n_positions() const { return positions_.size(); }
  void reset();

 private:
  void rescan();

  std::vector<ClassedAccumulator> positions_;
  std::vector<double> cached_;  // NaN when not ready
  std::uint64_t min_samples_;
  double best_;
  std::size_t best_pos_ = 0;
};

/// Calibration-mode detector of one sensor: a fixed/random pair per
/// window position; the statistic is max |t| over positions.
class TvlaSensorDetector {
 public:
  explicit TvlaSensorDetector(std::size_t n_positions);

  void update(std::size_t position, bool fixed_class, double sample);
  /// Positions where welch_t is not defined are skipped.
  std::optional<double> max_abs_t() const;
  std::size_t degenerate_positions() const;
  const TvlaState& position(std::size_t p) const { return positions_[p]; }

 private:
  std::vector<TvlaState> positions_;
};

}  // namespace sclsim
