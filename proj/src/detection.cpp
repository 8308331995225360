#include "sclsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sclsim/errors.hpp"

namespace sclsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void raise(StatStatus status) {
  if (status == StatStatus::insufficient_samples) throw InsufficientSamples("detection");
  throw DegenerateVariance("detection");
}

}  // namespace

StatResult welch_t_checked(const WelfordAccumulator& a, const WelfordAccumulator& b) noexcept {
  if (a.n < 2 || b.n < 2) return {StatStatus::insufficient_samples, 0.0};
  const double denom_sq = a.sample_variance() / static_cast<double>(a.n) +
                          b.sample_variance() / static_cast<double>(b.n);
  const double diff = a.mean - b.mean;
  if (denom_sq == 0.0) {
    if (diff == 0.0) return {StatStatus::ok, 0.0};
    return {StatStatus::degenerate_variance, 0.0};
  }
  return {StatStatus::ok, diff / std::sqrt(denom_sq)};
}

double welch_t(const WelfordAccumulator& a, const WelfordAccumulator& b) {
  const auto r = welch_t_checked(a, b);
  if (!r.ok()) raise(r.status);
  return r.value;
}

StatResult nicv_checked(const ClassedAccumulator& classed) noexcept {
  const auto& g = classed.global;
  if (g.n < 2) return {StatStatus::insufficient_samples, 0.0};
  int populated = 0;
  double between = 0.0;
  for (const auto& c : classed.classes) {
    if (c.n == 0) continue;
    ++populated;
    const double d = c.mean - g.mean;
    between += static_cast<double>(c.n) * d * d;
  }
  if (populated < 2) return {StatStatus::insufficient_samples, 0.0};
  if (g.m2 == 0.0) return {StatStatus::degenerate_variance, 0.0};
  // Both variances share the 1/N factor.
  return {StatStatus::ok, between / g.m2};
}

double nicv(const ClassedAccumulator& classed) {
  const auto r = nicv_checked(classed);
  if (!r.ok()) raise(r.status);
  return r.value;
}

std::string DetectorKind::name() const {
  if (type == Type::tvla_fixed_random) return "tvla_fixed_random";
  return "nicv(" + std::to_string(byte_index) + ")";
}

LeakageScore score(const DetectorKind& kind, const TvlaState& state, std::uint32_t sensor_id,
                   std::uint64_t window_idx) {
  if (kind.type != DetectorKind::Type::tvla_fixed_random)
    throw std::invalid_argument("score: TVLA state given to a non-TVLA detector");
  return {sensor_id, window_idx, std::abs(welch_t(state.fixed, state.random))};
}

LeakageScore score(const DetectorKind& kind, const ClassedAccumulator& state, double score_scale,
                   std::uint32_t sensor_id, std::uint64_t window_idx) {
  if (kind.type != DetectorKind::Type::nicv)
    throw std::invalid_argument("score: classed state given to a non-NICV detector");
  return {sensor_id, window_idx, nicv(state) * score_scale};
}

NicvSensorDetector::NicvSensorDetector(std::size_t n_positions, std::uint64_t min_samples)
    : positions_(n_positions),
      cached_(n_positions, kNaN),
      min_samples_(min_samples < 2 ? 2 : min_samples),
      best_(kNaN) {}

void NicvSensorDetector::update(std::size_t position, std::uint8_t cls, double sample) {
  auto& acc = positions_[position];
  acc.update(cls, sample);
  double value = kNaN;
  if (acc.global.n >= min_samples_) {
    const auto r = nicv_checked(acc);
    if (r.ok()) value = r.value;
  }
  cached_[position] = value;

  if (!std::isnan(value) && (std::isnan(best_) || value > best_ ||
                             (value == best_ && position < best_pos_))) {
    best_ = value;
    best_pos_ = position;
  } else if (position == best_pos_ && !std::isnan(best_)) {
    rescan();
  }
}

void NicvSensorDetector::rescan() {
  best_ = kNaN;
  best_pos_ = 0;
  for (std::size_t p = 0; p < cached_.size(); ++p) {
    if (std::isnan(cached_[p])) continue;
    if (std::isnan(best_) || cached_[p] > best_) {
      best_ = cached_[p];
      best_pos_ = p;
    }
  }
}

std::optional<double> NicvSensorDetector::max_nicv() const {
  if (std::isnan(best_)) return std::nullopt;
  return best_;
}

void NicvSensorDetector::reset() {
  for (auto& p : positions_) p.reset();
  std::fill(cached_.begin(), cached_.end(), kNaN);
  best_ = kNaN;
  best_pos_ = 0;
}

TvlaSensorDetector::TvlaSensorDetector(std::size_t n_positions) : positions_(n_positions) {}

void TvlaSensorDetector::update(std::size_t position, bool fixed_class, double sample) {
  auto& s = positions_[position];
  (fixed_class ? s.fixed : s.random).update(sample);
}

std::optional<double> TvlaSensorDetector::max_abs_t() const {
  std::optional<double> best;
  for (const auto& s : positions_) {
    const auto r = welch_t_checked(s.fixed, s.random);
    if (!r.ok()) continue;
    const double v = std::abs(r.value);
    if (!best || v > *best) best = v;
  }
  return best;
}

std::size_t TvlaSensorDetector::degenerate_positions() const {
  std::size_t count = 0;
  for (const auto& s : positions_)
    if (welch_t_checked(s.fixed, s.random).status == StatStatus::degenerate_variance) ++count;
  return count;
}

}  // namespace sclsim
