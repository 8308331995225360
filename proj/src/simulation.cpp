#include "sclsim/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "sclsim/errors.hpp"

namespace sclsim {
namespace {

Block random_block(Rng& rng) {
  Block b{};
  for (auto& x : b) x = rng.byte();
  return b;
}

}  // namespace

std::vector<double> region_calibration_means(const ExperimentConfig& config, std::uint64_t seed,
                                             std::uint64_t n_traces) {
  const auto n_regions = config.floorplan.region_count();
  std::vector<double> means(n_regions, 0.0);
  if (n_traces == 0) return means;
  Rng rng(seed, Stream::calibration);
  const auto round_keys = aes::expand_key(config.key);
  TracedEncryption enc;
  RegionPowerTrace trace;
  std::vector<WelfordAccumulator> acc(n_regions);
  for (std::uint64_t i = 0; i < n_traces; ++i) {
    aes128_encrypt_traced(random_block(rng), round_keys, config.floorplan, enc);
    emit_power(enc, n_regions, config.leakage, rng, trace);
    for (std::size_t t = 0; t < trace.n_steps; ++t)
      for (std::size_t r = 0; r < n_regions; ++r) acc[r].update(trace.at(t, r));
  }
  for (std::size_t r = 0; r < n_regions; ++r) means[r] = acc[r].mean;
  return means;
}

ClosedLoopSimulator::ClosedLoopSimulator(const ExperimentConfig& config, std::uint64_t seed,
                                         SimulationOptions options)
    : config_(config),
      options_(options),
      sensors_(config_.floorplan, config_.sensor_placements(), config_.sensors.kernel_scale),
      map_(config_.resolve_acc_map(sensors_)),
      round_keys_(aes::expand_key(config_.key)),
      n_regions_(config_.floorplan.region_count()),
      n_steps_(kEventsPerEncryption),
      n_windows_((kEventsPerEncryption + config_.sensors.params.window - 1) /
                 config_.sensors.params.window),
      capture_begin_(config_.attack.capture_begin),
      capture_end_(config_.attack.capture_end),
      plaintext_rng_(seed, Stream::plaintext),
      noise_rng_(seed, Stream::leakage_noise),
      jitter_rng_(seed, Stream::sensor_jitter),
      cm_rng_(seed, Stream::countermeasure),
      attacker_rng_(seed, Stream::attacker_noise),
      active_acc_(map_.acc_count(), options.regime == Regime::forced_on),
      transformed_(n_regions_, false),
      overhead_(map_.acc_count()),
      attack_(capture_end_ - capture_begin_, capture_begin_),
      summary_(sensors_.size()) {
  map_.validate(sensors_.size(), n_regions_);
  states_.assign(map_.acc_count(),
                 HysteresisState(config_.controller.th_low, config_.controller.th_high));

  if (options_.regime != Regime::off && options_.countermeasures) {
    bool needs_targets = false;
    for (std::uint32_t a = 0; a < map_.acc_count(); ++a) {
      const auto& armed = config_.countermeasure.for_acc(a);
      needs_targets |= std::holds_alternative<Equalizer>(armed.kind) && armed.auto_target;
    }
    std::vector<double> targets;
    if (needs_targets)
      targets = region_calibration_means(config_, seed, config_.countermeasure.calib_traces);
    armed_.resize(map_.acc_count());
    for (std::uint32_t a = 0; a < map_.acc_count(); ++a) {
      const auto& armed = config_.countermeasure.for_acc(a);
      for (auto r : map_.regions_of_acc[a]) {
        CountermeasureKind kind = armed.kind;
        if (auto* eq = std::get_if<Equalizer>(&kind); eq && armed.auto_target) eq->target = targets[r];
        armed_[a].push_back({r, kind});
      }
    }
  }

  if (options_.regime == Regime::adaptive) {
    detectors_.reserve(sensors_.size());
    for (std::size_t s = 0; s < sensors_.size(); ++s)
      detectors_.emplace_back(n_windows_, config_.detector.min_samples);
  }
  last_counts_.resize(n_windows_ * sensors_.size());
  observable_row_.resize(attack_.n_samples);
}

Block ClosedLoopSimulator::next_plaintext() { return random_block(plaintext_rng_); }

void ClosedLoopSimulator::run_trace() { run_trace(next_plaintext()); }

std::vector<AccMode> ClosedLoopSimulator::acc_modes() const {
  std::vector<AccMode> modes(active_acc_.size());
  for (std::size_t a = 0; a < modes.size(); ++a) modes[a] = active_acc_[a] ? AccMode::on : AccMode::off;
  return modes;
}

void ClosedLoopSimulator::apply_countermeasures(std::size_t begin, std::size_t end) {
  const std::size_t len = end - begin;
  series_buf_.resize(len);
  bool any = false;
  for (std::uint32_t a = 0; a < armed_.size(); ++a) {
    if (!active_acc_[a]) continue;
    double energy = 0.0;
    for (const auto& armed : armed_[a]) {
      if (transformed_[armed.region]) continue;
      transformed_[armed.region] = true;
      any = true;
      for (std::size_t i = 0; i < len; ++i) series_buf_[i] = trace_.at(begin + i, armed.region);
      energy += apply_cm(series_buf_, armed.kind, cm_rng_);
      for (std::size_t i = 0; i < len; ++i) trace_.at(begin + i, armed.region) = series_buf_[i];
    }
    overhead_.add(energy, a);
  }
  if (any) std::fill(transformed_.begin(), transformed_.end(), false);
}

void ClosedLoopSimulator::reset_detectors() {
  for (auto& d : detectors_) d.reset();
  ++epochs_;
}

void ClosedLoopSimulator::run_trace(const Block& plaintext) {
  aes128_encrypt_traced(plaintext, round_keys_, config_.floorplan, encryption_);
  emit_power(encryption_, n_regions_, config_.leakage, noise_rng_, trace_);

  const std::size_t window = config_.sensors.params.window;
  const std::size_t n_sensors = sensors_.size();
  const bool exporting = traces_run_ < options_.export_traces;
  std::vector<SensorReading> exported_readings;
  const std::uint8_t cls = plaintext[config_.detector.kind.byte_index];
  const double scale = config_.detector.score_scale;

  for (std::size_t w = 0; w < n_windows_; ++w, ++window_idx_) {
    const std::size_t begin = w * window;
    const std::size_t end = std::min(begin + window, n_steps_);
    const auto steps = static_cast<std::uint32_t>(end - begin);

    if (!armed_.empty()) apply_countermeasures(begin, end);

    for (std::size_t s = 0; s < n_sensors; ++s) {
      double sum = 0.0;
      for (std::size_t t = begin; t < end; ++t) sum += sensors_.local_power(s, trace_.row(t));
      auto reading = ro_count(sum / steps, steps, config_.sensors.params, jitter_rng_);
      reading.sensor_id = static_cast<std::uint32_t>(s);
      reading.window_idx = window_idx_;
      if (reading.saturated) ++saturated_;
      last_counts_[w * n_sensors + s] = reading.count;
      if (exporting) exported_readings.push_back(reading);
    }

    if (options_.capture_attack) {
      const std::size_t lo = std::max<std::size_t>(begin, capture_begin_);
      const std::size_t hi = std::min<std::size_t>(end, capture_end_);
      for (std::size_t t = lo; t < hi; ++t) {
        double total = 0.0;
        for (double v : trace_.row(t)) total += v;
        observable_row_[t - capture_begin_] = total + attacker_rng_.gaussian(config_.attack.sigma_attacker);
      }
    }

    if (options_.regime != Regime::adaptive) continue;

    window_scores_.clear();
    for (std::size_t s = 0; s < n_sensors; ++s) {
      detectors_[s].update(w, cls, static_cast<double>(last_counts_[w * n_sensors + s]));
      if (auto v = detectors_[s].max_nicv()) {
        const LeakageScore score{static_cast<std::uint32_t>(s), window_idx_, *v * scale};
        window_scores_.push_back(score);
        auto& sum = summary_[s];
        if (!sum.max || score.value > *sum.max) sum.max = score.value;
        sum.final = score.value;
        ++sum.windows_scored;
      }
    }
    if (window_scores_.empty()) continue;
    auto tick = controller_tick(window_scores_, states_, map_, n_regions_, window_idx_);
    if (!tick.events.empty()) {
      events_.insert(events_.end(), tick.events.begin(), tick.events.end());
      for (std::size_t a = 0; a < states_.size(); ++a) active_acc_[a] = states_[a].mode() == AccMode::on;
      reset_detectors();
    }
  }

  if (options_.record_scores && options_.regime == Regime::adaptive) {
    for (std::size_t s = 0; s < n_sensors; ++s)
      if (summary_[s].final)
        score_series_.push_back({static_cast<std::uint32_t>(s), window_idx_ - 1, *summary_[s].final});
  }
  if (options_.capture_attack) attack_.append(plaintext, observable_row_);
  if (exporting) exported_.push_back({traces_run_, trace_, std::move(exported_readings)});
  ++traces_run_;
}

}  // namespace sclsim
