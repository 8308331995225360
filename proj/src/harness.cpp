#include "sclsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "sclsim/errors.hpp"

namespace sclsim {

std::size_t RegimeOutcome::activations() const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const ControllerEvent& e) {
    return e.transition == Transition::activated;
  }));
}

std::size_t mtd_rank(const std::optional<std::size_t>& mtd) {
  return mtd ? *mtd : std::numeric_limits<std::size_t>::max();
}

std::optional<std::size_t> median_mtd(std::vector<std::optional<std::size_t>> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return mtd_rank(a) < mtd_rank(b); });
  return values[(values.size() - 1) / 2];
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

void parallel_for(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& task) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), jobs));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

AttackOutcome evaluate_attack(const ExperimentConfig& config, const AttackTraceSet& traces) {
  AttackOutcome out;
  out.traces = traces.n_traces;
  const std::uint8_t byte = config.attack.byte_index;
  const std::uint8_t true_key = config.key[byte];
  out.mtd = measurements_to_disclosure(traces, byte, true_key, config.attack.step,
                                       std::min<std::size_t>(config.attack.max_traces, traces.n_traces));
  if (traces.n_traces >= 2) {
    CpaAccumulator acc(byte, traces.n_samples);
    for (std::size_t i = 0; i < traces.n_traces; ++i) acc.add(traces.plaintexts[i], traces.row(i));
    try {
      const auto rank = acc.rank(true_key);
      out.rank_of_true_key = rank.rank_of_true_key;
      out.top_guess = rank.ranked_guesses[0];
      out.true_key_corr = rank.max_abs_corr[true_key];
      out.max_abs_corr = rank.max_abs_corr;
    } catch (const AllColumnsDegenerate&) {
    }
  }
  return out;
}

}  // namespace

RegimeOutcome simulate_regime(const ExperimentConfig& config, Regime regime, std::uint64_t seed,
                              std::uint64_t n_traces, bool with_attack, RunArtifacts* artifacts) {
  SimulationOptions options;
  options.regime = regime;
  options.capture_attack = with_attack;
  if (artifacts) {
    options.record_scores = config.output.scores;
    if (config.output.readings || config.output.region_traces)
      options.export_traces = config.output.max_export_traces;
  }
  ClosedLoopSimulator sim(config, seed, options);
  for (std::uint64_t i = 0; i < n_traces; ++i) sim.run_trace();

  RegimeOutcome out;
  out.regime = regime;
  out.seed = seed;
  out.th_low = config.controller.th_low;
  out.th_high = config.controller.th_high;
  out.traces = sim.traces_run();
  out.epochs = sim.epochs();
  out.saturated_readings = sim.saturated_readings();
  out.events = sim.events();
  out.scores = sim.score_summary();
  out.overhead = sim.overhead();
  if (with_attack) out.attack = evaluate_attack(config, sim.attack_traces());
  if (artifacts) {
    artifacts->score_series = sim.score_series();
    artifacts->exported = sim.exported();
  }
  return out;
}

RunReport run_calibration(const ExperimentConfig& config) {
  const auto start = Clock::now();
  RunReport report;
  report.config = config;
  report.detector_name = DetectorKind::tvla().name();

  SimulationOptions options;
  options.regime = Regime::off;
  options.capture_attack = false;
  if (config.output.readings || config.output.region_traces)
    options.export_traces = config.output.max_export_traces;
  ClosedLoopSimulator sim(config, config.seed, options);

  const std::size_t n_sensors = sim.sensors().size();
  const std::size_t n_windows = sim.windows_per_trace();
  const std::size_t n_regions = config.floorplan.region_count();
  std::vector<TvlaSensorDetector> detectors(n_sensors, TvlaSensorDetector(n_windows));
  std::vector<WelfordAccumulator> region_acc(n_regions);

  CalibrationSummary cal;
  cal.traces = config.n_traces;
  cal.threshold = config.detector.tvla_threshold;
  cal.sensors.resize(n_sensors);
  for (std::size_t s = 0; s < n_sensors; ++s) cal.sensors[s].sensor_id = static_cast<std::uint32_t>(s);
  const std::uint64_t checkpoint_every = std::max<std::uint64_t>(1, config.n_traces / 16);

  for (std::uint64_t i = 0; i < config.n_traces; ++i) {
    const bool fixed = i % 2 == 0;
    sim.run_trace(fixed ? config.fixed_plaintext : sim.next_plaintext());

    const auto& counts = sim.last_counts();
    for (std::size_t w = 0; w < n_windows; ++w)
      for (std::size_t s = 0; s < n_sensors; ++s)
        detectors[s].update(w, fixed, static_cast<double>(counts[w * n_sensors + s]));
    if (!fixed) {
      const auto& trace = sim.last_trace();
      for (std::size_t t = 0; t < trace.n_steps; ++t)
        for (std::size_t r = 0; r < n_regions; ++r) region_acc[r].update(trace.at(t, r));
    }

    const bool checkpoint = (i + 1) % checkpoint_every == 0 || i + 1 == config.n_traces;
    TvlaCheckpoint cp;
    cp.traces = i + 1;
    for (std::size_t s = 0; s < n_sensors; ++s) {
      auto& sensor = cal.sensors[s];
      if (sensor.first_crossing && !checkpoint) continue;
      const auto t = detectors[s].max_abs_t();
      if (!sensor.first_crossing && t && *t >= cal.threshold) sensor.first_crossing = i + 1;
      if (checkpoint) cp.max_abs_t.push_back(t);
    }
    if (checkpoint) cal.series.push_back(std::move(cp));
  }
  for (std::size_t s = 0; s < n_sensors; ++s) {
    cal.sensors[s].max_abs_t = detectors[s].max_abs_t();
    cal.sensors[s].degenerate_positions = detectors[s].degenerate_positions();
  }
  for (const auto& acc : region_acc) cal.region_means.push_back(acc.mean);

  report.calibration = std::move(cal);
  report.exported = sim.exported();
  report.wall_clock_ms = elapsed_ms(start);
  return report;
}

RunReport run_closed_loop(const ExperimentConfig& config) {
  const auto start = Clock::now();
  RunReport report;
  report.config = config;
  report.detector_name = config.detector.kind.name();
  RunArtifacts artifacts;
  report.runs.push_back(simulate_regime(config, config.countermeasure.regime, config.seed,
                                        config.n_traces, config.attack.enabled, &artifacts));
  report.score_series = std::move(artifacts.score_series);
  report.exported = std::move(artifacts.exported);
  report.wall_clock_ms = elapsed_ms(start);
  return report;
}

RunReport run_attack_sweep(const ExperimentConfig& config) {
  const auto start = Clock::now();
  RunReport report;
  report.config = config;
  report.detector_name = config.detector.kind.name();
  const std::uint64_t n_traces = config.attack.max_traces;

  if (config.mode == Mode::sweep) {
    struct Point {
      double th_high, th_low;
    };
    std::vector<Point> grid;
    for (double hi : config.sweep.th_high)
      for (double lo : config.sweep.th_low) grid.push_back({hi, lo});
    const std::uint32_t reps = config.sweep.replications;
    report.runs.resize(grid.size() * reps);
    parallel_for(report.runs.size(), config.threads, [&](std::size_t job) {
      const auto& point = grid[job / reps];
      const auto rep = static_cast<std::uint32_t>(job % reps);
      ExperimentConfig cfg = config;
      cfg.controller.th_high = point.th_high;
      cfg.controller.th_low = point.th_low;
      auto outcome = simulate_regime(cfg, Regime::adaptive, config.seed ^ rep, n_traces, true);
      outcome.replication = rep;
      report.runs[job] = std::move(outcome);
    });
    for (std::size_t p = 0; p < grid.size(); ++p) {
      std::vector<std::optional<std::size_t>> mtds;
      std::vector<double> overheads;
      std::vector<double> activations;
      for (std::uint32_t r = 0; r < reps; ++r) {
        const auto& run = report.runs[p * reps + r];
        mtds.push_back(run.attack->mtd);
        overheads.push_back(run.overhead.extra_energy);
        activations.push_back(static_cast<double>(run.activations()));
      }
      report.frontier.push_back({grid[p].th_high, grid[p].th_low, median_mtd(mtds), median(overheads),
                                 static_cast<std::size_t>(median(activations))});
    }
  } else {
    constexpr std::array<Regime, 3> kRegimes = {Regime::off, Regime::adaptive, Regime::forced_on};
    const std::uint32_t reps = config.attack.replications;
    report.runs.resize(kRegimes.size() * reps);
    parallel_for(report.runs.size(), config.threads, [&](std::size_t job) {
      const auto regime = kRegimes[job / reps];
      const auto rep = static_cast<std::uint32_t>(job % reps);
      auto outcome = simulate_regime(config, regime, config.seed ^ rep, n_traces, true);
      outcome.replication = rep;
      report.runs[job] = std::move(outcome);
    });
    for (std::size_t g = 0; g < kRegimes.size(); ++g) {
      std::vector<std::optional<std::size_t>> mtds;
      std::vector<double> overheads;
      for (std::uint32_t r = 0; r < reps; ++r) {
        const auto& run = report.runs[g * reps + r];
        mtds.push_back(run.attack->mtd);
        overheads.push_back(run.overhead.extra_energy);
      }
      report.regimes.push_back({kRegimes[g], median_mtd(mtds), median(overheads)});
    }
  }
  report.wall_clock_ms = elapsed_ms(start);
  return report;
}

RunReport run_mode(const ExperimentConfig& config) {
  switch (config.mode) {
    case Mode::calibrate: return run_calibration(config);
    case Mode::run: return run_closed_loop(config);
    case Mode::attack:
    case Mode::sweep: return run_attack_sweep(config);
  }
  throw ConfigError("mode", "unsupported");
}

}  // namespace sclsim
