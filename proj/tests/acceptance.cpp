// Acceptance checks. One PASS/FAIL line per criterion; nonzero exit on any
// failure.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sclsim/aes.hpp"
#include "sclsim/attack_eval.hpp"
#include "sclsim/config.hpp"
#include "sclsim/controller.hpp"
#include "sclsim/detection.hpp"
#include "sclsim/harness.hpp"
#include "sclsim/report.hpp"
#include "sclsim/rng.hpp"
#include "sclsim/simulation.hpp"

using namespace sclsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300);
}

ExperimentConfig load(const std::string& name, const KeyValues& extra = {}) {
  auto kv = read_key_value_file(std::string(SCLSIM_CONFIG_DIR) + "/" + name);
  kv.insert(kv.end(), extra.begin(), extra.end());
  return apply_key_values({}, kv);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string mtd_str(const std::optional<std::size_t>& m) {
  return m ? std::to_string(*m) : std::string("NotDisclosed");
}

// 1 ---------------------------------------------------------------------

void streaming_vs_offline() {
  const auto t0 = Clock::now();
  const std::size_t n = 100000;
  Rng rng(20240601);
  std::vector<double> a(n), b(n);
  std::vector<std::uint8_t> cls(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.gaussian(2.0) + 1.0;
    b[i] = 1.05 + rng.gaussian(1.5);
    cls[i] = rng.byte();
  }

  WelfordAccumulator wa, wb;
  ClassedAccumulator classed;
  for (std::size_t i = 0; i < n; ++i) {
    wa.update(a[i]);
    wb.update(b[i]);
    classed.update(cls[i], a[i] + 0.02 * __builtin_popcount(cls[i]));
  }

  auto mean = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
  };
  auto var = [&](const std::vector<double>& x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
  };
  const double t_off = (mean(a) - mean(b)) / std::sqrt(var(a) / n + var(b) / n);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + 0.02 * __builtin_popcount(cls[i]);
  const double my = mean(y);
  std::vector<double> sum(256, 0.0), cnt(256, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum[cls[i]] += y[i];
    cnt[cls[i]] += 1.0;
    total += (y[i] - my) * (y[i] - my);
  }
  double between = 0.0;
  for (int c = 0; c < 256; ++c)
    if (cnt[c] > 0) between += cnt[c] * (sum[c] / cnt[c] - my) * (sum[c] / cnt[c] - my);
  const double nicv_off = between / total;

  const double t_stream = welch_t(wa, wb);
  const double nicv_stream = nicv(classed);
  const bool ok = rel_close(wa.mean, mean(a), 1e-9) && rel_close(wa.sample_variance(), var(a), 1e-9) &&
                  rel_close(t_stream, t_off, 1e-9) && rel_close(nicv_stream, nicv_off, 1e-9);
  const double secs = seconds_since(t0);
  verdict(1, ok && secs < 5.0,
          "welch_t " + fmt("%.12g", t_stream) + " vs " + fmt("%.12g", t_off) + ", nicv " +
              fmt("%.12g", nicv_stream) + " vs " + fmt("%.12g", nicv_off) + ", " + fmt("%.2f", secs) + " s");
}

// 2 ---------------------------------------------------------------------

void hand_values() {
  WelfordAccumulator x, y;
  for (double v : {1.0, 2.0, 3.0}) x.update(v);
  for (double v : {4.0, 5.0, 6.0}) y.update(v);
  const double t = welch_t(x, y);

  ClassedAccumulator c;
  c.update(0, 0.0);
  c.update(0, 2.0);
  c.update(1, 4.0);
  c.update(1, 6.0);
  const double v = nicv(c);

  const double r = pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4});
  const bool ok = std::abs(t - (-3.6742)) <= 1e-4 && v == 0.8 && std::abs(r - 0.98198) <= 1e-4;
  verdict(2, ok, "welch_t " + fmt("%.6f", t) + ", nicv " + fmt("%.17g", v) + ", pearson " + fmt("%.6f", r));
}

// 3 ---------------------------------------------------------------------

// Recomputes the mode from the whole history: on iff some score reached
// th_high and nothing after it fell below th_low.
bool reference_on(const int* s, int len, double lo, double hi) {
  for (int i = len - 1; i >= 0; --i) {
    bool held = true;
    for (int j = i + 1; j < len; ++j)
      if (s[j] < lo) held = false;
    if (s[i] >= hi && held) return true;
  }
  return false;
}

void hysteresis_exhaustive() {
  const auto t0 = Clock::now();
  const double lo = 2.0, hi = 4.5;
  std::size_t sequences = 0, mismatches = 0;
  for (int len = 0; len <= 8; ++len) {
    std::size_t count = 1;
    for (int i = 0; i < len; ++i) count *= 7;
    std::array<int, 8> s{};
    for (std::size_t code = 0; code < count; ++code) {
      std::size_t c = code;
      for (int i = 0; i < len; ++i) {
        s[i] = static_cast<int>(c % 7);
        c /= 7;
      }
      HysteresisState state(lo, hi);
      bool ok = !reference_on(s.data(), 0, lo, hi) && state.mode() == AccMode::off;
      for (int i = 0; i < len && ok; ++i) {
        const bool before = state.mode() == AccMode::on;
        auto [next, tr] = hysteresis_step(state, s[i]);
        state = next;
        const bool after = reference_on(s.data(), i + 1, lo, hi);
        ok = (state.mode() == AccMode::on) == after;
        if (before != after)
          ok = ok && tr == (after ? Transition::activated : Transition::deactivated);
        else
          ok = ok && !tr.has_value();
      }
      ++sequences;
      mismatches += !ok;
    }
  }
  const double secs = seconds_since(t0);
  verdict(3, mismatches == 0 && secs < 60.0,
          std::to_string(sequences) + " sequences, " + std::to_string(mismatches) + " mismatches, " +
              fmt("%.2f", secs) + " s");
}

// 4 ---------------------------------------------------------------------

void detection_power() {
  const auto cfg = load("calibration.cfg");
  const std::uint8_t target = aes::sbox(cfg.fixed_plaintext[0] ^ cfg.key[0]);
  const SensorArray sensors(cfg.floorplan, cfg.sensor_placements(), cfg.sensors.kernel_scale);
  const auto nearest = sensors.nearest_sensor(cfg.floorplan.region_of(OpKind::sbox_out, 0));
  const auto report = run_calibration(cfg);
  const auto& s = report.calibration->sensors.at(nearest);
  const bool power_ok = hamming_weight(target) != 4 && s.first_crossing && *s.first_crossing <= 5000;

  int quiet = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    auto null_cfg = load("calibration.cfg", {{"leakage.alpha", "0"},
                                             {"n_traces", "2000"},
                                             {"seed", std::to_string(1000 + trial)}});
    const auto r = run_calibration(null_cfg);
    bool below = true;
    for (const auto& st : r.calibration->sensors) below = below && st.max_abs_t && *st.max_abs_t < 4.5;
    quiet += below;
  }
  verdict(4, power_ok && quiet >= 95,
          "HW(target) " + std::to_string(hamming_weight(target)) + ", sensor " + std::to_string(nearest) +
              " crosses at " + (s.first_crossing ? std::to_string(*s.first_crossing) : "never") + " traces; " +
              std::to_string(quiet) + "/100 null trials below 4.5");
}

// 5 ---------------------------------------------------------------------

void localization() {
  int hits = 0;
  std::string misses;
  for (std::uint32_t r = 0; r < 16; ++r) {
    auto cfg = load("localization.cfg");
    for (auto& row : cfg.floorplan.op_map) row.fill(r);
    const SensorArray sensors(cfg.floorplan, cfg.sensor_placements(), cfg.sensors.kernel_scale);
    const auto want = sensors.nearest_sensor(r);
    const auto out = simulate_regime(cfg, Regime::adaptive, cfg.seed, cfg.n_traces, false);
    const ControllerEvent* first = nullptr;
    for (const auto& e : out.events)
      if (e.transition == Transition::activated) {
        first = &e;
        break;
      }
    if (first && first->sensor_id == want) {
      ++hits;
    } else {
      misses += " r" + std::to_string(r) + "->" + (first ? "s" + std::to_string(first->sensor_id) : "none");
    }
  }
  verdict(5, hits == 16, std::to_string(hits) + "/16 first activations at the nearest sensor" + misses);
}

// 6 ---------------------------------------------------------------------

void efficacy_ordering() {
  const auto cfg = load("reference.cfg");
  const auto report = run_attack_sweep(cfg);
  const RegimeSummary *off = nullptr, *adaptive = nullptr, *forced = nullptr;
  for (const auto& r : report.regimes) {
    if (r.regime == Regime::off) off = &r;
    if (r.regime == Regime::adaptive) adaptive = &r;
    if (r.regime == Regime::forced_on) forced = &r;
  }
  bool ordered = off && adaptive && forced && mtd_rank(off->median_mtd) <= mtd_rank(adaptive->median_mtd) &&
                 mtd_rank(adaptive->median_mtd) <= mtd_rank(forced->median_mtd) &&
                 adaptive->median_overhead < forced->median_overhead;

  auto quiet = load("reference.cfg", {{"leakage.sigma_noise", "0"},
                                      {"sensors.sigma_jitter", "0"},
                                      {"attack.sigma_attacker", "0"},
                                      {"attack.max_traces", "1024"},
                                      {"n_traces", "1024"}});
  const auto noiseless = simulate_regime(quiet, Regime::off, quiet.seed, quiet.n_traces, true);
  const bool first_checkpoint = noiseless.attack && noiseless.attack->mtd == quiet.attack.step;

  std::string detail = "median MTD off/adaptive/forced " + (off ? mtd_str(off->median_mtd) : "?") + "/" +
                       (adaptive ? mtd_str(adaptive->median_mtd) : "?") + "/" +
                       (forced ? mtd_str(forced->median_mtd) : "?") + ", overhead adaptive/forced " +
                       (adaptive ? fmt("%.4g", adaptive->median_overhead) : "?") + "/" +
                       (forced ? fmt("%.4g", forced->median_overhead) : "?") + ", noiseless MTD " +
                       (noiseless.attack ? mtd_str(noiseless.attack->mtd) : "?") + " (first checkpoint " +
                       std::to_string(quiet.attack.step) + ")";
  verdict(6, ordered && first_checkpoint, detail);
}

// 7 ---------------------------------------------------------------------

bool same_observables(const ClosedLoopSimulator& a, const ClosedLoopSimulator& b) {
  return a.attack_traces().observable == b.attack_traces().observable &&
         a.attack_traces().plaintexts == b.attack_traces().plaintexts;
}

bool same_scores(const ClosedLoopSimulator& a, const ClosedLoopSimulator& b) {
  bool same = a.score_summary().size() == b.score_summary().size() &&
              a.score_series().size() == b.score_series().size() && a.epochs() == b.epochs();
  for (std::size_t s = 0; same && s < a.score_summary().size(); ++s) {
    const auto& x = a.score_summary()[s];
    const auto& y = b.score_summary()[s];
    same = x.max == y.max && x.final == y.final && x.windows_scored == y.windows_scored;
  }
  for (std::size_t i = 0; same && i < a.score_series().size(); ++i)
    same = a.score_series()[i].value == b.score_series()[i].value;
  return same;
}

void inactivity_identity() {
  // Armed with an unreachable threshold, versus the same loop with no
  // countermeasure cells built, and versus the off regime.
  bool ok = true;
  std::string detail;
  const std::vector<ArmedCountermeasure> kinds = {{NoiseInjector{32.0}, false}, {Equalizer{1.0, 0.0}, true}};
  for (const auto& cm : kinds) {
    const auto kind = kind_name(cm.kind);
    auto cfg = load("reference.cfg", {{"controller.th_high", "1e9"}, {"n_traces", "3000"}});
    cfg.countermeasure.base = cm;
    ClosedLoopSimulator armed(cfg, cfg.seed, {Regime::adaptive, true, true, 0, true});
    ClosedLoopSimulator absent(cfg, cfg.seed, {Regime::adaptive, true, true, 0, false});
    ClosedLoopSimulator off(cfg, cfg.seed, {Regime::off, true, false, 0});
    bool same = true;
    for (std::uint64_t i = 0; i < cfg.n_traces && same; ++i) {
      armed.run_trace();
      absent.run_trace();
      off.run_trace();
      same = armed.last_trace().values == absent.last_trace().values &&
             armed.last_counts() == absent.last_counts() && armed.last_trace().values == off.last_trace().values &&
             armed.last_counts() == off.last_counts();
    }
    same = same && same_observables(armed, absent) && same_observables(armed, off) && same_scores(armed, absent);
    same = same && armed.events().empty() && armed.overhead().extra_energy == 0.0;
    std::uint64_t scored = 0;
    for (const auto& s : armed.score_summary()) scored += s.windows_scored;
    same = same && scored > 0;
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + kind + (same ? " bit-identical" : " DIFFERS");
  }
  verdict(7, ok, "3000 traces of power, counts, scores and attacker view: " + detail);
}

// 8 ---------------------------------------------------------------------

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SCLSIM_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism() {
  const auto dir = fs::temp_directory_path() / ("sclsim_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto cfg_path = dir / "small.cfg";
  {
    std::ofstream out(cfg_path);
    out << "n_traces = 1500\ndetector.min_samples = 256\nattack.max_traces = 1024\n"
           "sweep.th_high = 4.5,6\nsweep.th_low = 1,2\nsweep.replications = 2\nattack.replications = 2\n";
  }
  std::string detail;
  bool ok = true;
  for (const char* mode : {"calibrate", "run", "attack", "sweep"}) {
    std::vector<std::string> reports;
    for (const char* threads : {"1", "1", "4"}) {
      const auto out = dir / (std::string(mode) + "_" + std::to_string(reports.size()));
      const int rc = run_cli(std::string(mode) + " --config " + cfg_path.string() + " --seed 11 --threads " +
                             threads + " --out " + out.string());
      reports.push_back(rc == 0 ? read_file(out / "report.json") : std::string());
    }
    const bool same = !reports[0].empty() && reports[0] == reports[1] && reports[0] == reports[2];
    ok = ok && same;
    detail += std::string(detail.empty() ? "" : ", ") + mode + (same ? " identical" : " DIFFERS");
  }

  // in-process: the library path used by the CLI
  auto cfg = apply_key_values({}, read_key_value_file(cfg_path.string()));
  cfg.mode = Mode::sweep;
  const auto one = render_report(run_mode(cfg));
  cfg.threads = 3;
  const bool lib_same = render_report(run_mode(cfg)) == one;
  ok = ok && lib_same;
  detail += std::string(", in-process sweep ") + (lib_same ? "identical" : "DIFFERS") + " across 1/3 threads";

  fs::remove_all(dir);
  verdict(8, ok, detail);
}

}  // namespace

// With arguments, runs only the listed criteria.
int main(int argc, char** argv) {
  const std::array<void (*)(), 8> criteria = {streaming_vs_offline, hand_values,        hysteresis_exhaustive,
                                              detection_power,      localization,       efficacy_ordering,
                                              inactivity_identity,  determinism};
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected[id - 1] = true;
  }
  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i)
    if (selected[i]) criteria[i]();
  std::printf("%d failure(s), %.1f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
