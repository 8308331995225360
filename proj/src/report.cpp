#include "sclsim/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sclsim/errors.hpp"
#include "sclsim/trace_io.hpp"

namespace sclsim {
namespace {

using Json = nlohmann::ordered_json;

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json mtd_json(const std::optional<std::size_t>& mtd) {
  return mtd ? Json(*mtd) : Json("NotDisclosed");
}

Json event_json(const ControllerEvent& e) {
  Json j;
  j["window_idx"] = e.window_idx;
  j["sensor_id"] = e.sensor_id;
  j["acc_id"] = e.acc_id;
  j["transition"] = std::string(to_string(e.transition));
  j["score"] = e.score;
  return j;
}

Json run_json(const RegimeOutcome& run) {
  Json j;
  j["regime"] = std::string(to_string(run.regime));
  j["seed"] = run.seed;
  j["replication"] = run.replication;
  j["th_low"] = run.th_low;
  j["th_high"] = run.th_high;
  j["traces"] = run.traces;
  j["epochs"] = run.epochs;
  j["activations"] = run.activations();
  j["saturated_readings"] = run.saturated_readings;

  Json scores = Json::array();
  for (std::size_t s = 0; s < run.scores.size(); ++s) {
    Json sj;
    sj["sensor_id"] = s;
    sj["max"] = opt(run.scores[s].max);
    sj["final"] = opt(run.scores[s].final);
    sj["windows_scored"] = run.scores[s].windows_scored;
    scores.push_back(std::move(sj));
  }
  j["scores"] = std::move(scores);

  Json events = Json::array();
  for (const auto& e : run.events) events.push_back(event_json(e));
  j["events"] = std::move(events);

  Json overhead;
  overhead["extra_energy"] = run.overhead.extra_energy;
  overhead["windows_active"] = run.overhead.windows_active;
  j["overhead"] = std::move(overhead);

  if (run.attack) {
    const auto& a = *run.attack;
    Json aj;
    aj["traces"] = a.traces;
    aj["mtd"] = mtd_json(a.mtd);
    aj["rank_of_true_key"] = opt(a.rank_of_true_key);
    aj["top_guess"] = a.top_guess ? Json(static_cast<unsigned>(*a.top_guess)) : Json(nullptr);
    aj["true_key_corr"] = a.true_key_corr;
    j["attack"] = std::move(aj);
  }
  return j;
}

Json calibration_json(const CalibrationSummary& cal) {
  Json j;
  j["traces"] = cal.traces;
  j["threshold"] = cal.threshold;
  Json sensors = Json::array();
  for (const auto& s : cal.sensors) {
    Json sj;
    sj["sensor_id"] = s.sensor_id;
    sj["max_abs_t"] = opt(s.max_abs_t);
    sj["first_crossing"] = opt(s.first_crossing);
    sj["degenerate_positions"] = s.degenerate_positions;
    sensors.push_back(std::move(sj));
  }
  j["sensors"] = std::move(sensors);
  Json series = Json::array();
  for (const auto& cp : cal.series) {
    Json cj;
    cj["traces"] = cp.traces;
    Json ts = Json::array();
    for (const auto& t : cp.max_abs_t) ts.push_back(opt(t));
    cj["max_abs_t"] = std::move(ts);
    series.push_back(std::move(cj));
  }
  j["series"] = std::move(series);
  j["region_means"] = cal.region_means;
  return j;
}

std::string mtd_cell(const std::optional<std::size_t>& mtd) {
  return mtd ? std::to_string(*mtd) : "NotDisclosed";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::string render_report(const RunReport& report, bool with_timing) {
  Json j;
  j["mode"] = std::string(to_string(report.config.mode));
  j["seed"] = report.config.seed;
  j["detector"] = report.detector_name;

  Json config;
  for (const auto& [key, value] : to_key_values(report.config)) config[key] = value;
  j["config"] = std::move(config);

  if (report.calibration) j["calibration"] = calibration_json(*report.calibration);

  if (!report.runs.empty()) {
    Json runs = Json::array();
    for (const auto& run : report.runs) runs.push_back(run_json(run));
    j["runs"] = std::move(runs);
  }

  if (!report.regimes.empty()) {
    Json regimes = Json::array();
    for (const auto& r : report.regimes) {
      Json rj;
      rj["regime"] = std::string(to_string(r.regime));
      rj["median_mtd"] = mtd_json(r.median_mtd);
      rj["median_overhead"] = r.median_overhead;
      regimes.push_back(std::move(rj));
    }
    j["regimes"] = std::move(regimes);
  }

  if (!report.frontier.empty()) {
    Json frontier = Json::array();
    for (const auto& row : report.frontier) {
      Json fj;
      fj["th_high"] = row.th_high;
      fj["th_low"] = row.th_low;
      fj["median_mtd"] = mtd_json(row.median_mtd);
      fj["median_overhead"] = row.median_overhead;
      fj["median_activations"] = row.median_activations;
      frontier.push_back(std::move(fj));
    }
    j["frontier"] = std::move(frontier);
  }

  if (with_timing) j["wall_clock_ms"] = report.wall_clock_ms;
  return j.dump(2) + "\n";
}

std::string frontier_csv(const RunReport& report) {
  std::ostringstream out;
  out << "th_high,th_low,median_mtd,median_overhead,median_activations\n";
  for (const auto& row : report.frontier)
    out << format_double(row.th_high) << ',' << format_double(row.th_low) << ',' << mtd_cell(row.median_mtd)
        << ',' << format_double(row.median_overhead) << ',' << row.median_activations << '\n';
  return out.str();
}

void write_outputs(const RunReport& report, const std::filesystem::path& dir, bool with_timing) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", render_report(report, with_timing));
  const auto& out = report.config.output;

  if (!report.frontier.empty()) write_text(dir / "frontier.csv", frontier_csv(report));

  if (out.events) {
    if (report.runs.size() == 1) {
      write_events_csv(report.runs[0].events, dir / "events.csv");
    } else {
      for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const auto& run = report.runs[i];
        const auto name = "events_" + std::string(to_string(run.regime)) + "_" + std::to_string(i) + ".csv";
        write_events_csv(run.events, dir / name);
      }
    }
  }
  if (out.scores && !report.score_series.empty())
    write_scores_csv(report.score_series, report.detector_name, dir / "scores.csv");
  if (out.readings && !report.exported.empty()) write_readings_csv(report.exported, dir / "readings.csv");
  if (out.region_traces && !report.exported.empty()) export_traces(report.exported, dir / "traces.csv");

  if (report.config.mode == Mode::attack) {
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
      const auto& run = report.runs[i];
      if (!run.attack || run.replication != 0) continue;
      write_guesses_csv(run.attack->max_abs_corr,
                        dir / ("guesses_" + std::string(to_string(run.regime)) + ".csv"));
    }
  }
}

}  // namespace sclsim
