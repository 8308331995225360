#include "sclsim/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "sclsim/errors.hpp"

namespace sclsim {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_uint(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw TraceFileError(line, "malformed integer '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
    throw TraceFileError(line, "malformed number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceFileError(0, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void check_header(const std::vector<std::string>& lines, std::string_view expected) {
  if (lines.empty()) throw EmptyTraceFile();
  const auto got = split_csv(lines[0]);
  const auto want = split_csv(expected);
  if (got.size() != want.size())
    throw TraceFileError(1, "expected columns '" + std::string(expected) + "', got '" + lines[0] + "'");
  for (std::size_t i = 0; i < want.size(); ++i)
    if (got[i] != want[i])
      throw TraceFileError(1, "expected column '" + std::string(want[i]) + "', got '" + std::string(got[i]) + "'");
}

}  // namespace

std::filesystem::path plaintext_sidecar(const std::filesystem::path& traces_csv) {
  auto p = traces_csv;
  p.replace_extension(".plaintexts.csv");
  return p;
}

void export_traces(std::span<const ExportedTrace> traces, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kRegionTraceHeader << '\n';
  for (const auto& tr : traces)
    for (std::size_t t = 0; t < tr.power.n_steps; ++t)
      for (std::size_t r = 0; r < tr.power.n_regions; ++r)
        out << tr.trace_id << ',' << t << ',' << r << ',' << fmt17(tr.power.at(t, r)) << '\n';

  auto side = open_out(plaintext_sidecar(path));
  side << kPlaintextHeader << '\n';
  for (const auto& tr : traces) side << tr.trace_id << ',' << to_hex(tr.power.plaintext) << '\n';
}

std::vector<RegionPowerTrace> import_region_traces(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  check_header(lines, kRegionTraceHeader);
  if (lines.size() < 2) throw EmptyTraceFile();

  struct Row {
    std::uint64_t trace, time, region;
    double power;
  };
  std::vector<Row> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto f = split_csv(lines[i]);
    if (f.size() != 4) throw TraceFileError(line_no, "expected 4 columns, got " + std::to_string(f.size()));
    rows.push_back({parse_uint(f[0], line_no), parse_uint(f[1], line_no), parse_uint(f[2], line_no),
                    parse_real(f[3], line_no)});
  }

  // Dimensions come from the first trace; every trace must be a dense
  // time-major block of the same shape.
  std::size_t n_regions = 0;
  while (n_regions < rows.size() && rows[n_regions].trace == rows[0].trace && rows[n_regions].time == 0)
    ++n_regions;
  std::size_t per_trace = 0;
  while (per_trace < rows.size() && rows[per_trace].trace == rows[0].trace) ++per_trace;
  if (n_regions == 0 || per_trace % n_regions != 0)
    throw TraceFileError(2, "dimension mismatch in first trace");
  const std::size_t n_steps = per_trace / n_regions;
  if (rows.size() % per_trace != 0)
    throw TraceFileError(lines.size(), "dimension mismatch: truncated trace");

  std::vector<RegionPowerTrace> traces(rows.size() / per_trace);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    auto& tr = traces[k];
    tr.n_steps = n_steps;
    tr.n_regions = n_regions;
    tr.values.resize(per_trace);
    const std::uint64_t id = rows[k * per_trace].trace;
    for (std::size_t j = 0; j < per_trace; ++j) {
      const auto& row = rows[k * per_trace + j];
      if (row.trace != id || row.time != j / n_regions || row.region != j % n_regions)
        throw TraceFileError(k * per_trace + j + 2, "dimension mismatch: unexpected (trace, time, region)");
      tr.values[j] = row.power;
    }
  }

  const auto side_path = plaintext_sidecar(path);
  const auto side = read_lines(side_path);
  check_header(side, kPlaintextHeader);
  if (side.size() - 1 != traces.size())
    throw TraceFileError(0, side_path.string() + ": expected " + std::to_string(traces.size()) + " plaintexts");
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto f = split_csv(side[k + 1]);
    if (f.size() != 2) throw TraceFileError(k + 2, side_path.string() + ": expected 2 columns");
    if (parse_uint(f[0], k + 2) != rows[k * per_trace].trace)
      throw TraceFileError(k + 2, side_path.string() + ": trace id mismatch");
    auto pt = parse_hex_block(f[1]);
    if (!pt) throw TraceFileError(k + 2, side_path.string() + ": malformed plaintext");
    traces[k].plaintext = *pt;
  }
  return traces;
}

AttackTraceSet import_traces(const std::filesystem::path& path) {
  const auto traces = import_region_traces(path);
  AttackTraceSet set(traces.front().n_steps, 0);
  std::vector<double> row(set.n_samples);
  for (const auto& tr : traces) {
    for (std::size_t t = 0; t < tr.n_steps; ++t) {
      double total = 0.0;
      for (double v : tr.row(t)) total += v;
      row[t] = total;
    }
    set.append(tr.plaintext, row);
  }
  return set;
}

void write_readings_csv(std::span<const ExportedTrace> traces, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kReadingHeader << '\n';
  for (const auto& tr : traces)
    for (const auto& r : tr.readings)
      out << tr.trace_id << ',' << r.window_idx << ',' << r.sensor_id << ',' << r.count << '\n';
}

void write_scores_csv(std::span<const LeakageScore> scores, const std::string& detector,
                      const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kScoreHeader << '\n';
  for (const auto& s : scores)
    out << s.sensor_id << ',' << s.window_idx << ',' << detector << ',' << fmt17(s.value) << '\n';
}

void write_events_csv(std::span<const ControllerEvent> events, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kEventHeader << '\n';
  for (const auto& e : events)
    out << e.window_idx << ',' << e.sensor_id << ',' << e.acc_id << ',' << to_string(e.transition) << ','
        << fmt17(e.score) << '\n';
}

void write_guesses_csv(const std::array<double, 256>& max_abs_corr, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kGuessHeader << '\n';
  for (std::size_t k = 0; k < 256; ++k) out << k << ',' << fmt17(max_abs_corr[k]) << '\n';
}

}  // namespace sclsim
