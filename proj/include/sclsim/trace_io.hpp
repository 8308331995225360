#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sclsim/attack_eval.hpp"
#include "sclsim/controller.hpp"
#include "sclsim/detection.hpp"
#include "sclsim/dut_model.hpp"
#include "sclsim/simulation.hpp"

namespace sclsim {

inline constexpr const char* kRegionTraceHeader = "trace_id,time_idx,region_id,power";
inline constexpr const char* kPlaintextHeader = "trace_id,plaintext";
inline constexpr const char* kReadingHeader = "trace_id,window_idx,sensor_id,count";
inline constexpr const char* kScoreHeader = "sensor_id,window_idx,detector,score";
inline constexpr const char* kEventHeader = "window_idx,sensor_id,acc_id,transition,score";
inline constexpr const char* kGuessHeader = "key_guess,max_abs_corr";

/// Sidecar holding the plaintext of every exported trace:
/// `traces.csv` -> `traces.plaintexts.csv`.
std::filesystem::path plaintext_sidecar(const std::filesystem::path& traces_csv);

/// Writes the region power CSV and its plaintext sidecar. Values carry 17
/// significant digits.
void export_traces(std::span<const ExportedTrace> traces, const std::filesystem::path& path);

/// Reads a region power CSV (and its sidecar) back into per-trace matrices.
/// Throws EmptyTraceFile, or TraceFileError naming the offending line.
std::vector<RegionPowerTrace> import_region_traces(const std::filesystem::path& path);

/// Attacker view of an exported file: total power over regions per step.
AttackTraceSet import_traces(const std::filesystem::path& path);

void write_readings_csv(std::span<const ExportedTrace> traces, const std::filesystem::path& path);
void write_scores_csv(std::span<const LeakageScore> scores, const std::string& detector,
                      const std::filesystem::path& path);
void write_events_csv(std::span<const ControllerEvent> events, const std::filesystem::path& path);
void write_guesses_csv(const std::array<double, 256>& max_abs_corr, const std::filesystem::path& path);

}  // namespace sclsim
