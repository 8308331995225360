#pragma once

#include <filesystem>
#include <string>

#include "sclsim/harness.hpp"

namespace sclsim {

/// JSON run report with stable key order. Wall-clock time is only included
/// when `with_timing` is set, so default reports are a pure function of the
/// configuration.
std::string render_report(const RunReport& report, bool with_timing = false);

/// report.json plus the CSV artifacts enabled in the output section.
void write_outputs(const RunReport& report, const std::filesystem::path& dir, bool with_timing = false);

std::string frontier_csv(const RunReport& report);

}  // namespace sclsim
