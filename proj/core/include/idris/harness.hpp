#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "idris/baselines.hpp"
#include "idris/config.hpp"

namespace idris {

struct CalibrationResult {
    double margin_db = 0.0;          // new total margin
    double adjustment_db = 0.0;      // change applied to the previous margin
    double throughput_bps = 0.0;     // oracle optimum after calibration
    OracleOptimum optimum;
    double seconds = 0.0;
};

// Closed-form margin that maps the noise-free oracle optimum onto the
// scenario's calibration target. Updates config.radio in place.
CalibrationResult calibrate(ScenarioConfig& config);

// Rewrites (or appends) the calibration_margin line, leaving the rest of the file untouched.
void store_calibration_margin(const std::filesystem::path& path, double margin_db);

// A path as given, else `<scenario dir>/<name>.cfg`.
std::filesystem::path resolve_scenario(std::string_view name_or_path);

// Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace idris
