#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "idris/config.hpp"

namespace idris {

// Shortest text that reads back to exactly the same double (17 significant digits).
std::string format_number(double v);
double parse_number(std::string_view text, const std::string& key);
// `a..b` or a single seed.
SeedRange parse_seed_range(std::string_view text, const std::string& key);

// Line-oriented `key = value` format; `#` starts a comment.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const ScenarioConfig& config);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace idris
