#pragma once

#include <filesystem>
#include <string>

#include "tunnelscout/mission.hpp"
#include "tunnelscout/sim_world.hpp"
#include "tunnelscout/wind_bench.hpp"

namespace tunnelscout {

/// Strict JSON scenario parser. Every section and key is optional except
/// tunnel.length/width/height; unknown keys are rejected. Errors carry the
/// dotted field path, and the line number for syntax errors.
Scenario parse_scenario(const std::string& text);

/// Full JSON form with every field spelled out.
std::string serialize_scenario(const Scenario& scenario);

std::string report_json(const RunReport& report, const Scenario& scenario);

std::string calibration_json(const WindCalibration& cal);
WindCalibration parse_calibration(const std::string& text);

std::string drift_report_json(const DriftReport& report, const WindTestConfig& cfg, double gain);

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace tunnelscout
