#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spclab/arl.hpp"
#include "spclab/charts.hpp"
#include "spclab/datagen.hpp"

namespace spclab {

/// Configuration-file errors carry a human-readable location (line number for
/// parse errors, key path for semantic errors).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json parse_config_text(const std::string& text);
nlohmann::json load_config_file(const std::string& path);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

ChartConfig chart_from_json(const nlohmann::json& j);
nlohmann::ordered_json chart_to_json(const ChartConfig& config);

// ---------------------------------------------------------------------------
// Command configurations.
// ---------------------------------------------------------------------------

struct SimulateSpec {
    ChartConfig chart;
    Scenario scenario;
    std::uint32_t replications = kDefaultReplications;
    std::uint32_t cap = kDefaultCap;
    std::uint64_t master_seed = kDefaultSeed;
    int workers = 0;
    bool emit_run_lengths = false;
};

struct CalibrateSpec {
    ChartConfig chart;
    Scenario scenario;  // in-control scenario (shift forced to 0)
    double target_arl0 = 500.0;
    double tolerance = 0.02;
    CalibrationBudget budget;
    std::uint64_t master_seed = kDefaultSeed;
    int workers = 0;
    // When set, calibrates the Sparks h-table over this grid instead of a
    // scalar limit.
    std::optional<std::vector<double>> sparks_grid;
};

struct CompareSpec {
    std::vector<std::string> chart_names;
    std::vector<ChartConfig> charts;
    Scenario clean;
    Scenario contaminated;
    std::vector<double> shifts;
    std::uint32_t replications = kDefaultReplications;
    std::uint32_t cap = kDefaultCap;
    std::uint64_t master_seed = kDefaultSeed;
    int workers = 0;
    double target_arl0 = 500.0;
    bool resolve_conventions = true;
    /// Charts whose measured in-control ARL deviates beyond this fraction are
    /// recalibrated before the tables are assembled.
    double recalibrate_beyond = 0.015;
    double recalibrate_tolerance = 0.01;
};

struct MonitorSpec {
    ChartConfig chart;
    int subgroup_size = 5;
    std::string input_csv;
};

SimulateSpec simulate_spec_from_json(const nlohmann::json& j);
CalibrateSpec calibrate_spec_from_json(const nlohmann::json& j);
CompareSpec compare_spec_from_json(const nlohmann::json& j);
MonitorSpec monitor_spec_from_json(const nlohmann::json& j);

nlohmann::ordered_json calibration_result_to_json(const CalibrationResult& r);
nlohmann::ordered_json summary_to_json(const RunLengthSummary& s);

}  // namespace spclab
