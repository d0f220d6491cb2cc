#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spclab/arl.hpp"

namespace spclab {

struct TableCell {
    double value = 0.0;  // ARL (inspections) or RARL
    double std_error = 0.0;
    std::uint32_t replications = 0;
    std::uint32_t truncated = 0;
    bool usable = true;
    std::string provenance;  // "simulated", "derived", or "error: ..."
};

struct TableMetadata {
    std::string scenario_label;
    Scenario scenario;  // base scenario; the shift is overridden per column
    std::uint64_t master_seed = 0;
    std::uint32_t replications = 0;
    std::uint32_t cap = 0;
    std::vector<std::string> notes;  // calibration / convention provenance
};

/// Chart-family x shift grid of run-length results.
struct ComparisonTable {
    std::string title;
    std::vector<std::string> chart_names;
    std::vector<double> shifts;
    std::vector<std::vector<TableCell>> cells;  // [row][column]
    TableMetadata meta;
};

/// Fills the grid with estimate_arl results, one private stream domain per
/// cell. Deterministic in (charts, scenario, shifts, replications, seed).
ComparisonTable assemble_table(std::span<const ChartConfig> charts,
                               std::span<const std::string> names,
                               const Scenario& base_scenario,
                               std::span<const double> shifts,
                               std::uint32_t replications, std::uint32_t cap,
                               std::uint64_t master_seed, int workers,
                               std::string title, std::string scenario_label,
                               std::uint64_t table_domain_offset = 0);

/// Relative-ARL table: per row, k = nominal_arl0 / cell(shift=0), every cell
/// k * value. Rows whose shift-0 cell is unusable or non-positive are marked
/// as errors rather than dropped. Throws if no shift-0 column exists.
ComparisonTable rarl_table(double nominal_arl0,
                           const ComparisonTable& contaminated);

enum class TableFormat { csv, json, text };
TableFormat table_format_from_name(std::string_view name);
std::string_view table_format_name(TableFormat format);

/// csv: header row `chart,delta_0.0,...`, full-precision values.
/// json: full metadata and per-cell standard errors; round-trips exactly.
/// text: aligned grid at one decimal, mirroring the reference layout.
std::string emit(const ComparisonTable& table, TableFormat format);

nlohmann::ordered_json table_to_json(const ComparisonTable& table);
ComparisonTable table_from_json(const nlohmann::json& j);

bool operator==(const TableCell& a, const TableCell& b);
bool operator==(const TableMetadata& a, const TableMetadata& b);
bool operator==(const Scenario& a, const Scenario& b);
bool operator==(const ComparisonTable& a, const ComparisonTable& b);

}  // namespace spclab
