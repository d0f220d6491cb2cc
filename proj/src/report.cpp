#include "spclab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace spclab {

namespace {

// Shortest round-trip decimal form; keeps emitted files byte-deterministic.
std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw std::runtime_error("failed to format number");
    }
    return std::string(buffer, ptr);
}

std::string shift_label(double shift) {
    std::string s = format_double(shift);
    if (s.find('.') == std::string::npos &&
        s.find('e') == std::string::npos) {
        s += ".0";
    }
    return "delta_" + s;
}

std::string fixed1(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.1f", value);
    return buffer;
}

}  // namespace

ComparisonTable assemble_table(std::span<const ChartConfig> charts,
                               std::span<const std::string> names,
                               const Scenario& base_scenario,
                               std::span<const double> shifts,
                               std::uint32_t replications, std::uint32_t cap,
                               std::uint64_t master_seed, int workers,
                               std::string title, std::string scenario_label,
                               std::uint64_t table_domain_offset) {
    if (charts.size() != names.size()) {
        throw std::invalid_argument("assemble_table: one name per chart");
    }
    ComparisonTable table;
    table.title = std::move(title);
    table.chart_names.assign(names.begin(), names.end());
    table.shifts.assign(shifts.begin(), shifts.end());
    table.meta.scenario_label = std::move(scenario_label);
    table.meta.scenario = base_scenario;
    table.meta.master_seed = master_seed;
    table.meta.replications = replications;
    table.meta.cap = cap;

    table.cells.resize(charts.size());
    for (std::size_t row = 0; row < charts.size(); ++row) {
        table.cells[row].resize(shifts.size());
        for (std::size_t col = 0; col < shifts.size(); ++col) {
            Scenario scenario = base_scenario;
            scenario.shift = shifts[col];
            const std::uint64_t domain =
                kStreamDomainTableBase + table_domain_offset +
                row * shifts.size() + col;
            const RunLengthSummary summary =
                estimate_arl(charts[row], scenario, replications, cap,
                             master_seed, workers, domain);
            TableCell& cell = table.cells[row][col];
            cell.value = summary.arl;
            cell.std_error = summary.std_error;
            cell.replications = summary.replications;
            cell.truncated = summary.truncated;
            cell.usable = summary.usable;
            cell.provenance = "simulated";
        }
    }
    return table;
}

ComparisonTable rarl_table(double nominal_arl0,
                           const ComparisonTable& contaminated) {
    if (!(nominal_arl0 > 0.0)) {
        throw std::invalid_argument("rarl_table: nominal ARL0 must be positive");
    }
    const auto zero_col = std::find(contaminated.shifts.begin(),
                                    contaminated.shifts.end(), 0.0);
    if (zero_col == contaminated.shifts.end()) {
        throw std::invalid_argument("rarl_table: no shift-0 column");
    }
    const auto zero_idx =
        static_cast<std::size_t>(zero_col - contaminated.shifts.begin());

    ComparisonTable table = contaminated;
    table.title = "Relative ARL (contaminated data)";
    for (std::size_t row = 0; row < table.cells.size(); ++row) {
        const TableCell& base = contaminated.cells[row][zero_idx];
        const bool base_ok = base.usable && base.value > 0.0;
        const double k = base_ok ? nominal_arl0 / base.value : 0.0;
        for (auto& cell : table.cells[row]) {
            if (!base_ok) {
                cell.usable = false;
                cell.provenance = "error: unusable shift-0 cell";
                cell.value = 0.0;
                cell.std_error = 0.0;
                continue;
            }
            cell.value = k * cell.value;
            cell.std_error = k * cell.std_error;
            cell.provenance = "derived";
        }
    }
    table.meta.notes.push_back(
        "rarl normalization: nominal ARL0 " + format_double(nominal_arl0) +
        " over the shift-0 column of '" + contaminated.meta.scenario_label +
        "'");
    return table;
}

TableFormat table_format_from_name(std::string_view name) {
    if (name == "csv") return TableFormat::csv;
    if (name == "json") return TableFormat::json;
    if (name == "text") return TableFormat::text;
    throw std::invalid_argument("unknown table format: " + std::string(name));
}

std::string_view table_format_name(TableFormat format) {
    switch (format) {
        case TableFormat::csv: return "csv";
        case TableFormat::json: return "json";
        case TableFormat::text: return "text";
    }
    throw std::invalid_argument("unknown table format");
}

std::string emit(const ComparisonTable& table, TableFormat format) {
    switch (format) {
        case TableFormat::csv: {
            std::ostringstream out;
            out << "chart";
            for (const double shift : table.shifts) {
                out << ',' << shift_label(shift);
            }
            out << '\n';
            for (std::size_t row = 0; row < table.chart_names.size(); ++row) {
                out << table.chart_names[row];
                for (const auto& cell : table.cells[row]) {
                    out << ',';
                    if (cell.usable) {
                        out << format_double(cell.value);
                    } else {
                        out << "NA";
                    }
                }
                out << '\n';
            }
            return out.str();
        }
        case TableFormat::json:
            return table_to_json(table).dump(2) + "\n";
        case TableFormat::text: {
            std::ostringstream out;
            out << table.title << '\n';
            out << "scenario: " << table.meta.scenario_label
                << "  replications: " << table.meta.replications
                << "  seed: " << table.meta.master_seed << '\n';
            std::size_t label_width = 14;
            for (const auto& name : table.chart_names) {
                label_width = std::max(label_width, name.size() + 2);
            }
            out << std::string(label_width, ' ');
            for (const double shift : table.shifts) {
                const std::string s = fixed1(shift);
                out << std::string(9 - s.size(), ' ') << s;
            }
            out << '\n';
            for (std::size_t row = 0; row < table.chart_names.size(); ++row) {
                const std::string& name = table.chart_names[row];
                out << name << std::string(label_width - name.size(), ' ');
                for (const auto& cell : table.cells[row]) {
                    const std::string s =
                        cell.usable ? fixed1(cell.value) : std::string("NA");
                    out << std::string(9 - std::min<std::size_t>(9, s.size()),
                                       ' ')
                        << s;
                }
                out << '\n';
            }
            return out.str();
        }
    }
    throw std::invalid_argument("unknown table format");
}

nlohmann::ordered_json table_to_json(const ComparisonTable& table) {
    nlohmann::ordered_json j;
    j["title"] = table.title;
    j["metadata"] = {
        {"scenario_label", table.meta.scenario_label},
        {"scenario",
         {{"delta", table.meta.scenario.shift},
          {"theta", table.meta.scenario.contamination_fraction},
          {"sigma2_c", table.meta.scenario.contamination_variance},
          {"in_control_variance", table.meta.scenario.in_control_variance},
          {"subgroup_size", table.meta.scenario.subgroup_size}}},
        {"master_seed", table.meta.master_seed},
        {"replications", table.meta.replications},
        {"cap", table.meta.cap},
        {"notes", table.meta.notes},
    };
    j["shifts"] = table.shifts;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t row = 0; row < table.chart_names.size(); ++row) {
        nlohmann::ordered_json cells = nlohmann::ordered_json::array();
        for (const auto& cell : table.cells[row]) {
            cells.push_back({{"value", cell.value},
                             {"std_error", cell.std_error},
                             {"replications", cell.replications},
                             {"truncated", cell.truncated},
                             {"usable", cell.usable},
                             {"provenance", cell.provenance}});
        }
        rows.push_back({{"chart", table.chart_names[row]}, {"cells", cells}});
    }
    j["rows"] = rows;
    return j;
}

ComparisonTable table_from_json(const nlohmann::json& j) {
    ComparisonTable table;
    table.title = j.at("title").get<std::string>();
    const auto& meta = j.at("metadata");
    table.meta.scenario_label = meta.at("scenario_label").get<std::string>();
    const auto& sc = meta.at("scenario");
    table.meta.scenario.shift = sc.at("delta").get<double>();
    table.meta.scenario.contamination_fraction = sc.at("theta").get<double>();
    table.meta.scenario.contamination_variance =
        sc.at("sigma2_c").get<double>();
    table.meta.scenario.in_control_variance =
        sc.at("in_control_variance").get<double>();
    table.meta.scenario.subgroup_size = sc.at("subgroup_size").get<int>();
    table.meta.master_seed = meta.at("master_seed").get<std::uint64_t>();
    table.meta.replications = meta.at("replications").get<std::uint32_t>();
    table.meta.cap = meta.at("cap").get<std::uint32_t>();
    table.meta.notes = meta.at("notes").get<std::vector<std::string>>();
    table.shifts = j.at("shifts").get<std::vector<double>>();
    for (const auto& row : j.at("rows")) {
        table.chart_names.push_back(row.at("chart").get<std::string>());
        std::vector<TableCell> cells;
        for (const auto& c : row.at("cells")) {
            TableCell cell;
            cell.value = c.at("value").get<double>();
            cell.std_error = c.at("std_error").get<double>();
            cell.replications = c.at("replications").get<std::uint32_t>();
            cell.truncated = c.at("truncated").get<std::uint32_t>();
            cell.usable = c.at("usable").get<bool>();
            cell.provenance = c.at("provenance").get<std::string>();
            cells.push_back(std::move(cell));
        }
        table.cells.push_back(std::move(cells));
    }
    return table;
}

bool operator==(const TableCell& a, const TableCell& b) {
    return a.value == b.value && a.std_error == b.std_error &&
           a.replications == b.replications && a.truncated == b.truncated &&
           a.usable == b.usable && a.provenance == b.provenance;
}

bool operator==(const Scenario& a, const Scenario& b) {
    return a.shift == b.shift &&
           a.contamination_fraction == b.contamination_fraction &&
           a.contamination_variance == b.contamination_variance &&
           a.in_control_variance == b.in_control_variance &&
           a.subgroup_size == b.subgroup_size;
}

bool operator==(const TableMetadata& a, const TableMetadata& b) {
    return a.scenario_label == b.scenario_label && a.scenario == b.scenario &&
           a.master_seed == b.master_seed &&
           a.replications == b.replications && a.cap == b.cap &&
           a.notes == b.notes;
}

bool operator==(const ComparisonTable& a, const ComparisonTable& b) {
    return a.title == b.title && a.chart_names == b.chart_names &&
           a.shifts == b.shifts && a.cells == b.cells && a.meta == b.meta;
}

}  // namespace spclab
