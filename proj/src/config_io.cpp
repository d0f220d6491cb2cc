#include "spclab/config_io.hpp"

#include <fstream>
#include <sstream>

namespace spclab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) {
    throw ConfigError(message);
}

// nlohmann reports byte offsets; translate to a line number for diagnostics.
[[noreturn]] void fail_parse(const std::string& text,
                             const json::parse_error& error) {
    std::size_t line = 1;
    const std::size_t limit = std::min(text.size(), error.byte);
    for (std::size_t i = 0; i < limit; ++i) {
        if (text[i] == '\n') ++line;
    }
    fail("config parse error at line " + std::to_string(line) + ": " +
         error.what());
}

template <typename T>
T get_field(const json& j, const std::string& key) {
    if (!j.contains(key)) {
        fail("missing config key '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail("bad value for config key '" + key + "': " + e.what());
    }
}

template <typename T>
T get_field_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail("bad value for config key '" + key + "': " + e.what());
    }
}

template <std::size_t N>
std::array<double, N> get_array(const json& j, const std::string& key) {
    const auto vec = get_field<std::vector<double>>(j, key);
    if (vec.size() != N) {
        fail("config key '" + key + "' must hold exactly " +
             std::to_string(N) + " values");
    }
    std::array<double, N> out{};
    std::copy(vec.begin(), vec.end(), out.begin());
    return out;
}

template <std::size_t N>
std::array<double, N> get_array_or(const json& j, const std::string& key,
                                   const std::array<double, N>& fallback) {
    if (!j.contains(key)) return fallback;
    return get_array<N>(j, key);
}

}  // namespace

json parse_config_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail_parse(text, e);
    }
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

Scenario scenario_from_json(const json& j) {
    Scenario scenario;
    scenario.shift = get_field_or(j, "delta", 0.0);
    scenario.contamination_fraction = get_field_or(j, "theta", 0.0);
    scenario.contamination_variance = get_field_or(j, "sigma2_c", 1.0);
    scenario.in_control_variance = get_field_or(j, "in_control_variance", 1.0);
    scenario.subgroup_size = get_field_or(j, "subgroup_size", 5);
    try {
        scenario.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    return scenario;
}

ordered_json scenario_to_json(const Scenario& scenario) {
    return ordered_json{
        {"delta", scenario.shift},
        {"theta", scenario.contamination_fraction},
        {"sigma2_c", scenario.contamination_variance},
        {"in_control_variance", scenario.in_control_variance},
        {"subgroup_size", scenario.subgroup_size},
    };
}

ChartConfig chart_from_json(const json& j) {
    ChartConfig config;
    const auto family_name_str = get_field<std::string>(j, "family");
    try {
        config.family = family_from_name(family_name_str);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    switch (config.family) {
        case ChartFamily::shewhart_mean:
        case ChartFamily::shewhart_median: {
            ShewhartParams p;
            p.center = get_field_or(j, "center", 0.0);
            p.lcl = get_field<double>(j, "lcl");
            p.ucl = get_field<double>(j, "ucl");
            config.params = p;
            break;
        }
        case ChartFamily::cusum_mean:
        case ChartFamily::cusum_median: {
            CusumParams p;
            p.target_mean = get_field_or(j, "target_mean", 0.0);
            p.reference = get_field<double>(j, "reference");
            p.decision_interval = get_field<double>(j, "decision_interval");
            p.upper_only = get_field_or(j, "upper_only", false);
            config.params = p;
            break;
        }
        case ChartFamily::ewma_mean:
        case ChartFamily::ewma_median: {
            EwmaParams p;
            p.center = get_field_or(j, "center", 0.0);
            p.smoothing = get_field<double>(j, "smoothing");
            p.limit_width = get_field<double>(j, "limit_width");
            config.params = p;
            break;
        }
        case ChartFamily::sparks_acusum: {
            SparksParams p;
            p.weight = get_field<double>(j, "weight");
            p.min_shift = get_field<double>(j, "min_shift");
            p.table_shift = get_field<std::vector<double>>(j, "table_shift");
            p.table_h = get_field<std::vector<double>>(j, "table_h");
            config.params = p;
            break;
        }
        case ChartFamily::aewma: {
            AewmaParams p;
            p.center = get_field_or(j, "center", 0.0);
            p.smoothing = get_field<double>(j, "smoothing");
            p.huber_k = get_field<double>(j, "huber_k");
            p.limit = get_field<double>(j, "limit");
            config.params = p;
            break;
        }
        case ChartFamily::zone_classic: {
            ZoneParams p;
            p.zone_limits = get_array<4>(j, "zone_limits");
            p.signal_threshold = get_field_or(j, "signal_threshold", 8.0);
            config.params = p;
            break;
        }
        case ChartFamily::adaptive_zone: {
            AdaptiveZoneParams p;
            p.initial_limit = get_field<double>(j, "initial_limit");
            p.zone_limits = get_array<4>(j, "zone_limits");
            p.shrink = get_array<5>(j, "shrink");
            config.params = p;
            break;
        }
        case ChartFamily::ad_cusum_median: {
            AdCusumParams p;
            p.target_mean = get_field_or(j, "target_mean", 0.0);
            p.reference = get_field<double>(j, "reference");
            p.decision_interval = get_field<double>(j, "decision_interval");
            p.zone_low = get_field_or(j, "zone_low", p.decision_interval / 3.0);
            p.zone_high =
                get_field_or(j, "zone_high", 2.0 * p.decision_interval / 3.0);
            p.shrink_mid = get_field_or(j, "shrink_mid", 0.0);
            p.shrink_high = get_field_or(j, "shrink_high", 0.0);
            config.params = p;
            break;
        }
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    return config;
}

ordered_json chart_to_json(const ChartConfig& config) {
    ordered_json j;
    j["family"] = std::string(family_name(config.family));
    switch (config.family) {
        case ChartFamily::shewhart_mean:
        case ChartFamily::shewhart_median: {
            const auto& p = std::get<ShewhartParams>(config.params);
            j["center"] = p.center;
            j["lcl"] = p.lcl;
            j["ucl"] = p.ucl;
            break;
        }
        case ChartFamily::cusum_mean:
        case ChartFamily::cusum_median: {
            const auto& p = std::get<CusumParams>(config.params);
            j["target_mean"] = p.target_mean;
            j["reference"] = p.reference;
            j["decision_interval"] = p.decision_interval;
            if (p.upper_only) j["upper_only"] = true;
            break;
        }
        case ChartFamily::ewma_mean:
        case ChartFamily::ewma_median: {
            const auto& p = std::get<EwmaParams>(config.params);
            j["center"] = p.center;
            j["smoothing"] = p.smoothing;
            j["limit_width"] = p.limit_width;
            break;
        }
        case ChartFamily::sparks_acusum: {
            const auto& p = std::get<SparksParams>(config.params);
            j["weight"] = p.weight;
            j["min_shift"] = p.min_shift;
            j["table_shift"] = p.table_shift;
            j["table_h"] = p.table_h;
            break;
        }
        case ChartFamily::aewma: {
            const auto& p = std::get<AewmaParams>(config.params);
            j["center"] = p.center;
            j["smoothing"] = p.smoothing;
            j["huber_k"] = p.huber_k;
            j["limit"] = p.limit;
            break;
        }
        case ChartFamily::zone_classic: {
            const auto& p = std::get<ZoneParams>(config.params);
            j["zone_limits"] = p.zone_limits;
            j["signal_threshold"] = p.signal_threshold;
            break;
        }
        case ChartFamily::adaptive_zone: {
            const auto& p = std::get<AdaptiveZoneParams>(config.params);
            j["initial_limit"] = p.initial_limit;
            j["zone_limits"] = p.zone_limits;
            j["shrink"] = p.shrink;
            break;
        }
        case ChartFamily::ad_cusum_median: {
            const auto& p = std::get<AdCusumParams>(config.params);
            j["target_mean"] = p.target_mean;
            j["reference"] = p.reference;
            j["decision_interval"] = p.decision_interval;
            j["zone_low"] = p.zone_low;
            j["zone_high"] = p.zone_high;
            j["shrink_mid"] = p.shrink_mid;
            j["shrink_high"] = p.shrink_high;
            break;
        }
    }
    return j;
}

namespace {

CalibrationBudget budget_from_json(const json& j) {
    CalibrationBudget budget;
    if (!j.contains("budget")) return budget;
    const auto& b = j.at("budget");
    budget.schedule = get_field_or(b, "schedule", budget.schedule);
    if (budget.schedule.empty()) {
        fail("budget.schedule must be non-empty");
    }
    budget.max_iterations =
        get_field_or(b, "max_iterations", budget.max_iterations);
    budget.cap = get_field_or(b, "cap", budget.cap);
    return budget;
}

}  // namespace

SimulateSpec simulate_spec_from_json(const json& j) {
    SimulateSpec spec;
    if (!j.contains("chart")) fail("missing config section 'chart'");
    if (!j.contains("scenario")) fail("missing config section 'scenario'");
    spec.chart = chart_from_json(j.at("chart"));
    spec.scenario = scenario_from_json(j.at("scenario"));
    spec.replications = get_field_or(j, "replications", spec.replications);
    spec.cap = get_field_or(j, "cap", spec.cap);
    spec.master_seed = get_field_or(j, "master_seed", spec.master_seed);
    spec.workers = get_field_or(j, "workers", spec.workers);
    spec.emit_run_lengths =
        get_field_or(j, "emit_run_lengths", spec.emit_run_lengths);
    if (spec.replications < 1) fail("replications must be at least 1");
    if (spec.cap < 1) fail("cap must be at least 1");
    return spec;
}

CalibrateSpec calibrate_spec_from_json(const json& j) {
    CalibrateSpec spec;
    if (!j.contains("chart")) fail("missing config section 'chart'");
    spec.chart = chart_from_json(j.at("chart"));
    if (j.contains("scenario")) {
        spec.scenario = scenario_from_json(j.at("scenario"));
    }
    spec.scenario.shift = 0.0;  // calibration is an in-control exercise
    spec.target_arl0 = get_field_or(j, "target_arl0", spec.target_arl0);
    spec.tolerance = get_field_or(j, "tolerance", spec.tolerance);
    spec.budget = budget_from_json(j);
    spec.master_seed = get_field_or(j, "master_seed", spec.master_seed);
    spec.workers = get_field_or(j, "workers", spec.workers);
    if (j.contains("sparks_grid")) {
        spec.sparks_grid = get_field<std::vector<double>>(j, "sparks_grid");
    }
    if (!(spec.target_arl0 > 1.0)) fail("target_arl0 must exceed 1");
    if (!(spec.tolerance > 0.0)) fail("tolerance must be positive");
    return spec;
}

CompareSpec compare_spec_from_json(const json& j) {
    CompareSpec spec;
    if (!j.contains("charts") || !j.at("charts").is_array() ||
        j.at("charts").empty()) {
        fail("compare config needs a non-empty 'charts' array");
    }
    for (const auto& entry : j.at("charts")) {
        ChartConfig chart = chart_from_json(entry);
        std::string name = get_field_or(
            entry, "name", std::string(family_name(chart.family)));
        spec.chart_names.push_back(std::move(name));
        spec.charts.push_back(std::move(chart));
    }
    if (!j.contains("scenarios")) fail("missing config section 'scenarios'");
    const auto& scenarios = j.at("scenarios");
    if (!scenarios.contains("clean") || !scenarios.contains("contaminated")) {
        fail("'scenarios' must define both 'clean' and 'contaminated'");
    }
    spec.clean = scenario_from_json(scenarios.at("clean"));
    spec.contaminated = scenario_from_json(scenarios.at("contaminated"));
    spec.shifts = get_field<std::vector<double>>(j, "shifts");
    if (spec.shifts.empty()) fail("'shifts' must be non-empty");
    spec.replications = get_field_or(j, "replications", spec.replications);
    spec.cap = get_field_or(j, "cap", spec.cap);
    spec.master_seed = get_field_or(j, "master_seed", spec.master_seed);
    spec.workers = get_field_or(j, "workers", spec.workers);
    spec.target_arl0 = get_field_or(j, "target_arl0", spec.target_arl0);
    spec.resolve_conventions =
        get_field_or(j, "resolve_conventions", spec.resolve_conventions);
    spec.recalibrate_beyond =
        get_field_or(j, "recalibrate_beyond", spec.recalibrate_beyond);
    spec.recalibrate_tolerance =
        get_field_or(j, "recalibrate_tolerance", spec.recalibrate_tolerance);
    if (spec.replications < 1) fail("replications must be at least 1");
    return spec;
}

MonitorSpec monitor_spec_from_json(const json& j) {
    MonitorSpec spec;
    if (!j.contains("chart")) fail("missing config section 'chart'");
    spec.chart = chart_from_json(j.at("chart"));
    if (j.contains("scenario")) {
        spec.subgroup_size =
            get_field_or(j.at("scenario"), "subgroup_size", spec.subgroup_size);
    }
    spec.subgroup_size = get_field_or(j, "subgroup_size", spec.subgroup_size);
    spec.input_csv = get_field_or(j, "input_csv", std::string());
    if (spec.subgroup_size < 1) fail("subgroup_size must be at least 1");
    return spec;
}

ordered_json calibration_result_to_json(const CalibrationResult& r) {
    return ordered_json{
        {"parameter", r.parameter},   {"value", r.value},
        {"achieved_arl0", r.achieved_arl0}, {"target_arl0", r.target_arl0},
        {"tolerance", r.tolerance},   {"iterations", r.iterations},
        {"converged", r.converged},
    };
}

ordered_json summary_to_json(const RunLengthSummary& s) {
    return ordered_json{
        {"arl", s.arl},
        {"std_error", s.std_error},
        {"replications", s.replications},
        {"cap", s.cap},
        {"truncated", s.truncated},
        {"usable", s.usable},
        {"lower_bound", s.lower_bound()},
    };
}

}  // namespace spclab
