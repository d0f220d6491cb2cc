#include "spclab/arl.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>
#include <utility>

namespace spclab {

namespace {

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 32) {
        double sum = 0.0;
        for (const double v : values) sum += v;
        return sum;
    }
    const std::size_t mid = values.size() / 2;
    return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

// Exact middle order statistic without the allocation subgroup_median does;
// bitwise-identical to the sort-based definition.
double median_inplace(std::span<double> work) {
    const std::size_t n = work.size();
    const auto mid = work.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(work.begin(), mid, work.end());
    if (n % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(work.begin(), mid);
    return 0.5 * (lo + hi);
}

struct RunResult {
    std::uint32_t length = 0;
    bool signalled = false;
};

RunResult run_length_ex(const ChartConfig& config, const Scenario& scenario,
                        RandomStream stream, std::uint32_t cap,
                        std::span<double> subgroup, std::span<double> work) {
    const StatisticKind kind = config.statistic();
    const double inv_sigma =
        1.0 / statistic_sigma(kind, scenario.subgroup_size);
    ChartState state = reset(config);
    for (std::uint32_t t = 1; t <= cap; ++t) {
        sample_subgroup(scenario, stream, subgroup);
        double raw;
        if (kind == StatisticKind::mean) {
            double sum = 0.0;
            for (const double v : subgroup) sum += v;
            raw = sum / static_cast<double>(subgroup.size());
        } else {
            std::copy(subgroup.begin(), subgroup.end(), work.begin());
            raw = median_inplace(work);
        }
        StepOutcome outcome = step(config, state, raw * inv_sigma);
        if (outcome.signal) return {t, true};
        state = std::move(outcome.state_after);
    }
    return {cap, false};
}

struct BatchResult {
    std::vector<std::uint32_t> lengths;
    std::uint32_t truncated = 0;
};

BatchResult simulate_batch(const ChartConfig& config, const Scenario& scenario,
                           std::uint32_t replications, std::uint32_t cap,
                           std::uint64_t master_seed, int workers,
                           std::uint64_t stream_domain) {
    config.validate();
    scenario.validate();
    if (cap < 1) {
        throw std::invalid_argument("run-length cap must be at least 1");
    }
    if (replications < 1) {
        throw std::invalid_argument("replications must be at least 1");
    }
    // Warm the sigma cache before the parallel phase.
    statistic_sigma(config.statistic(), scenario.subgroup_size);

    BatchResult result;
    result.lengths.assign(replications, 0);
    std::vector<std::uint8_t> signalled(replications, 0);

    const auto chunk_body = [&](std::uint32_t lo, std::uint32_t hi) {
        const auto n = static_cast<std::size_t>(scenario.subgroup_size);
        std::vector<double> subgroup(n);
        std::vector<double> work(n);
        for (std::uint32_t r = lo; r < hi; ++r) {
            RandomStream stream(master_seed, stream_index(stream_domain, r));
            const RunResult rr =
                run_length_ex(config, scenario, stream, cap, subgroup, work);
            result.lengths[r] = rr.length;
            signalled[r] = rr.signalled ? 1 : 0;
        }
    };

    const int n_workers = std::min<int>(resolve_workers(workers),
                                        static_cast<int>(replications));
    if (n_workers <= 1) {
        chunk_body(0, replications);
    } else {
        const std::uint32_t chunk =
            (replications + static_cast<std::uint32_t>(n_workers) - 1) /
            static_cast<std::uint32_t>(n_workers);
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(
            static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) {
            const std::uint32_t lo = static_cast<std::uint32_t>(w) * chunk;
            const std::uint32_t hi = std::min(replications, lo + chunk);
            if (lo >= hi) break;
            threads.emplace_back([&, lo, hi, w] {
                try {
                    chunk_body(lo, hi);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] =
                        std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    for (const auto s : signalled) {
        if (s == 0) ++result.truncated;
    }
    return result;
}

RunLengthSummary summarize_with_truncation(
    std::span<const std::uint32_t> lengths, std::uint32_t cap,
    std::uint32_t truncated) {
    RunLengthSummary summary;
    summary.replications = static_cast<std::uint32_t>(lengths.size());
    summary.cap = cap;
    summary.truncated = truncated;
    summary.usable = truncated < lengths.size();

    std::vector<double> values(lengths.begin(), lengths.end());
    const double n = static_cast<double>(values.size());
    summary.arl = pairwise_sum(values) / n;
    if (values.size() > 1) {
        for (auto& v : values) {
            const double d = v - summary.arl;
            v = d * d;
        }
        const double variance = pairwise_sum(values) / (n - 1.0);
        summary.std_error = std::sqrt(variance / n);
    }
    return summary;
}

}  // namespace

std::uint32_t run_length(const ChartConfig& config, const Scenario& scenario,
                         RandomStream stream, std::uint32_t cap) {
    config.validate();
    scenario.validate();
    if (cap < 1) {
        throw std::invalid_argument("run-length cap must be at least 1");
    }
    const auto n = static_cast<std::size_t>(scenario.subgroup_size);
    std::vector<double> subgroup(n);
    std::vector<double> work(n);
    return run_length_ex(config, scenario, stream, cap, subgroup, work).length;
}

std::vector<std::uint32_t> simulate_run_lengths(
    const ChartConfig& config, const Scenario& scenario,
    std::uint32_t replications, std::uint32_t cap, std::uint64_t master_seed,
    int workers, std::uint64_t stream_domain) {
    return simulate_batch(config, scenario, replications, cap, master_seed,
                          workers, stream_domain)
        .lengths;
}

RunLengthSummary summarize_run_lengths(std::span<const std::uint32_t> lengths,
                                       std::uint32_t cap) {
    if (lengths.empty()) {
        throw std::invalid_argument("summarize: no run lengths");
    }
    // Without per-run signal flags a run length equal to the cap is counted
    // as truncated; estimate_arl keeps the exact distinction.
    const auto truncated = static_cast<std::uint32_t>(
        std::count(lengths.begin(), lengths.end(), cap));
    return summarize_with_truncation(lengths, cap, truncated);
}

RunLengthSummary estimate_arl(const ChartConfig& config,
                              const Scenario& scenario,
                              std::uint32_t replications, std::uint32_t cap,
                              std::uint64_t master_seed, int workers,
                              std::uint64_t stream_domain) {
    const BatchResult batch = simulate_batch(
        config, scenario, replications, cap, master_seed, workers, stream_domain);
    return summarize_with_truncation(batch.lengths, cap, batch.truncated);
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

std::string_view limit_parameter_name(ChartFamily family) {
    switch (family) {
        case ChartFamily::shewhart_mean:
        case ChartFamily::shewhart_median:
            return "limit_half_width";
        case ChartFamily::cusum_mean:
        case ChartFamily::cusum_median:
        case ChartFamily::ad_cusum_median:
            return "decision_interval";
        case ChartFamily::ewma_mean:
        case ChartFamily::ewma_median:
            return "limit_width";
        case ChartFamily::aewma:
            return "limit";
        case ChartFamily::zone_classic:
            return "signal_threshold";
        case ChartFamily::adaptive_zone:
            return "initial_limit";
        case ChartFamily::sparks_acusum:
            break;
    }
    throw std::invalid_argument(
        "sparks chart has no scalar limit; calibrate its h-table instead");
}

double get_limit(const ChartConfig& config) {
    switch (config.family) {
        case ChartFamily::shewhart_mean:
        case ChartFamily::shewhart_median: {
            const auto& p = std::get<ShewhartParams>(config.params);
            return p.ucl - p.center;
        }
        case ChartFamily::cusum_mean:
        case ChartFamily::cusum_median:
            return std::get<CusumParams>(config.params).decision_interval;
        case ChartFamily::ewma_mean:
        case ChartFamily::ewma_median:
            return std::get<EwmaParams>(config.params).limit_width;
        case ChartFamily::aewma:
            return std::get<AewmaParams>(config.params).limit;
        case ChartFamily::zone_classic:
            return std::get<ZoneParams>(config.params).signal_threshold;
        case ChartFamily::adaptive_zone:
            return std::get<AdaptiveZoneParams>(config.params).initial_limit;
        case ChartFamily::ad_cusum_median:
            return std::get<AdCusumParams>(config.params).decision_interval;
        case ChartFamily::sparks_acusum:
            break;
    }
    throw std::invalid_argument(
        "sparks chart has no scalar limit; calibrate its h-table instead");
}

void set_limit(ChartConfig& config, double value) {
    if (!(value > 0.0)) {
        throw std::invalid_argument("limit parameter must be positive");
    }
    switch (config.family) {
        case ChartFamily::shewhart_mean:
        case ChartFamily::shewhart_median: {
            auto& p = std::get<ShewhartParams>(config.params);
            p.ucl = p.center + value;
            p.lcl = p.center - value;
            return;
        }
        case ChartFamily::cusum_mean:
        case ChartFamily::cusum_median:
            std::get<CusumParams>(config.params).decision_interval = value;
            return;
        case ChartFamily::ewma_mean:
        case ChartFamily::ewma_median:
            std::get<EwmaParams>(config.params).limit_width = value;
            return;
        case ChartFamily::aewma:
            std::get<AewmaParams>(config.params).limit = value;
            return;
        case ChartFamily::zone_classic:
            std::get<ZoneParams>(config.params).signal_threshold = value;
            return;
        case ChartFamily::adaptive_zone: {
            auto& p = std::get<AdaptiveZoneParams>(config.params);
            const double factor = value / p.initial_limit;
            p.initial_limit = value;
            for (auto& k : p.zone_limits) k *= factor;
            return;
        }
        case ChartFamily::ad_cusum_median: {
            auto& p = std::get<AdCusumParams>(config.params);
            const double factor = value / p.decision_interval;
            p.decision_interval = value;
            p.zone_low *= factor;
            p.zone_high *= factor;
            return;
        }
        case ChartFamily::sparks_acusum:
            break;
    }
    throw std::invalid_argument(
        "sparks chart has no scalar limit; calibrate its h-table instead");
}

CalibrationResult calibrate_limit(ChartConfig& config,
                                  const Scenario& in_control,
                                  double target_arl0, double tolerance,
                                  const CalibrationBudget& budget,
                                  std::uint64_t master_seed, int workers) {
    if (!(target_arl0 > 1.0)) {
        throw std::invalid_argument("calibration target must exceed 1");
    }
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("calibration tolerance must be positive");
    }
    if (budget.schedule.empty()) {
        throw std::invalid_argument("calibration schedule must be non-empty");
    }

    CalibrationResult result;
    result.parameter = std::string(limit_parameter_name(config.family));
    result.target_arl0 = target_arl0;
    result.tolerance = tolerance;

    const std::uint32_t final_reps = budget.schedule.back();
    std::uint32_t iterations = 0;

    // Common random numbers: every estimate reuses the same master seed and
    // stream domain, so achieved ARL0 is a monotone step function of the
    // limit and bisection converges to the crossing.
    const auto evaluate = [&](double limit, std::uint32_t reps) {
        ChartConfig probe = config;
        set_limit(probe, limit);
        ++iterations;
        return estimate_arl(probe, in_control, reps, budget.cap, master_seed,
                            workers, kStreamDomainCalibrate)
            .arl;
    };
    const auto within = [&](double arl) {
        return std::fabs(arl - target_arl0) / target_arl0 <= tolerance;
    };
    const auto finish = [&](double limit, double achieved, bool converged) {
        set_limit(config, limit);
        result.value = limit;
        result.achieved_arl0 = achieved;
        result.iterations = iterations;
        result.converged = converged;
        return result;
    };

    // Fixed point: if the current limit already attains the target, keep it.
    const double initial = get_limit(config);
    const double initial_arl = evaluate(initial, budget.schedule.front());
    if (within(initial_arl)) {
        const double confirmed = evaluate(initial, final_reps);
        if (within(confirmed)) {
            return finish(initial, confirmed, true);
        }
    }

    // Bracket the target with coarse estimates.
    double lo = initial;
    double hi = initial;
    double lo_arl = initial_arl;
    double hi_arl = initial_arl;
    constexpr double kGrowth = 1.6;
    while (hi_arl < target_arl0 && iterations < budget.max_iterations) {
        lo = hi;
        lo_arl = hi_arl;
        hi *= kGrowth;
        hi_arl = evaluate(hi, budget.schedule.front());
    }
    while (lo_arl >= target_arl0 && iterations < budget.max_iterations) {
        hi = lo;
        hi_arl = lo_arl;
        lo /= kGrowth;
        lo_arl = evaluate(lo, budget.schedule.front());
    }

    double best_limit = std::fabs(lo_arl - target_arl0) <
                                std::fabs(hi_arl - target_arl0)
                            ? lo
                            : hi;
    double best_arl = std::fabs(lo_arl - target_arl0) <
                              std::fabs(hi_arl - target_arl0)
                          ? lo_arl
                          : hi_arl;

    std::size_t tier = 0;
    while (iterations < budget.max_iterations) {
        const std::uint32_t reps =
            budget.schedule[std::min(tier, budget.schedule.size() - 1)];
        ++tier;
        const double mid = 0.5 * (lo + hi);
        const double arl = evaluate(mid, reps);
        if (std::fabs(arl - target_arl0) < std::fabs(best_arl - target_arl0)) {
            best_limit = mid;
            best_arl = arl;
        }
        if (reps == final_reps && within(arl)) {
            return finish(mid, arl, true);
        }
        if (arl >= target_arl0) {
            hi = mid;
        } else {
            lo = mid;
        }
        if ((hi - lo) / hi < 1e-6) break;  // bracket exhausted by CRN plateaus
    }
    return finish(best_limit, best_arl, false);
}

// ---------------------------------------------------------------------------
// Sparks h-table
// ---------------------------------------------------------------------------

std::vector<SparksTableEntry> sparks_h_table(std::span<const double> shift_grid,
                                             double target_arl0,
                                             double tolerance,
                                             const CalibrationBudget& budget,
                                             std::uint64_t master_seed,
                                             int workers) {
    if (shift_grid.empty()) {
        throw std::invalid_argument("h-table grid must be non-empty");
    }
    if (!std::is_sorted(shift_grid.begin(), shift_grid.end())) {
        throw std::invalid_argument("h-table grid must be ascending");
    }
    for (const double d : shift_grid) {
        if (!(d > 0.0)) {
            throw std::invalid_argument("h-table grid shifts must be positive");
        }
    }

    // The chart normalizes increments by h, so each cell is the decision
    // interval of a plain one-sided CUSUM with reference shift/2 on clean
    // standardized data (subgroup size 1 makes the statistic exactly N(0,1)).
    Scenario clean;
    clean.subgroup_size = 1;

    const auto calibrate_cell = [&](double shift, double warm_start,
                                    const CalibrationBudget& b) {
        ChartConfig cell;
        cell.family = ChartFamily::cusum_mean;
        cell.params = CusumParams{0.0, shift / 2.0, warm_start, true};
        SparksTableEntry entry;
        entry.shift = shift;
        entry.calibration =
            calibrate_limit(cell, clean, target_arl0, tolerance, b,
                            master_seed, workers);
        entry.h = entry.calibration.value;
        return entry;
    };

    std::vector<SparksTableEntry> table;
    table.reserve(shift_grid.size());
    double warm = 5.0;
    for (const double shift : shift_grid) {
        table.push_back(calibrate_cell(shift, warm, budget));
        warm = table.back().h;
    }

    // h must decrease in the shift; retry offending neighbours at a larger
    // verification tier before giving up.
    CalibrationBudget retry = budget;
    retry.schedule.push_back(budget.schedule.back() * 2);
    retry.max_iterations = budget.max_iterations * 2;
    for (int pass = 0; pass < 2; ++pass) {
        bool monotone = true;
        for (std::size_t i = 1; i < table.size(); ++i) {
            if (table[i].h >= table[i - 1].h) {
                monotone = false;
                if (pass == 1) {
                    throw std::runtime_error(
                        "sparks_h_table: calibrated table is not strictly "
                        "decreasing");
                }
                table[i - 1] = calibrate_cell(table[i - 1].shift,
                                              table[i - 1].h, retry);
                table[i] = calibrate_cell(table[i].shift, table[i].h, retry);
            }
        }
        if (monotone) break;
    }
    return table;
}

// ---------------------------------------------------------------------------
// Convention resolver
// ---------------------------------------------------------------------------

namespace {

struct ConventionMapping {
    std::string label;
    double reference_scale;  // applied to the design reference
    bool raw_scale;          // design values divided by the statistic sigma
};

const std::array<ConventionMapping, 4> kConventions = {{
    {"standardized_full", 1.0, false},
    {"standardized_half", 0.5, false},
    {"raw_full", 1.0, true},
    {"raw_half", 0.5, true},
}};

struct CusumDesign {
    double reference = 0.0;
    double limit = 0.0;
};

CusumDesign design_of(const ChartConfig& config) {
    if (const auto* c = std::get_if<CusumParams>(&config.params)) {
        return {c->reference, c->decision_interval};
    }
    if (const auto* a = std::get_if<AdCusumParams>(&config.params)) {
        return {a->reference, a->decision_interval};
    }
    throw std::invalid_argument(
        "convention resolver applies to cusum-type charts only");
}

void apply_convention(ChartConfig& config, const ConventionMapping& mapping,
                      const CusumDesign& design, double sigma) {
    const double scale = mapping.raw_scale ? 1.0 / sigma : 1.0;
    const double reference = design.reference * mapping.reference_scale * scale;
    const double limit = design.limit * scale;
    if (auto* c = std::get_if<CusumParams>(&config.params)) {
        c->reference = reference;
        c->decision_interval = limit;
        return;
    }
    auto& a = std::get<AdCusumParams>(config.params);
    const double factor = limit / a.decision_interval;
    a.reference = reference;
    a.decision_interval = limit;
    a.zone_low *= factor;
    a.zone_high *= factor;
}

}  // namespace

ConventionResolution resolve_cusum_convention(
    ChartConfig& config, const Scenario& in_control, double target_arl0,
    double accept_tol, double recal_tolerance, const CalibrationBudget& budget,
    std::uint64_t master_seed, int workers) {
    const CusumDesign design = design_of(config);
    const double sigma =
        statistic_sigma(config.statistic(), in_control.subgroup_size);

    ConventionResolution resolution;
    resolution.paper_limit = design.limit;

    constexpr std::uint32_t kProbeReplications = 4'000;
    for (const auto& mapping : kConventions) {
        ChartConfig probe = config;
        apply_convention(probe, mapping, design, sigma);
        const CusumDesign probe_design = design_of(probe);
        const double arl0 =
            estimate_arl(probe, in_control, kProbeReplications, budget.cap,
                         master_seed, workers, kStreamDomainConvention)
                .arl;
        resolution.candidates.push_back({mapping.label, probe_design.reference,
                                         probe_design.limit, arl0});
    }

    const auto deviation = [&](double arl) {
        return std::fabs(arl - target_arl0) / target_arl0;
    };
    resolution.chosen = 0;
    for (std::size_t i = 1; i < resolution.candidates.size(); ++i) {
        if (deviation(resolution.candidates[i].arl0) <
            deviation(resolution.candidates[resolution.chosen].arl0)) {
            resolution.chosen = i;
        }
    }

    const auto& best = resolution.candidates[resolution.chosen];
    if (deviation(best.arl0) <= accept_tol) {
        apply_convention(config, kConventions[resolution.chosen], design, sigma);
        resolution.final_reference = best.reference;
        resolution.final_limit = best.limit;
        resolution.achieved_arl0 = best.arl0;
        resolution.note = "convention " + best.label + " adopted as printed";
        return resolution;
    }

    // No reading reproduces the target: keep the standardized scale with the
    // full reference and recalibrate the decision interval.
    apply_convention(config, kConventions[0], design, sigma);
    const CalibrationResult recal = calibrate_limit(
        config, in_control, target_arl0, recal_tolerance, budget, master_seed,
        workers);
    resolution.recalibrated = true;
    resolution.chosen = 0;
    resolution.final_reference = design_of(config).reference;
    resolution.final_limit = recal.value;
    resolution.achieved_arl0 = recal.achieved_arl0;
    resolution.note = "no convention within tolerance; standardized_full kept, "
                      "decision interval recalibrated";
    return resolution;
}

}  // namespace spclab
