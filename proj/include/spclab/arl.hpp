#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spclab/charts.hpp"
#include "spclab/datagen.hpp"

namespace spclab {

inline constexpr std::uint32_t kDefaultCap = 50'000;
inline constexpr std::uint32_t kDefaultReplications = 10'000;
/// Default master seed; fixed so out-of-the-box runs reproduce the committed
/// reference outputs.
inline constexpr std::uint64_t kDefaultSeed = 20240115;

struct RunLengthSummary {
    double arl = 0.0;
    double std_error = 0.0;
    std::uint32_t replications = 0;
    std::uint32_t cap = 0;
    std::uint32_t truncated = 0;  // replications that never signalled
    bool usable = true;           // false when every replication was truncated

    /// A truncated replication contributes the cap, so the mean is a lower
    /// bound on the true ARL whenever this is set.
    bool lower_bound() const { return truncated > 0; }
};

/// Zero-state run length: the chart starts from reset(config) and the shift
/// is present from inspection 1. Returns the first signalling inspection
/// index, or cap when no signal occurred. The config must be valid.
std::uint32_t run_length(const ChartConfig& config, const Scenario& scenario,
                         RandomStream stream, std::uint32_t cap);

/// Run lengths for replications 0..replications-1, each on its own stream
/// (master_seed, stream_domain<<40 | replication). The result is a pure
/// function of the arguments; worker count only affects wall time.
std::vector<std::uint32_t> simulate_run_lengths(
    const ChartConfig& config, const Scenario& scenario,
    std::uint32_t replications, std::uint32_t cap, std::uint64_t master_seed,
    int workers = 0, std::uint64_t stream_domain = kStreamDomainSimulate);

/// Mean/standard-error summary (pairwise summation, order-independent).
RunLengthSummary summarize_run_lengths(std::span<const std::uint32_t> lengths,
                                       std::uint32_t cap);

RunLengthSummary estimate_arl(
    const ChartConfig& config, const Scenario& scenario,
    std::uint32_t replications, std::uint32_t cap, std::uint64_t master_seed,
    int workers = 0, std::uint64_t stream_domain = kStreamDomainSimulate);

// ---------------------------------------------------------------------------
// Stochastic calibration of the family's signal-limit parameter.
// ---------------------------------------------------------------------------

struct CalibrationBudget {
    /// Replication counts used as the bracket narrows; the last entry is the
    /// verification tier.
    std::vector<std::uint32_t> schedule = {2'000, 2'000, 10'000, 10'000,
                                           10'000, 50'000};
    std::uint32_t max_iterations = 60;
    std::uint32_t cap = kDefaultCap;
};

struct CalibrationResult {
    std::string parameter;
    double value = 0.0;
    double achieved_arl0 = 0.0;
    double target_arl0 = 0.0;
    double tolerance = 0.0;
    std::uint32_t iterations = 0;
    bool converged = false;
};

/// Name of the parameter calibrate_limit tunes for this family.
std::string_view limit_parameter_name(ChartFamily family);

/// Current value of that parameter.
double get_limit(const ChartConfig& config);

/// Sets the parameter. Families with internal geometry tied to the limit
/// (zone limits of the adaptive charts) are rescaled proportionally so the
/// configuration keeps its shape.
void set_limit(ChartConfig& config, double value);

/// Monotone stochastic bisection on the signal limit: larger limit, larger
/// in-control ARL. Uses common random numbers across iterates and an
/// escalating replication schedule; on success the config's limit parameter
/// holds the calibrated value. When the budget runs out the best value seen
/// is kept and `converged` is false.
CalibrationResult calibrate_limit(ChartConfig& config,
                                  const Scenario& in_control,
                                  double target_arl0, double tolerance,
                                  const CalibrationBudget& budget,
                                  std::uint64_t master_seed, int workers = 0);

// ---------------------------------------------------------------------------
// Sparks h-table calibration.
// ---------------------------------------------------------------------------

struct SparksTableEntry {
    double shift = 0.0;
    double h = 0.0;
    CalibrationResult calibration;
};

/// For each grid shift, the decision interval at which a one-sided CUSUM with
/// reference shift/2 on clean standardized data attains the target in-control
/// ARL. Non-monotone neighbours are re-run at a doubled verification tier;
/// throws std::runtime_error if the table still fails to decrease.
std::vector<SparksTableEntry> sparks_h_table(std::span<const double> shift_grid,
                                             double target_arl0,
                                             double tolerance,
                                             const CalibrationBudget& budget,
                                             std::uint64_t master_seed,
                                             int workers = 0);

// ---------------------------------------------------------------------------
// Parameter-convention resolver for the CUSUM-type presets. The reference
// design values do not pin down whether they apply to the raw or the
// standardized subgroup statistic, nor whether the stated shift threshold or
// half of it is the reference value; the resolver measures all four readings
// and keeps the one whose in-control ARL lands nearest the target.
// ---------------------------------------------------------------------------

struct ConventionCandidate {
    std::string label;
    double reference = 0.0;  // standardized-equivalent reference
    double limit = 0.0;      // standardized-equivalent decision interval
    double arl0 = 0.0;
};

struct ConventionResolution {
    std::vector<ConventionCandidate> candidates;
    std::size_t chosen = 0;
    bool recalibrated = false;
    double paper_limit = 0.0;
    double final_reference = 0.0;
    double final_limit = 0.0;
    double achieved_arl0 = 0.0;
    std::string note;  // one-line provenance for table metadata
};

/// Resolves the convention for a cusum_mean/cusum_median/ad_cusum_median
/// config carrying design-sheet parameters and rewrites the config in place
/// to standardized-input form. If no candidate lands within accept_tol of
/// the target, the standardized-scale full-reference reading is kept and the
/// decision interval is recalibrated to the target.
ConventionResolution resolve_cusum_convention(
    ChartConfig& config, const Scenario& in_control, double target_arl0,
    double accept_tol, double recal_tolerance, const CalibrationBudget& budget,
    std::uint64_t master_seed, int workers = 0);

}  // namespace spclab
