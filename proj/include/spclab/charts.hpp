#pragma once

#include <array>
#include <string_view>
#include <variant>
#include <vector>

#include "spclab/stats.hpp"

namespace spclab {

enum class ChartFamily {
    shewhart_mean,
    shewhart_median,
    cusum_mean,
    cusum_median,
    ewma_mean,
    ewma_median,
    sparks_acusum,
    aewma,
    zone_classic,
    adaptive_zone,
    ad_cusum_median,
};

std::string_view family_name(ChartFamily family);
ChartFamily family_from_name(std::string_view name);

/// Which subgroup summary the family consumes.
StatisticKind statistic_kind(ChartFamily family);

// ---------------------------------------------------------------------------
// Per-family design parameters. Every chart consumes the standardized
// subgroup statistic (raw statistic divided by its in-control standard
// deviation), so fixed limits such as +-3.09 carry the usual normal-theory
// meaning for the mean chart.
// ---------------------------------------------------------------------------

struct ShewhartParams {
    double center = 0.0;
    double lcl = -3.09;
    double ucl = 3.09;
};

/// Two-sided tabular CUSUM. The drift subtracted from the upper statistic
/// each step is target_mean + reference; the lower statistic mirrors it.
struct CusumParams {
    double target_mean = 0.0;         // in-control mean of the input
    double reference = 0.15;          // shift-detection threshold
    double decision_interval = 4.344; // signal when a statistic reaches this
    bool upper_only = false;          // one-sided variant (h-table calibration)
};

struct EwmaParams {
    double center = 0.0;
    double smoothing = 0.1;      // weight on the newest point
    double limit_width = 2.835;  // multiplier on the asymptotic sigma of Z

    /// Signal threshold on |Z - center| under the asymptotic-variance
    /// convention: limit_width * sqrt(smoothing / (2 - smoothing)).
    double threshold() const;
};

/// Adaptive CUSUM with an online shift estimate. The running statistic is
/// normalized by the h-table, which makes the signal limit a constant 1;
/// a mirrored statistic covers downward shifts.
struct SparksParams {
    double weight = 0.1;     // smoothing weight in the shift-estimate update
    double min_shift = 0.5;  // floor on the estimated shift
    std::vector<double> table_shift;  // ascending shift grid
    std::vector<double> table_h;      // decision interval per grid point

    /// Linear interpolation of the h-table, clamped at both ends.
    /// Sets *clamped when the query fell outside the grid.
    double h_at(double shift, bool* clamped = nullptr) const;
};

/// EWMA with a data-driven weight: small prediction errors are smoothed with
/// the baseline weight, large ones pass through nearly unsmoothed (Huber
/// score), signalled against a fixed absolute limit.
struct AewmaParams {
    double center = 0.0;
    double smoothing = 0.1;  // baseline weight for small errors
    double huber_k = 3.0;    // error magnitude where the score turns linear
    double limit = 0.736;    // absolute signal threshold on |Z - center|
};

inline constexpr std::array<int, 5> kZoneScores = {0, 1, 2, 4, 8};

struct ZoneParams {
    std::array<double, 4> zone_limits = {1.0, 2.0, 3.0, 4.0};  // k1<k2<k3<k4
    double signal_threshold = 8.0;
};

/// Shewhart-type chart whose offending-side limit walks toward the center
/// line while consecutive points stay on one side; the opposite limit snaps
/// back to its initial value.
struct AdaptiveZoneParams {
    double initial_limit = 3.09;  // UCL0; LCL0 is its mirror image
    std::array<double, 4> zone_limits = {0.7725, 1.545, 2.3175, 3.09};
    std::array<double, 5> shrink = {0.0, 0.0, 0.0, 0.0, 0.0};  // per zone Z0..Z4
};

/// Robust CUSUM on the subgroup median with zone-adaptive decision limits:
/// the statistic's zone either resets its limit to decision_interval (zone 0)
/// or shrinks it, floored at zone_high.
struct AdCusumParams {
    double target_mean = 0.0;
    double reference = 0.15;
    double zone_low = 4.344 / 3.0;         // k0
    double zone_high = 2.0 * 4.344 / 3.0;  // k1, also the shrink floor
    double decision_interval = 4.344;      // k2, the initial/maximal limit
    double shrink_mid = 0.0;               // applied while in [zone_low, zone_high)
    double shrink_high = 0.0;              // applied while in [zone_high, limit)
};

using ChartParams =
    std::variant<ShewhartParams, CusumParams, EwmaParams, SparksParams,
                 AewmaParams, ZoneParams, AdaptiveZoneParams, AdCusumParams>;

struct ChartConfig {
    ChartFamily family = ChartFamily::shewhart_mean;
    ChartParams params = ShewhartParams{};

    StatisticKind statistic() const { return statistic_kind(family); }
    void validate() const;  // throws std::invalid_argument
};

// ---------------------------------------------------------------------------
// Mutable detection state, one record per family.
// ---------------------------------------------------------------------------

struct ShewhartState {};

struct CusumState {
    double upper = 0.0;  // never negative
    double lower = 0.0;
};

struct EwmaState {
    double value = 0.0;
};

struct SparksState {
    double cusum_up = 0.0;
    double cusum_down = 0.0;
    double shift_up = 0.5;
    double shift_down = 0.5;
    double prev_input = 0.0;
};

struct ZoneState {
    double score = 0.0;
    int prev_side = 0;  // -1 below center, +1 at/above, 0 before any point
};

struct AdaptiveZoneState {
    double lcl = -3.09;
    double ucl = 3.09;
};

struct AdCusumState {
    double upper_stat = 0.0;
    double lower_stat = 0.0;
    double upper_limit = 4.344;
    double lower_limit = 4.344;
};

using ChartState =
    std::variant<ShewhartState, CusumState, EwmaState, SparksState, ZoneState,
                 AdaptiveZoneState, AdCusumState>;

/// Per-step diagnostic record. Field meaning is family-specific: stat_upper
/// carries the primary running statistic (Z, C+, cumulative score, or the
/// input itself), stat_lower its mirror where one exists, and the limits are
/// those in force when the point was judged. flag=1 marks a clamped h-table
/// lookup on the Sparks chart.
struct TraceRecord {
    double input = 0.0;
    double stat_upper = 0.0;
    double stat_lower = 0.0;
    double limit_lower = 0.0;
    double limit_upper = 0.0;
    int zone = 0;
    int flag = 0;
    bool signal = false;
};

struct StepOutcome {
    bool signal = false;
    ChartState state_after;
    TraceRecord trace;
};

// ---------------------------------------------------------------------------
// Step functions. All are pure: the outcome depends only on (params, state,
// input). Non-finite input throws std::invalid_argument.
// ---------------------------------------------------------------------------

StepOutcome shewhart_step(const ShewhartParams& p, const ShewhartState& s,
                          double input);
StepOutcome cusum_step(const CusumParams& p, const CusumState& s, double input);
StepOutcome ewma_step(const EwmaParams& p, const EwmaState& s, double input);
StepOutcome sparks_step(const SparksParams& p, const SparksState& s,
                        double input);
StepOutcome aewma_step(const AewmaParams& p, const AewmaState& s, double input);
StepOutcome zone_chart_step(const ZoneParams& p, const ZoneState& s,
                            double input);
StepOutcome adaptive_zone_step(const AdaptiveZoneParams& p,
                               const AdaptiveZoneState& s, double input);
StepOutcome ad_cusum_step(const AdCusumParams& p, const AdCusumState& s,
                          double input);

struct ZoneScore {
    int zone = 0;  // signed: negative below the center line
    int score = 0;
};

/// Brackets the input against the symmetric zone limits: |u| in [0,k1) is
/// zone 0, [k1,k2) zone 1, ..., beyond k4 zone 4, with the sign of the side
/// (u >= 0 counts as the upper side).
ZoneScore zone_score(double input, const std::array<double, 4>& zone_limits);

/// Initial state for a configuration: CUSUM statistics at zero, EWMA at its
/// center, Sparks shift estimates at the floor, zone score empty, adaptive
/// limits fully open.
ChartState reset(const ChartConfig& config);

/// Family dispatch over the step functions above.
StepOutcome step(const ChartConfig& config, const ChartState& state,
                 double input);

}  // namespace spclab
