#include "spclab/charts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spclab {

namespace {

void require_finite(double input) {
    if (!std::isfinite(input)) {
        throw std::invalid_argument("chart step: input must be finite");
    }
}

void require(bool condition, const char* message) {
    if (!condition) {
        throw std::invalid_argument(std::string("chart config: ") + message);
    }
}

bool ascending(const std::array<double, 4>& k) {
    return k[0] > 0.0 && k[0] < k[1] && k[1] < k[2] && k[2] < k[3];
}

}  // namespace

std::string_view family_name(ChartFamily family) {
    switch (family) {
        case ChartFamily::shewhart_mean: return "shewhart_mean";
        case ChartFamily::shewhart_median: return "shewhart_median";
        case ChartFamily::cusum_mean: return "cusum_mean";
        case ChartFamily::cusum_median: return "cusum_median";
        case ChartFamily::ewma_mean: return "ewma_mean";
        case ChartFamily::ewma_median: return "ewma_median";
        case ChartFamily::sparks_acusum: return "sparks_acusum";
        case ChartFamily::aewma: return "aewma";
        case ChartFamily::zone_classic: return "zone_classic";
        case ChartFamily::adaptive_zone: return "adaptive_zone";
        case ChartFamily::ad_cusum_median: return "ad_cusum_median";
    }
    throw std::invalid_argument("unknown chart family");
}

ChartFamily family_from_name(std::string_view name) {
    for (const auto family :
         {ChartFamily::shewhart_mean, ChartFamily::shewhart_median,
          ChartFamily::cusum_mean, ChartFamily::cusum_median,
          ChartFamily::ewma_mean, ChartFamily::ewma_median,
          ChartFamily::sparks_acusum, ChartFamily::aewma,
          ChartFamily::zone_classic, ChartFamily::adaptive_zone,
          ChartFamily::ad_cusum_median}) {
        if (family_name(family) == name) return family;
    }
    throw std::invalid_argument("unknown chart family: " + std::string(name));
}

StatisticKind statistic_kind(ChartFamily family) {
    switch (family) {
        case ChartFamily::shewhart_median:
        case ChartFamily::cusum_median:
        case ChartFamily::ewma_median:
        case ChartFamily::ad_cusum_median:
            return StatisticKind::median;
        default:
            return StatisticKind::mean;
    }
}

double EwmaParams::threshold() const {
    return limit_width * std::sqrt(smoothing / (2.0 - smoothing));
}

double SparksParams::h_at(double shift, bool* clamped) const {
    if (clamped != nullptr) *clamped = false;
    if (table_shift.empty()) {
        throw std::invalid_argument("sparks: empty h-table");
    }
    if (shift <= table_shift.front()) {
        if (clamped != nullptr && shift < table_shift.front()) *clamped = true;
        return table_h.front();
    }
    if (shift >= table_shift.back()) {
        if (clamped != nullptr && shift > table_shift.back()) *clamped = true;
        return table_h.back();
    }
    const auto upper =
        std::upper_bound(table_shift.begin(), table_shift.end(), shift);
    const auto i = static_cast<std::size_t>(upper - table_shift.begin());
    const double x0 = table_shift[i - 1];
    const double x1 = table_shift[i];
    const double t = (shift - x0) / (x1 - x0);
    return table_h[i - 1] + t * (table_h[i] - table_h[i - 1]);
}

void ChartConfig::validate() const {
    switch (family) {
        case ChartFamily::shewhart_mean:
        case ChartFamily::shewhart_median: {
            const auto* p = std::get_if<ShewhartParams>(&params);
            require(p != nullptr, "shewhart family needs shewhart parameters");
            require(p->lcl < p->center && p->center < p->ucl,
                    "shewhart limits must satisfy lcl < center < ucl");
            return;
        }
        case ChartFamily::cusum_mean:
        case ChartFamily::cusum_median: {
            const auto* p = std::get_if<CusumParams>(&params);
            require(p != nullptr, "cusum family needs cusum parameters");
            require(p->reference > 0.0, "cusum reference must be positive");
            require(p->decision_interval > 0.0,
                    "cusum decision interval must be positive");
            require(std::isfinite(p->target_mean),
                    "cusum target mean must be finite");
            return;
        }
        case ChartFamily::ewma_mean:
        case ChartFamily::ewma_median: {
            const auto* p = std::get_if<EwmaParams>(&params);
            require(p != nullptr, "ewma family needs ewma parameters");
            require(p->smoothing > 0.0 && p->smoothing <= 1.0,
                    "ewma smoothing must lie in (0,1]");
            require(p->limit_width > 0.0, "ewma limit width must be positive");
            return;
        }
        case ChartFamily::sparks_acusum: {
            const auto* p = std::get_if<SparksParams>(&params);
            require(p != nullptr, "sparks family needs sparks parameters");
            require(p->weight > 0.0 && p->weight <= 1.0,
                    "sparks weight must lie in (0,1]");
            require(p->min_shift > 0.0, "sparks minimum shift must be positive");
            require(!p->table_shift.empty() &&
                        p->table_shift.size() == p->table_h.size(),
                    "sparks h-table must be non-empty and aligned");
            require(std::is_sorted(p->table_shift.begin(), p->table_shift.end()),
                    "sparks h-table grid must be ascending");
            require(std::all_of(p->table_h.begin(), p->table_h.end(),
                                [](double h) { return h > 0.0; }),
                    "sparks h-table values must be positive");
            require(p->table_shift.front() <= p->min_shift,
                    "sparks h-table must cover the minimum shift");
            return;
        }
        case ChartFamily::aewma: {
            const auto* p = std::get_if<AewmaParams>(&params);
            require(p != nullptr, "aewma family needs aewma parameters");
            require(p->smoothing > 0.0 && p->smoothing <= 1.0,
                    "aewma smoothing must lie in (0,1]");
            require(p->huber_k > 0.0, "aewma huber threshold must be positive");
            require(p->limit > 0.0, "aewma limit must be positive");
            return;
        }
        case ChartFamily::zone_classic: {
            const auto* p = std::get_if<ZoneParams>(&params);
            require(p != nullptr, "zone family needs zone parameters");
            require(ascending(p->zone_limits),
                    "zone limits must satisfy 0 < k1 < k2 < k3 < k4");
            require(p->signal_threshold > 0.0,
                    "zone signal threshold must be positive");
            return;
        }
        case ChartFamily::adaptive_zone: {
            const auto* p = std::get_if<AdaptiveZoneParams>(&params);
            require(p != nullptr,
                    "adaptive zone family needs adaptive zone parameters");
            require(p->initial_limit > 0.0,
                    "adaptive zone initial limit must be positive");
            require(ascending(p->zone_limits),
                    "zone limits must satisfy 0 < k1 < k2 < k3 < k4");
            require(std::all_of(p->shrink.begin(), p->shrink.end(),
                                [](double s) { return s >= 0.0; }),
                    "adaptive zone shrinkage must be non-negative");
            return;
        }
        case ChartFamily::ad_cusum_median: {
            const auto* p = std::get_if<AdCusumParams>(&params);
            require(p != nullptr, "ad-cusum family needs ad-cusum parameters");
            require(p->reference > 0.0, "ad-cusum reference must be positive");
            require(0.0 < p->zone_low && p->zone_low < p->zone_high &&
                        p->zone_high < p->decision_interval,
                    "ad-cusum zones must satisfy 0 < k0 < k1 < k2");
            require(p->shrink_mid >= 0.0 && p->shrink_high >= 0.0,
                    "ad-cusum shrinkage must be non-negative");
            require(std::isfinite(p->target_mean),
                    "ad-cusum target mean must be finite");
            return;
        }
    }
    throw std::invalid_argument("unknown chart family");
}

StepOutcome shewhart_step(const ShewhartParams& p, const ShewhartState& s,
                          double input) {
    require_finite(input);
    const bool signal = input < p.lcl || input > p.ucl;
    TraceRecord trace{input, input, 0.0, p.lcl, p.ucl, 0, 0, signal};
    return {signal, s, trace};
}

StepOutcome cusum_step(const CusumParams& p, const CusumState& s,
                       double input) {
    require_finite(input);
    CusumState next;
    next.upper =
        std::max(0.0, s.upper - (p.target_mean + p.reference) + input);
    next.lower =
        std::max(0.0, s.lower + (p.target_mean - p.reference) - input);
    const bool signal = next.upper >= p.decision_interval ||
                        (!p.upper_only && next.lower >= p.decision_interval);
    TraceRecord trace{input,
                      next.upper,
                      next.lower,
                      p.decision_interval,
                      p.decision_interval,
                      0,
                      0,
                      signal};
    return {signal, next, trace};
}

StepOutcome ewma_step(const EwmaParams& p, const EwmaState& s, double input) {
    require_finite(input);
    EwmaState next;
    next.value = (1.0 - p.smoothing) * s.value + p.smoothing * input;
    const double threshold = p.threshold();
    const bool signal = std::fabs(next.value - p.center) > threshold;
    TraceRecord trace{input,
                      next.value,
                      0.0,
                      p.center - threshold,
                      p.center + threshold,
                      0,
                      0,
                      signal};
    return {signal, next, trace};
}

StepOutcome sparks_step(const SparksParams& p, const SparksState& s,
                        double input) {
    require_finite(input);
    SparksState next = s;
    next.shift_up =
        std::max(p.weight * s.prev_input + (1.0 - p.weight) * s.shift_up,
                 p.min_shift);
    next.shift_down =
        std::max(p.weight * (-s.prev_input) + (1.0 - p.weight) * s.shift_down,
                 p.min_shift);
    bool clamped_up = false;
    bool clamped_down = false;
    const double h_up = p.h_at(next.shift_up, &clamped_up);
    const double h_down = p.h_at(next.shift_down, &clamped_down);
    next.cusum_up =
        std::max(0.0, s.cusum_up + (input - next.shift_up / 2.0) / h_up);
    next.cusum_down =
        std::max(0.0, s.cusum_down + (-input - next.shift_down / 2.0) / h_down);
    next.prev_input = input;
    const bool signal = next.cusum_up >= 1.0 || next.cusum_down >= 1.0;
    TraceRecord trace{input,
                      next.cusum_up,
                      next.cusum_down,
                      1.0,
                      1.0,
                      0,
                      (clamped_up || clamped_down) ? 1 : 0,
                      signal};
    return {signal, next, trace};
}

StepOutcome aewma_step(const AewmaParams& p, const AewmaState& s,
                       double input) {
    require_finite(input);
    const double error = input - s.value;
    double score;  // Huber: linear-in-error core, unit-slope tails
    if (std::fabs(error) <= p.huber_k) {
        score = p.smoothing * error;
    } else {
        score = error - (error > 0.0 ? 1.0 : -1.0) * (1.0 - p.smoothing) * p.huber_k;
    }
    const double weight = error == 0.0 ? p.smoothing : score / error;
    AewmaState next;
    next.value = s.value + score;
    const bool signal = std::fabs(next.value - p.center) > p.limit;
    TraceRecord trace{input,
                      next.value,
                      weight,
                      p.center - p.limit,
                      p.center + p.limit,
                      0,
                      0,
                      signal};
    return {signal, next, trace};
}

ZoneScore zone_score(double input, const std::array<double, 4>& zone_limits) {
    const int side = input >= 0.0 ? 1 : -1;
    const double magnitude = std::fabs(input);
    int zone = 4;
    for (int i = 0; i < 4; ++i) {
        if (magnitude < zone_limits[static_cast<std::size_t>(i)]) {
            zone = i;
            break;
        }
    }
    return {side * zone, kZoneScores[static_cast<std::size_t>(zone)]};
}

StepOutcome zone_chart_step(const ZoneParams& p, const ZoneState& s,
                            double input) {
    require_finite(input);
    const ZoneScore zs = zone_score(input, p.zone_limits);
    const int side = input >= 0.0 ? 1 : -1;
    ZoneState next;
    next.prev_side = side;
    next.score = (s.prev_side == side) ? s.score + zs.score : zs.score;
    const bool signal = next.score >= p.signal_threshold;
    TraceRecord trace{input,
                      next.score,
                      0.0,
                      -p.signal_threshold,
                      p.signal_threshold,
                      zs.zone,
                      0,
                      signal};
    return {signal, next, trace};
}

StepOutcome adaptive_zone_step(const AdaptiveZoneParams& p,
                               const AdaptiveZoneState& s, double input) {
    require_finite(input);
    const bool signal = input < s.lcl || input > s.ucl;
    const ZoneScore zs = zone_score(input, p.zone_limits);
    const double shrink =
        p.shrink[static_cast<std::size_t>(std::abs(zs.zone))];
    AdaptiveZoneState next = s;
    if (!signal) {
        if (input < 0.0) {
            next.lcl = std::min(0.0, s.lcl + shrink);
            next.ucl = p.initial_limit;
        } else {
            next.lcl = -p.initial_limit;
            next.ucl = std::max(0.0, s.ucl - shrink);
        }
    }
    TraceRecord trace{input, input, 0.0, s.lcl, s.ucl, zs.zone, 0, signal};
    return {signal, next, trace};
}

StepOutcome ad_cusum_step(const AdCusumParams& p, const AdCusumState& s,
                          double input) {
    require_finite(input);
    AdCusumState next = s;
    next.upper_stat =
        std::max(0.0, s.upper_stat - (p.target_mean + p.reference) + input);
    next.lower_stat =
        std::max(0.0, s.lower_stat + (p.target_mean - p.reference) - input);
    const bool signal =
        next.upper_stat >= s.upper_limit || next.lower_stat >= s.lower_limit;

    const auto classify = [&p](double stat) {
        if (stat < p.zone_low) return 0;
        if (stat < p.zone_high) return 1;
        return 2;
    };
    const auto adapt = [&p, &classify](double stat, double limit) {
        switch (classify(stat)) {
            case 0: return p.decision_interval;
            case 1: return std::max(limit - p.shrink_mid, p.zone_high);
            default: return std::max(limit - p.shrink_high, p.zone_high);
        }
    };
    next.upper_limit = adapt(next.upper_stat, s.upper_limit);
    next.lower_limit = adapt(next.lower_stat, s.lower_limit);

    TraceRecord trace{input,
                      next.upper_stat,
                      next.lower_stat,
                      s.lower_limit,
                      s.upper_limit,
                      classify(next.upper_stat),
                      0,
                      signal};
    return {signal, next, trace};
}

ChartState reset(const ChartConfig& config) {
    config.validate();
    switch (config.family) {
        case ChartFamily::shewhart_mean:
        case ChartFamily::shewhart_median:
            return ShewhartState{};
        case ChartFamily::cusum_mean:
        case ChartFamily::cusum_median:
            return CusumState{};
        case ChartFamily::ewma_mean:
        case ChartFamily::ewma_median: {
            const auto& p = std::get<EwmaParams>(config.params);
            return EwmaState{p.center};
        }
        case ChartFamily::sparks_acusum: {
            const auto& p = std::get<SparksParams>(config.params);
            return SparksState{0.0, 0.0, p.min_shift, p.min_shift, 0.0};
        }
        case ChartFamily::aewma: {
            const auto& p = std::get<AewmaParams>(config.params);
            return AewmaState{p.center};
        }
        case ChartFamily::zone_classic:
            return ZoneState{};
        case ChartFamily::adaptive_zone: {
            const auto& p = std::get<AdaptiveZoneParams>(config.params);
            return AdaptiveZoneState{-p.initial_limit, p.initial_limit};
        }
        case ChartFamily::ad_cusum_median: {
            const auto& p = std::get<AdCusumParams>(config.params);
            return AdCusumState{0.0, 0.0, p.decision_interval,
                                p.decision_interval};
        }
    }
    throw std::invalid_argument("unknown chart family");
}

StepOutcome step(const ChartConfig& config, const ChartState& state,
                 double input) {
    switch (config.family) {
        case ChartFamily::shewhart_mean:
        case ChartFamily::shewhart_median:
            return shewhart_step(std::get<ShewhartParams>(config.params),
                                 std::get<ShewhartState>(state), input);
        case ChartFamily::cusum_mean:
        case ChartFamily::cusum_median:
            return cusum_step(std::get<CusumParams>(config.params),
                              std::get<CusumState>(state), input);
        case ChartFamily::ewma_mean:
        case ChartFamily::ewma_median:
            return ewma_step(std::get<EwmaParams>(config.params),
                             std::get<EwmaState>(state), input);
        case ChartFamily::sparks_acusum:
            return sparks_step(std::get<SparksParams>(config.params),
                               std::get<SparksState>(state), input);
        case ChartFamily::aewma:
            return aewma_step(std::get<AewmaParams>(config.params),
                              std::get<AewmaState>(state), input);
        case ChartFamily::zone_classic:
            return zone_chart_step(std::get<ZoneParams>(config.params),
                                   std::get<ZoneState>(state), input);
        case ChartFamily::adaptive_zone:
            return adaptive_zone_step(std::get<AdaptiveZoneParams>(config.params),
                                      std::get<AdaptiveZoneState>(state), input);
        case ChartFamily::ad_cusum_median:
            return ad_cusum_step(std::get<AdCusumParams>(config.params),
                                 std::get<AdCusumState>(state), input);
    }
    throw std::invalid_argument("unknown chart family");
}

}  // namespace spclab
