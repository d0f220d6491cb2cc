#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spclab/charts.hpp"

using namespace spclab;
using doctest::Approx;

namespace {

ChartConfig shewhart(double limit = 3.09) {
    ChartConfig c;
    c.family = ChartFamily::shewhart_mean;
    c.params = ShewhartParams{0.0, -limit, limit};
    return c;
}

ChartConfig cusum(double reference = 0.15, double limit = 4.344) {
    ChartConfig c;
    c.family = ChartFamily::cusum_median;
    c.params = CusumParams{0.0, reference, limit, false};
    return c;
}

ChartConfig ewma(double smoothing = 0.1, double width = 2.835) {
    ChartConfig c;
    c.family = ChartFamily::ewma_mean;
    c.params = EwmaParams{0.0, smoothing, width};
    return c;
}

ChartConfig ad_cusum(double s1, double s2, double limit = 4.344) {
    ChartConfig c;
    c.family = ChartFamily::ad_cusum_median;
    c.params = AdCusumParams{0.0,       0.15, limit / 3.0, 2.0 * limit / 3.0,
                             limit, s1,   s2};
    return c;
}

std::vector<double> random_inputs(std::mt19937_64& gen, int n,
                                  double scale = 1.5) {
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = dist(gen);
    return out;
}

// First inspection index (1-based) at which the chart signals, 0 if never.
int signal_time(const ChartConfig& config, const std::vector<double>& inputs) {
    ChartState state = reset(config);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        const StepOutcome out = step(config, state, inputs[t]);
        if (out.signal) return static_cast<int>(t) + 1;
        state = out.state_after;
    }
    return 0;
}

}  // namespace

TEST_CASE("shewhart step signals outside the limits only") {
    const ChartConfig cfg = shewhart();
    const ChartState s = reset(cfg);
    CHECK_FALSE(step(cfg, s, 0.0).signal);
    CHECK(step(cfg, s, 3.10).signal);
    CHECK(step(cfg, s, -3.10).signal);
    CHECK_FALSE(step(cfg, s, 3.09).signal);  // boundary is inside
    CHECK_THROWS_AS(step(cfg, s, std::nan("")), std::invalid_argument);
}

TEST_CASE("cusum recursion arithmetic") {
    const ChartConfig cfg = cusum();
    SUBCASE("sub-reference input keeps the statistic at zero") {
        CusumState s{0.0, 0.0};
        const auto out = cusum_step(std::get<CusumParams>(cfg.params), s, 0.10);
        CHECK(std::get<CusumState>(out.state_after).upper == Approx(0.0));
        CHECK_FALSE(out.signal);
    }
    SUBCASE("crossing the decision interval signals") {
        CusumState s{4.20, 0.0};
        const auto out = cusum_step(std::get<CusumParams>(cfg.params), s, 0.50);
        CHECK(std::get<CusumState>(out.state_after).upper == Approx(4.55));
        CHECK(out.signal);
    }
    SUBCASE("input pinned at the drift boundary never accumulates") {
        ChartState s = reset(cfg);
        for (int t = 0; t < 1000; ++t) {
            const auto out = step(cfg, s, 0.15);
            CHECK(std::get<CusumState>(out.state_after).upper == Approx(0.0));
            CHECK_FALSE(out.signal);
            s = out.state_after;
        }
    }
}

TEST_CASE("cusum statistics never go negative") {
    const ChartConfig cfg = cusum();
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto inputs = random_inputs(gen, 200, 2.0);
        ChartState s = reset(cfg);
        for (const double u : inputs) {
            const auto out = step(cfg, s, u);
            const auto& cs = std::get<CusumState>(out.state_after);
            CHECK(cs.upper >= 0.0);
            CHECK(cs.lower >= 0.0);
            s = out.state_after;
        }
    }
}

TEST_CASE("ewma update and asymptotic threshold") {
    const ChartConfig cfg = ewma();
    SUBCASE("single update from zero") {
        const auto out =
            ewma_step(std::get<EwmaParams>(cfg.params), EwmaState{0.0}, 1.0);
        CHECK(std::get<EwmaState>(out.state_after).value == Approx(0.1));
    }
    SUBCASE("threshold is limit_width * asymptotic sigma") {
        // sqrt(0.1/1.9) = 0.229416, times 2.835 = 0.650394.
        const auto& p = std::get<EwmaParams>(cfg.params);
        CHECK(p.threshold() == Approx(0.6503936).epsilon(1e-6));
        const auto below = ewma_step(p, EwmaState{0.0}, 6.50);
        CHECK_FALSE(below.signal);
        const auto above = ewma_step(p, EwmaState{0.0}, 6.51);
        CHECK(above.signal);
    }
}

TEST_CASE("ewma with smoothing 1 degenerates to shewhart, per sequence") {
    const ChartConfig shew = shewhart(2.5);
    const ChartConfig degen = ewma(1.0, 2.5);
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto inputs = random_inputs(gen, 100, 1.3);
        CHECK(signal_time(shew, inputs) == signal_time(degen, inputs));
    }
}

TEST_CASE("sparks shift estimate and normalized cusum") {
    SparksParams p;
    p.weight = 0.1;
    p.min_shift = 0.5;
    p.table_shift = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    p.table_h = {8.0, 5.0, 3.8, 3.0, 2.5, 2.2};

    SUBCASE("estimate follows the smoothing recursion") {
        // w=0.1, prev shift 1.0, prev observation 3.0 -> 0.3 + 0.9 = 1.2.
        SparksState s{0.0, 0.0, 1.0, 0.5, 3.0};
        const auto out = sparks_step(p, s, 0.0);
        CHECK(std::get<SparksState>(out.state_after).shift_up == Approx(1.2));
    }
    SUBCASE("floor engages for small estimates") {
        SparksState s{0.0, 0.0, 0.5, 0.5, 0.0};
        const auto out = sparks_step(p, s, 0.0);
        CHECK(std::get<SparksState>(out.state_after).shift_up == Approx(0.5));
    }
    SUBCASE("input at half the estimated shift holds the statistic at zero") {
        SparksState s{0.0, 0.0, 0.5, 0.5, 0.0};
        // shift_up stays at the 0.5 floor, so input 0.25 sits on the boundary.
        const auto out = sparks_step(p, s, 0.25);
        CHECK(std::get<SparksState>(out.state_after).cusum_up == Approx(0.0));
    }
    SUBCASE("estimates never fall below the floor") {
        ChartConfig cfg;
        cfg.family = ChartFamily::sparks_acusum;
        cfg.params = p;
        std::mt19937_64 gen(3);
        ChartState s = reset(cfg);
        for (const double u : random_inputs(gen, 500, 2.0)) {
            const auto out = step(cfg, s, u);
            const auto& ss = std::get<SparksState>(out.state_after);
            CHECK(ss.shift_up >= 0.5);
            CHECK(ss.shift_down >= 0.5);
            s = out.state_after;
        }
    }
    SUBCASE("h lookup interpolates and clamps") {
        bool clamped = false;
        CHECK(p.h_at(1.0, &clamped) == Approx(5.0));
        CHECK_FALSE(clamped);
        CHECK(p.h_at(1.25, &clamped) == Approx(4.4));
        CHECK_FALSE(clamped);
        CHECK(p.h_at(9.0, &clamped) == Approx(2.2));
        CHECK(clamped);
    }
}

TEST_CASE("aewma huber score") {
    AewmaParams p;
    p.smoothing = 0.1;
    p.huber_k = 3.0;
    p.limit = 10.0;
    SUBCASE("small errors update like a plain ewma") {
        const auto out = aewma_step(p, AewmaState{1.0}, 3.5);  // e = 2.5
        CHECK(std::get<AewmaState>(out.state_after).value ==
              Approx(1.0 + 0.1 * 2.5));
    }
    SUBCASE("large errors use the linear tail: e=5 gives score 2.3") {
        const auto out = aewma_step(p, AewmaState{0.0}, 5.0);
        CHECK(std::get<AewmaState>(out.state_after).value == Approx(2.3));
        CHECK(out.trace.stat_lower == Approx(0.46));  // w(e) = 2.3/5
    }
    SUBCASE("weight approaches 1 for huge errors") {
        const auto out = aewma_step(p, AewmaState{0.0}, 1e6);
        CHECK(out.trace.stat_lower == Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("zone scoring follows the score column") {
    const std::array<double, 4> k = {1.0, 2.0, 3.0, 4.0};
    CHECK(zone_score(0.0, k).zone == 0);
    CHECK(zone_score(0.0, k).score == 0);
    CHECK(zone_score(2.5, k).zone == 2);
    CHECK(zone_score(2.5, k).score == 2);
    CHECK(zone_score(-2.5, k).zone == -2);
    CHECK(zone_score(3.5, k).score == 4);
    CHECK(zone_score(-5.0, k).zone == -4);
    CHECK(zone_score(-5.0, k).score == 8);
}

TEST_CASE("zone chart accumulates on one side and resets on a crossing") {
    ChartConfig cfg;
    cfg.family = ChartFamily::zone_classic;
    cfg.params = ZoneParams{};

    SUBCASE("alternating sides never accumulate") {
        ChartState s = reset(cfg);
        for (int t = 0; t < 100; ++t) {
            const double u = (t % 2 == 0) ? 1.5 : -1.5;  // score 1 each
            const auto out = step(cfg, s, u);
            CHECK_FALSE(out.signal);
            CHECK(std::get<ZoneState>(out.state_after).score == Approx(1.0));
            s = out.state_after;
        }
    }
    SUBCASE("a single point beyond k4 signals immediately") {
        CHECK(signal_time(cfg, {4.5}) == 1);
    }
    SUBCASE("two same-side points in zone 3 reach the threshold") {
        CHECK(signal_time(cfg, {3.5, 3.5}) == 2);
        CHECK(signal_time(cfg, {3.5, -3.5, 3.5}) == 0);  // reset in between
    }
}

TEST_CASE("adaptive zone limits shrink toward the center and snap back") {
    AdaptiveZoneParams p;
    p.initial_limit = 3.09;
    p.zone_limits = {0.7725, 1.545, 2.3175, 3.09};
    p.shrink = {0.0, 0.1, 0.2, 0.5, 1.0};
    ChartConfig cfg;
    cfg.family = ChartFamily::adaptive_zone;
    cfg.params = p;

    SUBCASE("zero shrinkage leaves the limits untouched") {
        AdaptiveZoneParams q = p;
        q.shrink = {0.0, 0.0, 0.0, 0.0, 0.0};
        const auto out = adaptive_zone_step(q, {-3.09, 3.09}, 2.0);
        const auto& s = std::get<AdaptiveZoneState>(out.state_after);
        CHECK(s.lcl == Approx(-3.09));
        CHECK(s.ucl == Approx(3.09));
    }
    SUBCASE("upper-side point shrinks the ucl and restores the lcl") {
        // u=2.5 sits in zone 3 (shrink 0.5): 3.09 - 0.5 = 2.59.
        const auto out = adaptive_zone_step(p, {-2.0, 3.09}, 2.5);
        const auto& s = std::get<AdaptiveZoneState>(out.state_after);
        CHECK(s.ucl == Approx(2.59));
        CHECK(s.lcl == Approx(-3.09));
    }
    SUBCASE("limits never widen past the initial values or cross the center") {
        std::mt19937_64 gen(5);
        ChartState s = reset(cfg);
        for (const double u : random_inputs(gen, 2000, 1.2)) {
            const auto out = step(cfg, s, u);
            const auto& az = std::get<AdaptiveZoneState>(out.state_after);
            CHECK(az.lcl >= -3.09);
            CHECK(az.ucl <= 3.09);
            CHECK(az.lcl <= 0.0);
            CHECK(az.ucl >= 0.0);
            s = out.state_after;
        }
    }
    SUBCASE("with all shrinkage zero the chart is a shewhart, per sequence") {
        AdaptiveZoneParams q = p;
        q.shrink = {0.0, 0.0, 0.0, 0.0, 0.0};
        ChartConfig degen;
        degen.family = ChartFamily::adaptive_zone;
        degen.params = q;
        std::mt19937_64 gen(17);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto inputs = random_inputs(gen, 120, 1.4);
            CHECK(signal_time(degen, inputs) ==
                  signal_time(shewhart(3.09), inputs));
        }
    }
}

TEST_CASE("ad-cusum adaptive limit walk") {
    SUBCASE("statistic back in zone 0 resets the limit") {
        const ChartConfig cfg = ad_cusum(0.1, 0.2);
        const auto& p = std::get<AdCusumParams>(cfg.params);
        AdCusumState s{2.0, 0.0, 4.0, 4.344};
        // A strongly negative input sends the upper statistic to zero.
        const auto out = ad_cusum_step(p, s, -3.0);
        CHECK(std::get<AdCusumState>(out.state_after).upper_stat == Approx(0.0));
        CHECK(std::get<AdCusumState>(out.state_after).upper_limit ==
              Approx(4.344));
    }
    SUBCASE("zone-2 dwell shrinks the limit, then the next step signals") {
        const ChartConfig cfg = ad_cusum(0.1, 0.2);
        const auto& p = std::get<AdCusumParams>(cfg.params);
        // Move the upper statistic to 3.9 (zone 2 starts at 2.896).
        AdCusumState s{3.7, 0.0, 4.344, 4.344};
        const auto first = ad_cusum_step(p, s, 0.35);  // c+ = 3.9
        CHECK_FALSE(first.signal);
        const auto& s1 = std::get<AdCusumState>(first.state_after);
        CHECK(s1.upper_stat == Approx(3.9));
        CHECK(s1.upper_limit == Approx(4.144));
        const auto second = ad_cusum_step(p, s1, 0.45);  // c+ = 4.2 >= 4.144
        CHECK(second.signal);
    }
    SUBCASE("limits stay within (0, L] and floored at zone_high") {
        const ChartConfig cfg = ad_cusum(0.3, 0.6);
        std::mt19937_64 gen(23);
        ChartState s = reset(cfg);
        const auto& p = std::get<AdCusumParams>(cfg.params);
        for (const double u : random_inputs(gen, 3000, 1.1)) {
            const auto out = step(cfg, s, u);
            const auto& st = std::get<AdCusumState>(out.state_after);
            CHECK(st.upper_limit <= p.decision_interval);
            CHECK(st.upper_limit >= p.zone_high);
            CHECK(st.lower_limit <= p.decision_interval);
            CHECK(st.lower_limit >= p.zone_high);
            s = out.state_after;
        }
    }
    SUBCASE("zero shrinkage reproduces the plain cusum, per sequence") {
        const ChartConfig degen = ad_cusum(0.0, 0.0);
        const ChartConfig base = cusum();
        std::mt19937_64 gen(29);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto inputs = random_inputs(gen, 150, 1.2);
            CHECK(signal_time(degen, inputs) == signal_time(base, inputs));
        }
    }
}

TEST_CASE("reset returns the documented initial state") {
    CHECK(std::get<CusumState>(reset(cusum())).upper == Approx(0.0));
    CHECK(std::get<CusumState>(reset(cusum())).lower == Approx(0.0));
    const auto ad = std::get<AdCusumState>(reset(ad_cusum(0.1, 0.2)));
    CHECK(ad.upper_limit == Approx(4.344));
    CHECK(ad.lower_limit == Approx(4.344));
    ChartConfig sparks_cfg;
    sparks_cfg.family = ChartFamily::sparks_acusum;
    SparksParams sp;
    sp.table_shift = {0.5, 1.0};
    sp.table_h = {8.0, 5.0};
    sparks_cfg.params = sp;
    const auto ss = std::get<SparksState>(reset(sparks_cfg));
    CHECK(ss.shift_up == Approx(0.5));
    CHECK(ss.shift_down == Approx(0.5));
    const auto ez = std::get<EwmaState>(reset(ewma()));
    CHECK(ez.value == Approx(0.0));
}

TEST_CASE("monotone trigger: dominating inputs signal upward no later") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> bump(0.0, 0.8);
    for (const auto& cfg : {shewhart(2.6), cusum(0.15, 3.0)}) {
        for (int trial = 0; trial < 400; ++trial) {
            const auto base = random_inputs(gen, 150, 1.2);
            auto dominating = base;
            for (auto& v : dominating) v += bump(gen);

            // Upward signal time read off the trace's upper statistic.
            const auto upward_time = [&](const std::vector<double>& inputs) {
                ChartState s = reset(cfg);
                for (std::size_t t = 0; t < inputs.size(); ++t) {
                    const auto out = step(cfg, s, inputs[t]);
                    const bool upward =
                        cfg.family == ChartFamily::shewhart_mean
                            ? inputs[t] >
                                  std::get<ShewhartParams>(cfg.params).ucl
                            : out.trace.stat_upper >=
                                  std::get<CusumParams>(cfg.params)
                                      .decision_interval;
                    if (upward) return static_cast<int>(t) + 1;
                    s = out.state_after;
                }
                return 1 << 20;
            };
            CHECK(upward_time(dominating) <= upward_time(base));
        }
    }
}

TEST_CASE("symmetry: negating the inputs swaps the chart's two sides") {
    std::mt19937_64 gen(37);
    std::vector<ChartConfig> configs = {shewhart(2.8), cusum(0.15, 3.0),
                                        ewma(0.2, 2.5), ad_cusum(0.1, 0.2, 3.5)};
    ChartConfig zone;
    zone.family = ChartFamily::zone_classic;
    zone.params = ZoneParams{};
    configs.push_back(zone);
    for (const auto& cfg : configs) {
        for (int trial = 0; trial < 1000; ++trial) {
            const auto inputs = random_inputs(gen, 80, 1.4);
            auto negated = inputs;
            for (auto& v : negated) v = -v;
            CHECK(signal_time(cfg, inputs) == signal_time(cfg, negated));
        }
    }
}

TEST_CASE("steps are pure: replaying a trace reproduces it bit-exactly") {
    std::mt19937_64 gen(41);
    std::vector<ChartConfig> configs = {shewhart(), cusum(), ewma(),
                                        ad_cusum(0.15, 0.3)};
    for (const auto& cfg : configs) {
        const auto inputs = random_inputs(gen, 300, 1.3);
        std::vector<ChartState> states;
        std::vector<StepOutcome> outcomes;
        ChartState s = reset(cfg);
        for (const double u : inputs) {
            states.push_back(s);
            outcomes.push_back(step(cfg, s, u));
            s = outcomes.back().state_after;
        }
        for (std::size_t t = 0; t < inputs.size(); ++t) {
            const auto replay = step(cfg, states[t], inputs[t]);
            CHECK(replay.signal == outcomes[t].signal);
            CHECK(replay.trace.stat_upper == outcomes[t].trace.stat_upper);
            CHECK(replay.trace.stat_lower == outcomes[t].trace.stat_lower);
            CHECK(replay.trace.limit_upper == outcomes[t].trace.limit_upper);
            CHECK(replay.trace.limit_lower == outcomes[t].trace.limit_lower);
        }
    }
}

TEST_CASE("config validation rejects malformed parameter sets") {
    ChartConfig bad = shewhart();
    std::get<ShewhartParams>(bad.params).ucl = -4.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    ChartConfig bad_cusum = cusum(-0.1);
    CHECK_THROWS_AS(bad_cusum.validate(), std::invalid_argument);

    ChartConfig bad_ewma = ewma(1.5);
    CHECK_THROWS_AS(bad_ewma.validate(), std::invalid_argument);

    ChartConfig bad_zone;
    bad_zone.family = ChartFamily::zone_classic;
    bad_zone.params = ZoneParams{{2.0, 1.0, 3.0, 4.0}, 8.0};
    CHECK_THROWS_AS(bad_zone.validate(), std::invalid_argument);

    ChartConfig mismatched;
    mismatched.family = ChartFamily::cusum_mean;
    mismatched.params = ShewhartParams{};
    CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);

    ChartConfig bad_ad = ad_cusum(0.1, 0.2);
    std::get<AdCusumParams>(bad_ad.params).zone_low = 5.0;
    CHECK_THROWS_AS(bad_ad.validate(), std::invalid_argument);
}

TEST_CASE("family names round-trip") {
    for (const auto family :
         {ChartFamily::shewhart_mean, ChartFamily::shewhart_median,
          ChartFamily::cusum_mean, ChartFamily::cusum_median,
          ChartFamily::ewma_mean, ChartFamily::ewma_median,
          ChartFamily::sparks_acusum, ChartFamily::aewma,
          ChartFamily::zone_classic, ChartFamily::adaptive_zone,
          ChartFamily::ad_cusum_median}) {
        CHECK(family_from_name(family_name(family)) == family);
    }
    CHECK_THROWS_AS(family_from_name("nope"), std::invalid_argument);
}
