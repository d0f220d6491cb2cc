#include <doctest.h>

#include <cmath>
#include <vector>

#include "spclab/datagen.hpp"

using namespace spclab;

namespace {

Scenario contaminated_reference() {
    Scenario sc;
    sc.contamination_fraction = 0.06;
    sc.contamination_variance = 6.25;
    return sc;
}

}  // namespace

TEST_CASE("scenario invariants are enforced at construction") {
    Scenario sc;
    CHECK_NOTHROW(sc.validate());

    sc.contamination_fraction = -0.1;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc.contamination_fraction = 1.1;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);

    sc = Scenario{};
    sc.contamination_variance = 0.0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);

    sc = Scenario{};
    sc.subgroup_size = 0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("pure normal case: sample moments match N(0,1)") {
    Scenario sc;  // theta = 0, delta = 0
    RandomStream stream(20240115, 0);
    const int n = 1'000'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_observation(sc, stream);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    // SE(mean) = 1/sqrt(n), SE(var) ~ sqrt(2/n) for the normal case.
    CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("contaminated mixture variance matches the analytic value") {
    // theta=0.06, sigma2=6.25: var = 0.94 + 0.06 * 6.25 = 1.315.
    Scenario sc = contaminated_reference();
    RandomStream stream(20240115, 1);
    const int n = 1'000'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_observation(sc, stream);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    // Var of the sample variance: (mu4 - var^2)/n with
    // mu4 = 3(0.94 + 0.06*6.25^2) = 9.85125 for this mixture.
    const double mu4 = 3.0 * (0.94 + 0.06 * 6.25 * 6.25);
    const double se = std::sqrt((mu4 - 1.315 * 1.315) / n);
    CHECK(std::fabs(var - 1.315) < 4.0 * se);
}

TEST_CASE("subgroups have the configured size and match the stream") {
    Scenario sc;
    sc.subgroup_size = 5;
    RandomStream stream(7, 3);
    const auto group = sample_subgroup(sc, stream);
    CHECK(group.size() == 5);

    // n=1 subgroup equals a single observation drawn from the same stream.
    Scenario single = sc;
    single.subgroup_size = 1;
    RandomStream a(7, 3);
    RandomStream b(7, 3);
    const auto one = sample_subgroup(single, a);
    CHECK(one.size() == 1);
    CHECK(one[0] == sample_observation(single, b));
}

TEST_CASE("identical (seed, replication) reproduces the sequence bit-exactly") {
    Scenario sc = contaminated_reference();
    sc.shift = 0.3;
    RandomStream a(123456789, 42);
    RandomStream b(123456789, 42);
    for (int i = 0; i < 2000; ++i) {
        CHECK(sample_observation(sc, a) == sample_observation(sc, b));
    }
}

TEST_CASE("distinct replication indices give distinct sequences") {
    Scenario sc;
    RandomStream a(123456789, 0);
    RandomStream b(123456789, 1);
    int equal = 0;
    for (int i = 0; i < 1000; ++i) {
        if (sample_observation(sc, a) == sample_observation(sc, b)) ++equal;
    }
    CHECK(equal == 0);
}

TEST_CASE("shift equivariance holds exactly") {
    Scenario base = contaminated_reference();
    Scenario shifted = base;
    shifted.shift = 0.7;
    RandomStream a(99, 5);
    RandomStream b(99, 5);
    for (int i = 0; i < 5000; ++i) {
        const double x0 = sample_observation(base, a);
        const double x1 = sample_observation(shifted, b);
        CHECK(x1 == x0 + 0.7);
    }
}

TEST_CASE("stream domains partition the replication space") {
    CHECK(stream_index(kStreamDomainSimulate, 7) == 7);
    CHECK(stream_index(kStreamDomainCalibrate, 7) ==
          ((std::uint64_t{1} << 40) | 7));
    CHECK(stream_index(kStreamDomainTableBase, 0) != stream_index(kStreamDomainTableBase + 1, 0));
}
