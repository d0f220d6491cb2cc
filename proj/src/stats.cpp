#include "spclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "spclab/rng.hpp"

namespace spclab {

namespace {

double normal_pdf(double x) {
    return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

// Second moment of the middle order statistic of n standard normals
// (n odd), by composite Simpson over the symmetric integrand.
double median_second_moment_odd(int n) {
    const int k = (n + 1) / 2;
    const double log_coeff =
        std::lgamma(n + 1.0) - 2.0 * std::lgamma(static_cast<double>(k));
    const double coeff = std::exp(log_coeff);
    const auto integrand = [&](double x) {
        const double cdf = normal_cdf(x);
        return x * x * coeff * std::pow(cdf * (1.0 - cdf), k - 1) *
               normal_pdf(x);
    };
    // Integrand decays like the normal density; [0,12] captures it fully.
    const int intervals = 6000;
    const double upper = 12.0;
    const double h = upper / intervals;
    double sum = integrand(0.0) + integrand(upper);
    for (int i = 1; i < intervals; ++i) {
        sum += integrand(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return 2.0 * sum * h / 3.0;  // symmetric about zero
}

// Midpoint-median variance for even n via one-time Monte Carlo
// (the joint order-statistic integral is not worth the code here).
double median_variance_even(int n) {
    constexpr std::uint64_t kSigmaMcStream = 0x5161'0000'0000'0000ull;
    Philox4x32 gen(0x73696d61u, kSigmaMcStream + static_cast<std::uint64_t>(n));
    const std::int64_t reps = 20'000'000;
    std::vector<double> sample(static_cast<std::size_t>(n));
    double sum_sq = 0.0;
    for (std::int64_t r = 0; r < reps; ++r) {
        for (auto& v : sample) v = gen.next_normal();
        const double med = subgroup_median(sample);
        sum_sq += med * med;
    }
    return sum_sq / static_cast<double>(reps);
}

}  // namespace

double subgroup_mean(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("subgroup_mean: empty subgroup");
    }
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    return sum / static_cast<double>(values.size());
}

double subgroup_median(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("subgroup_median: empty subgroup");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) {
        return sorted[n / 2];
    }
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double statistic_sigma(StatisticKind kind, int subgroup_size) {
    if (subgroup_size < 1) {
        throw std::invalid_argument("statistic_sigma: subgroup size must be >= 1");
    }
    if (kind == StatisticKind::mean) {
        return 1.0 / std::sqrt(static_cast<double>(subgroup_size));
    }
    if (subgroup_size == 1) {
        return 1.0;
    }
    static std::mutex cache_mutex;
    static std::map<int, double> cache;
    std::lock_guard lock(cache_mutex);
    if (const auto it = cache.find(subgroup_size); it != cache.end()) {
        return it->second;
    }
    const double variance = subgroup_size % 2 == 1
                                ? median_second_moment_odd(subgroup_size)
                                : median_variance_even(subgroup_size);
    const double sigma = std::sqrt(variance);
    cache.emplace(subgroup_size, sigma);
    return sigma;
}

double median_tail_prob(double m, int n) {
    if (n < 1 || n % 2 == 0) {
        throw std::invalid_argument("median_tail_prob: n must be odd and positive");
    }
    const double p = 1.0 - normal_cdf(m);
    const double q = 1.0 - p;
    const int k = (n + 1) / 2;
    double tail = 0.0;
    for (int j = k; j <= n; ++j) {
        const double log_binom = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                                 std::lgamma(n - j + 1.0);
        tail += std::exp(log_binom) * std::pow(p, j) * std::pow(q, n - j);
    }
    return std::min(tail, 1.0);
}

}  // namespace spclab
