#pragma once

#include <span>

namespace spclab {

enum class StatisticKind { mean, median };

/// Arithmetic mean of a subgroup. Throws std::invalid_argument when empty.
double subgroup_mean(std::span<const double> values);

/// Sample median: middle order statistic for odd sizes, midpoint of the two
/// middle order statistics for even sizes. Throws std::invalid_argument when
/// empty.
double subgroup_median(std::span<const double> values);

/// In-control standard deviation of the subgroup statistic for unit-variance
/// observations: 1/sqrt(n) for the mean; for the median the exact
/// order-statistic variance (quadrature for odd n, one-time high-precision
/// Monte Carlo for even n). Results are cached; safe to call concurrently.
double statistic_sigma(StatisticKind kind, int subgroup_size);

/// P(median of n standard normal observations > m) for odd n, evaluated as
/// the binomial tail sum over order statistics. Even n has no single-order-
/// statistic form under the midpoint convention; throws std::invalid_argument.
double median_tail_prob(double m, int n);

}  // namespace spclab
