#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spclab/rng.hpp"

namespace spclab {

/// Data-generating description: observations are drawn from the mixture
/// (1-theta) N(shift, in_control_variance) + theta N(shift, contamination
/// variance), independently per observation.
struct Scenario {
    double shift = 0.0;                   // process-mean offset, observation units
    double contamination_fraction = 0.0;  // theta in [0,1]
    double contamination_variance = 1.0;  // must be > 0
    double in_control_variance = 1.0;     // fixed at 1 for the reference study
    int subgroup_size = 5;

    void validate() const;  // throws std::invalid_argument
};

/// Replication indices are partitioned into domains so that distinct phases
/// of a run (plain simulation, calibration, convention probing, table cells)
/// never share streams. Replication index must stay below 2^40.
inline constexpr std::uint64_t kStreamDomainSimulate = 0;
inline constexpr std::uint64_t kStreamDomainCalibrate = 1;
inline constexpr std::uint64_t kStreamDomainConvention = 2;
inline constexpr std::uint64_t kStreamDomainTableBase = 16;

inline constexpr std::uint64_t stream_index(std::uint64_t domain,
                                            std::uint64_t replication) {
    return (domain << 40) | replication;
}

/// One replication's private random stream. A value type: the observation
/// sequence is a pure function of (master_seed, replication_index).
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t replication_index)
        : engine_(master_seed, replication_index) {}

    double uniform() { return engine_.next_uniform(); }
    double standard_normal() { return engine_.next_normal(); }

private:
    Philox4x32 engine_;
};

/// One observation from the scenario's mixture. Every call consumes exactly
/// two uniforms (mixture decision, then the normal draw) regardless of theta,
/// and the shift is added after sampling a zero-mean draw, so sequences for
/// different shifts or contamination levels generated from the same stream
/// share their noise.
double sample_observation(const Scenario& scenario, RandomStream& stream);

/// Fills `out` (whose size must equal scenario.subgroup_size) with one
/// subgroup of observations.
void sample_subgroup(const Scenario& scenario, RandomStream& stream,
                     std::span<double> out);

std::vector<double> sample_subgroup(const Scenario& scenario,
                                    RandomStream& stream);

}  // namespace spclab
