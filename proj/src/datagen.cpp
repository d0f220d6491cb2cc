#include "spclab/datagen.hpp"

#include <cmath>
#include <stdexcept>

namespace spclab {

void Scenario::validate() const {
    if (!(contamination_fraction >= 0.0 && contamination_fraction <= 1.0)) {
        throw std::invalid_argument(
            "scenario: contamination fraction must lie in [0,1]");
    }
    if (!(contamination_variance > 0.0)) {
        throw std::invalid_argument(
            "scenario: contamination variance must be positive");
    }
    if (!(in_control_variance > 0.0)) {
        throw std::invalid_argument(
            "scenario: in-control variance must be positive");
    }
    if (subgroup_size < 1) {
        throw std::invalid_argument("scenario: subgroup size must be >= 1");
    }
    if (!std::isfinite(shift)) {
        throw std::invalid_argument("scenario: shift must be finite");
    }
}

double sample_observation(const Scenario& scenario, RandomStream& stream) {
    const bool contaminated = stream.uniform() < scenario.contamination_fraction;
    const double variance = contaminated ? scenario.contamination_variance
                                         : scenario.in_control_variance;
    return scenario.shift + std::sqrt(variance) * stream.standard_normal();
}

void sample_subgroup(const Scenario& scenario, RandomStream& stream,
                     std::span<double> out) {
    if (out.size() != static_cast<std::size_t>(scenario.subgroup_size)) {
        throw std::invalid_argument("sample_subgroup: output size mismatch");
    }
    for (auto& value : out) {
        value = sample_observation(scenario, stream);
    }
}

std::vector<double> sample_subgroup(const Scenario& scenario,
                                    RandomStream& stream) {
    std::vector<double> out(static_cast<std::size_t>(scenario.subgroup_size));
    sample_subgroup(scenario, stream, out);
    return out;
}

}  // namespace spclab
