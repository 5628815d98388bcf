#pragma once

#include <vector>

#include "fpcs/perturbation.hpp"
#include "fpcs/system.hpp"

namespace fpcs {

// A queueing scenario served by the longest-queue-first policy: at every
// instant the schedule maximizes the queue-length-weighted service rate.
struct SchedulingScenario {
    Eigen::Index queue_count = 0;
    std::vector<Vec> service_vectors;  // nonnegative rates, one vector per schedule
    Vec arrival_rate;                  // constant fluid arrivals (external field)
    bool include_idle = true;
};

// Fluid dynamics of the scenario as a potential: pieces (-s_i, 0) for each
// service vector, plus the zero piece when idling is allowed, with the
// arrival rate as the external field.
PwlPotential to_fpcs(const SchedulingScenario& scenario);

// Centered arrival noise: one jump per unit slot with increment
// counts_k - rate, so fluid-plus-perturbation tracks the sample path.
PerturbationPath arrivals_to_perturbation(const std::vector<Vec>& arrival_counts, const Vec& rate);

}  // namespace fpcs
