#include "fpcs/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace fpcs {

std::size_t Trajectory::segment_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (times[k + 1] > times[k]) ++n;
    return n;
}

Vec Trajectory::at(double t) const {
    if (times.empty()) return Vec();
    if (t < times.front()) return states.front();
    // Latest breakpoint with times[k] <= t; right-continuity across jumps.
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
    if (k + 1 >= times.size()) return states.back();
    return states[k] + (t - times[k]) * drifts[k];
}

Vec Trajectory::left_limit(double t) const {
    if (times.empty()) return Vec();
    if (t <= times.front()) return states.front();
    // First breakpoint with times[k] >= t, approached from the segment before.
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times.begin());
    if (k == 0) return states.front();
    --k;  // segment [times[k], times[k+1]] contains t as interior or right endpoint
    if (k + 1 >= times.size()) return states.back();
    return states[k] + (t - times[k]) * drifts[k];
}

void Trajectory::check_consistency() const {
    if (times.size() != states.size() || times.size() != kinds.size() ||
        (times.size() > 0 && drifts.size() + 1 != times.size()))
        throw DriftInconsistency("trajectory: ragged breakpoint arrays");
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        double dt = times[k + 1] - times[k];
        if (dt < 0) throw DriftInconsistency("trajectory: times not sorted");
        if (kinds[k + 1] == BreakKind::flow) {
            Vec predicted = states[k] + dt * drifts[k];
            if ((predicted - states[k + 1]).norm() > 1e-12 * (1.0 + states[k + 1].norm()))
                throw DriftInconsistency("trajectory: breakpoint does not match segment drift");
        }
    }
}

}  // namespace fpcs
