#pragma once

#include <vector>

#include "fpcs/linalg.hpp"

namespace fpcs {

enum class TerminalFlag { equilibrium, horizon_capped };

enum class BreakKind { flow, jump };

// Piecewise-linear path. Breakpoint k carries the state at times[k]
// (right-continuous value); drifts[k] applies on [times[k], times[k+1]).
// A jump is a zero-duration breakpoint pair: (t, pre-jump state) followed by
// (t, post-jump state) with kind == jump on the latter.
struct Trajectory {
    double horizon = 0.0;
    TerminalFlag flag = TerminalFlag::horizon_capped;
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<BreakKind> kinds;
    std::vector<Vec> drifts;  // size() == times.size() - 1

    Eigen::Index dim() const { return states.empty() ? 0 : states.front().size(); }

    // Flow segments of positive duration.
    std::size_t segment_count() const;

    // Right-continuous value at time t (constant after the last breakpoint).
    Vec at(double t) const;

    // Left limit at time t (equals at(t) except at jump times).
    Vec left_limit(double t) const;

    void check_consistency() const;  // invariant guard, throws DriftInconsistency
};

}  // namespace fpcs
