#include "fpcs/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpcs {

namespace {

constexpr double kEquilibriumTol = 1e-10;
constexpr double kEventMergeTol = 1e-12;
constexpr double kPersistTol = 1e-8;
constexpr double kDriftNormSlack = 1e-10;

struct SegmentPlan {
    Vec drift;
    double dt;          // +inf when no piece ever catches up
    bool equilibrium;
};

Vec min_norm_over(const PwlPotential& sys, const std::vector<int>& idx) {
    PointList hull;
    hull.reserve(idx.size());
    for (int i : idx) hull.push_back(sys.effective_drift(i));
    return min_norm_point(hull).point;
}

// Decides drift and exact event time at x. Candidate events below the merge
// tolerance are treated as immediate re-activations: the piece joins the
// active set and the drift is recomputed.
SegmentPlan plan_segment(const PwlPotential& sys, const Vec& x) {
    const int m = sys.piece_count();
    Evaluation ev = evaluate(sys, x);
    std::vector<int> active = ev.active.indices;
    std::vector<double> values(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) values[static_cast<std::size_t>(i)] = sys.piece_value(i, x);
    const double vmax = ev.value;

    for (int round = 0; round <= m; ++round) {
        Vec drift = min_norm_over(sys, active);
        if (drift.norm() <= kEquilibriumTol) return SegmentPlan{drift, 0.0, true};

        ActiveSet act;
        act.indices = active;
        for (int i : active) act.drifts.push_back(sys.pieces()[static_cast<std::size_t>(i)].drift);
        ActiveSet persisting = persisting_subset(sys, act, drift);

        Vec check = min_norm_over(sys, persisting.indices);
        if ((check - drift).norm() > kPersistTol)
            throw DriftInconsistency("persisting-subset drift differs from the segment drift");

        // Slope of the running maximum along the drift.
        double slope_max = -std::numeric_limits<double>::infinity();
        for (int i : active)
            slope_max = std::max(slope_max, -sys.pieces()[static_cast<std::size_t>(i)].drift.dot(drift));

        double t_event = std::numeric_limits<double>::infinity();
        std::vector<int> immediate;
        for (int i = 0; i < m; ++i) {
            if (std::find(active.begin(), active.end(), i) != active.end()) continue;
            double slope = -sys.pieces()[static_cast<std::size_t>(i)].drift.dot(drift);
            if (slope <= slope_max) continue;
            double gap = vmax - values[static_cast<std::size_t>(i)];
            double t = std::max(gap, 0.0) / (slope - slope_max);
            if (t < kEventMergeTol)
                immediate.push_back(i);
            else
                t_event = std::min(t_event, t);
        }
        if (immediate.empty()) return SegmentPlan{drift, t_event, false};
        for (int i : immediate) active.push_back(i);
    }
    throw DriftInconsistency("active-set re-activation did not settle");
}

}  // namespace

namespace detail {

bool integrate_core(const PwlPotential& sys, Trajectory& traj, double t_stop,
                    std::size_t segment_guard) {
    const bool plain = !sys.has_field();
    const std::size_t hard_cap =
        plain ? (static_cast<std::size_t>(1) << std::min(sys.piece_count(), 30)) - 1 : segment_guard;

    double prev_norm = std::numeric_limits<double>::infinity();
    std::size_t segments = 0;
    while (true) {
        double t = traj.times.back();
        if (t >= t_stop) return false;
        const Vec& x = traj.states.back();
        SegmentPlan plan = plan_segment(sys, x);
        if (plan.equilibrium) return true;

        if (plain) {
            if (plan.drift.norm() >= prev_norm + kDriftNormSlack)
                throw DriftInconsistency("drift norm failed to decrease");
            prev_norm = plan.drift.norm();
        }
        if (++segments > hard_cap) {
            if (plain) throw DriftInconsistency("segment count exceeded 2^m - 1");
            throw ZenoGuard("segment guard exceeded");
        }

        double dt = std::min(plan.dt, t_stop - t);
        traj.drifts.push_back(plan.drift);
        traj.times.push_back(t + dt);
        traj.states.push_back(x + dt * plan.drift);
        traj.kinds.push_back(BreakKind::flow);
        if (!(plan.dt < t_stop - t)) return false;  // ran to the stop time
    }
}

}  // namespace detail

Trajectory integrate_unperturbed(const PwlPotential& sys, const Vec& x0, double horizon) {
    require_dim(x0, sys.dim(), "initial state");
    require_finite(x0, "initial state");
    if (!(horizon > 0)) throw BadParams("integrate_unperturbed: horizon must be positive");

    Trajectory traj;
    traj.horizon = horizon;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    traj.kinds.push_back(BreakKind::flow);
    bool equilibrium = detail::integrate_core(sys, traj, horizon, 1000000);
    traj.flag = equilibrium ? TerminalFlag::equilibrium : TerminalFlag::horizon_capped;
    return traj;
}

}  // namespace fpcs
