#pragma once

#include "fpcs/system.hpp"
#include "fpcs/trajectory.hpp"

namespace fpcs {

// Exact event-driven integration of the unperturbed dynamics: per segment the
// drift is the actual drift at the segment start, and the segment ends at the
// first time a non-persisting piece catches up with the running maximum
// (solved in closed form). Terminates at an equilibrium or at the horizon.
Trajectory integrate_unperturbed(const PwlPotential& sys, const Vec& x0, double horizon);

namespace detail {

// Extends `traj` from its last breakpoint to t_stop (or an equilibrium,
// whichever comes first). Returns true when the end state is an equilibrium.
// `segment_guard` caps the number of flow segments appended.
bool integrate_core(const PwlPotential& sys, Trajectory& traj, double t_stop,
                    std::size_t segment_guard);

}  // namespace detail

}  // namespace fpcs
