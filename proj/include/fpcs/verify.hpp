#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpcs/rng.hpp"
#include "fpcs/system.hpp"

namespace fpcs {

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::vector<std::string> notes;

    bool passed() const { return failures == 0; }
};

// Randomized property suites runnable from the CLI:
//   segments       trajectory structure (segment cap, decreasing drift norms)
//   nonexpansive   pairwise distance of unperturbed trajectories
//   monotone       drift selection is a monotone map
//   oracle         event-driven integrator vs a fine-step explicit integrator
//   basins         critical points, CNC basins, field-shift invariance
//   decomposition  low-dimensional subset splitting of the drift
// "all" runs every suite. Unknown names throw BadParams.
std::vector<std::string> suite_names();
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

// Random desk-scale test system: drifts uniform in [-2,2]^dim, offsets in
// [-1,1], no external field.
PwlPotential random_system(CounterRng& rng, Eigen::Index dim, int pieces);

// Sup-norm gap between the exact trajectory and a forward-Euler integration
// with per-step argmax piece selection.
double explicit_euler_gap(const PwlPotential& sys, const Vec& x0, double horizon, double step);

}  // namespace fpcs
