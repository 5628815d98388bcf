#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fpcs/integrate.hpp"
#include "fpcs/system.hpp"
#include "fpcs/trajectory.hpp"

namespace fpcs {

// Right-continuous piecewise-constant perturbation: U(t) = sum of increments
// with jump time <= t, U(0-) = 0. Simultaneous jumps are merged.
class PerturbationPath {
public:
    PerturbationPath(Eigen::Index dim, std::vector<std::pair<double, Vec>> jumps);

    Eigen::Index dim() const { return dim_; }
    std::size_t jump_count() const { return times_.size(); }
    const std::vector<double>& jump_times() const { return times_; }
    const std::vector<Vec>& increments() const { return increments_; }

    Vec value(double t) const;
    double sup_norm_up_to(double t) const;
    double cumulative_abs_up_to(double t) const;

private:
    Eigen::Index dim_;
    std::vector<double> times_;
    std::vector<Vec> increments_;
    std::vector<Vec> partial_sums_;
};

enum class PathKind { deterministic, bernoulli_steps, discretized_wiener, square_wave };

// Family description consumed by make_path and the sweep harness. Fields are
// interpreted per kind; unused ones are ignored after validation.
struct PathSpec {
    PathKind kind = PathKind::deterministic;
    Eigen::Index dim = 0;
    std::vector<std::pair<double, Vec>> jumps;  // deterministic
    double amplitude = 0.0;                     // bernoulli theta / square-wave amplitude
    int count = 0;                              // bernoulli step count
    double spacing = 1.0;                       // bernoulli step spacing
    double volatility = 0.0;                    // wiener
    double step = 1e-2;                         // wiener discretization step
    double period = 0.0;                        // square wave
    int axis = 0;                               // square-wave direction
    double horizon = 0.0;                       // wiener / square-wave extent
};

PerturbationPath make_path(const PathSpec& spec, std::uint64_t seed);

// Exact perturbed trajectory for a piecewise-constant perturbation:
// x~(0) = x0 + U(0); unperturbed dynamics between jump times; translation by
// the increment at each jump, recorded as a zero-duration breakpoint.
Trajectory integrate_perturbed(const PwlPotential& sys, const Vec& x0, const PerturbationPath& u,
                               double horizon);

struct DeviationReport {
    double sup_deviation = 0.0;
    double sup_perturbation = 0.0;
    double ratio = 0.0;  // NaN when sup_perturbation == 0
    double cumulative_abs = 0.0;
    std::vector<std::pair<double, double>> deviation_samples;  // (t, |x~ - x|) at merged breakpoints
};

DeviationReport measure_deviation(const Trajectory& unperturbed, const Trajectory& perturbed,
                                  const PerturbationPath& u);

struct RunStats {
    double sup_deviation = 0.0;
    double sup_perturbation = 0.0;
    double ratio = 0.0;
    double cumulative_abs = 0.0;
};

struct GrowthSample {
    double t = 0.0;
    double max_sup_deviation = 0.0;
    double median_sup_deviation = 0.0;
};

struct SweepSummary {
    int runs = 0;
    bool ratio_defined = false;  // false when every run had sup|U| == 0
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    double max_sup_deviation = 0.0;
    double median_sup_deviation = 0.0;
    std::vector<RunStats> per_run;
    std::vector<GrowthSample> growth;
};

// Monte-Carlo harness: `runs` independent perturbed simulations of the family
// `spec`, per-run seeds derived from (seed, run index). Deterministic for a
// fixed seed; runs may be evaluated by `jobs` parallel workers.
SweepSummary sensitivity_sweep(const PwlPotential& sys, const Vec& x0, const PathSpec& spec,
                               int runs, double horizon, std::uint64_t seed, int jobs = 1,
                               int growth_samples = 40);

}  // namespace fpcs
