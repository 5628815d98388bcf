#include "fpcs/perturbation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "fpcs/rng.hpp"

namespace fpcs {

PerturbationPath::PerturbationPath(Eigen::Index dim, std::vector<std::pair<double, Vec>> jumps)
    : dim_(dim) {
    if (dim < 0) throw BadParams("perturbation path: negative dimension");
    std::stable_sort(jumps.begin(), jumps.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [t, du] : jumps) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw BadParams("perturbation jump times must be finite and >= 0");
        require_dim(du, dim, "perturbation increment");
        require_finite(du, "perturbation increment");
        if (!times_.empty() && t == times_.back()) {
            increments_.back() += du;  // simultaneous jumps merge
        } else {
            times_.push_back(t);
            increments_.push_back(du);
        }
    }
    Vec acc = Vec::Zero(dim);
    partial_sums_.reserve(increments_.size());
    for (const Vec& du : increments_) {
        acc += du;
        partial_sums_.push_back(acc);
    }
}

Vec PerturbationPath::value(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return Vec::Zero(dim_);
    return partial_sums_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double PerturbationPath::sup_norm_up_to(double t) const {
    double sup = 0.0;
    for (std::size_t k = 0; k < times_.size() && times_[k] <= t; ++k)
        sup = std::max(sup, partial_sums_[k].norm());
    return sup;
}

double PerturbationPath::cumulative_abs_up_to(double t) const {
    double total = 0.0;
    for (std::size_t k = 0; k < times_.size() && times_[k] <= t; ++k) total += increments_[k].norm();
    return total;
}

PerturbationPath make_path(const PathSpec& spec, std::uint64_t seed) {
    if (spec.dim <= 0 && spec.kind != PathKind::deterministic)
        throw BadParams("make_path: dimension must be positive");
    switch (spec.kind) {
        case PathKind::deterministic: {
            Eigen::Index dim = spec.dim;
            if (dim <= 0 && !spec.jumps.empty()) dim = spec.jumps.front().second.size();
            if (dim < 0) throw BadParams("make_path: cannot infer dimension");
            return PerturbationPath(dim, spec.jumps);
        }
        case PathKind::bernoulli_steps: {
            if (!(spec.amplitude >= 0) || spec.count < 0 || !(spec.spacing > 0))
                throw BadParams("make_path: bad bernoulli_steps parameters");
            CounterRng rng(seed, 0xb3);
            std::vector<std::pair<double, Vec>> jumps;
            jumps.reserve(static_cast<std::size_t>(spec.count));
            for (int k = 1; k <= spec.count; ++k) {
                Vec du = Vec::Zero(spec.dim);
                du(rng.next_int(static_cast<int>(spec.dim))) = spec.amplitude * rng.next_sign();
                jumps.emplace_back(spec.spacing * k, du);
            }
            return PerturbationPath(spec.dim, std::move(jumps));
        }
        case PathKind::discretized_wiener: {
            if (!(spec.volatility >= 0) || !(spec.step > 0) || !(spec.horizon > 0))
                throw BadParams("make_path: bad discretized_wiener parameters");
            CounterRng rng(seed, 0x77);
            std::vector<std::pair<double, Vec>> jumps;
            const double root_step = std::sqrt(spec.step);
            for (double t = spec.step; t <= spec.horizon + 1e-12; t += spec.step) {
                Vec du(spec.dim);
                for (Eigen::Index i = 0; i < spec.dim; ++i)
                    du(i) = spec.volatility * root_step * rng.next_normal();
                jumps.emplace_back(std::min(t, spec.horizon), du);
            }
            return PerturbationPath(spec.dim, std::move(jumps));
        }
        case PathKind::square_wave: {
            if (!(spec.amplitude >= 0) || !(spec.period > 0) || !(spec.horizon > 0) ||
                spec.axis < 0 || spec.axis >= spec.dim)
                throw BadParams("make_path: bad square_wave parameters");
            std::vector<std::pair<double, Vec>> jumps;
            Vec up = Vec::Zero(spec.dim);
            up(spec.axis) = spec.amplitude;
            // Centered wave: starts at +amplitude, alternates by +-2*amplitude
            // every half period, so sup |U| == amplitude.
            jumps.emplace_back(0.0, up);
            double sign = -1.0;
            for (double t = spec.period / 2; t <= spec.horizon; t += spec.period / 2) {
                jumps.emplace_back(t, 2.0 * sign * up);
                sign = -sign;
            }
            return PerturbationPath(spec.dim, std::move(jumps));
        }
    }
    throw BadParams("make_path: unknown kind");
}

Trajectory integrate_perturbed(const PwlPotential& sys, const Vec& x0, const PerturbationPath& u,
                               double horizon) {
    require_dim(x0, sys.dim(), "initial state");
    require_finite(x0, "initial state");
    if (u.dim() != sys.dim()) throw DimensionMismatch("perturbation dimension mismatch");
    if (!(horizon > 0)) throw BadParams("integrate_perturbed: horizon must be positive");
    if (!u.jump_times().empty() && u.jump_times().back() > horizon)
        throw BadParams("integrate_perturbed: jump times must lie within [0, horizon]");

    constexpr std::size_t kTotalGuard = 10000000;

    Trajectory traj;
    traj.horizon = horizon;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    traj.kinds.push_back(BreakKind::flow);

    bool at_equilibrium = false;
    // pad: a jump follows, so an equilibrium wait must appear as an explicit
    // zero-drift segment up to the jump time.
    auto run_until = [&](double t_stop, bool pad) {
        if (traj.times.back() >= t_stop) return;
        if (!at_equilibrium) at_equilibrium = detail::integrate_core(sys, traj, t_stop, kTotalGuard);
        if (pad && at_equilibrium && traj.times.back() < t_stop) {
            traj.drifts.push_back(Vec::Zero(sys.dim()));
            traj.times.push_back(t_stop);
            traj.states.push_back(traj.states.back());
            traj.kinds.push_back(BreakKind::flow);
        }
        if (traj.times.size() > kTotalGuard) throw ZenoGuard("perturbed trajectory breakpoint guard");
    };

    const auto& jump_times = u.jump_times();
    const auto& increments = u.increments();
    for (std::size_t k = 0; k < jump_times.size(); ++k) {
        run_until(jump_times[k], true);
        traj.drifts.push_back(Vec::Zero(sys.dim()));
        traj.times.push_back(jump_times[k]);
        traj.states.push_back(traj.states.back() + increments[k]);
        traj.kinds.push_back(BreakKind::jump);
        at_equilibrium = false;
    }
    run_until(horizon, false);
    traj.flag = at_equilibrium ? TerminalFlag::equilibrium : TerminalFlag::horizon_capped;
    return traj;
}

DeviationReport measure_deviation(const Trajectory& unperturbed, const Trajectory& perturbed,
                                  const PerturbationPath& u) {
    if (unperturbed.dim() != perturbed.dim()) throw DimensionMismatch("trajectory dimension mismatch");
    if (std::abs(unperturbed.horizon - perturbed.horizon) > 1e-12)
        throw HorizonMismatch("trajectories have different horizons");

    std::vector<double> merged;
    merged.reserve(unperturbed.times.size() + perturbed.times.size() + 1);
    merged.insert(merged.end(), unperturbed.times.begin(), unperturbed.times.end());
    merged.insert(merged.end(), perturbed.times.begin(), perturbed.times.end());
    merged.push_back(unperturbed.horizon);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    DeviationReport report;
    report.deviation_samples.reserve(merged.size());
    for (double t : merged) {
        double left = (unperturbed.left_limit(t) - perturbed.left_limit(t)).norm();
        double right = (unperturbed.at(t) - perturbed.at(t)).norm();
        if (left > right + 1e-15) report.deviation_samples.emplace_back(t, left);
        report.deviation_samples.emplace_back(t, right);
        report.sup_deviation = std::max(report.sup_deviation, std::max(left, right));
    }
    report.sup_perturbation = u.sup_norm_up_to(unperturbed.horizon);
    report.cumulative_abs = u.cumulative_abs_up_to(unperturbed.horizon);
    report.ratio = report.sup_perturbation > 0.0
                       ? report.sup_deviation / report.sup_perturbation
                       : std::numeric_limits<double>::quiet_NaN();
    return report;
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SweepSummary sensitivity_sweep(const PwlPotential& sys, const Vec& x0, const PathSpec& spec,
                               int runs, double horizon, std::uint64_t seed, int jobs,
                               int growth_samples) {
    if (runs < 1) throw BadParams("sensitivity_sweep: runs must be >= 1");
    if (jobs < 1) jobs = 1;

    Trajectory base = integrate_unperturbed(sys, x0, horizon);

    std::vector<double> grid;
    for (int g = 1; g <= growth_samples; ++g)
        grid.push_back(horizon * static_cast<double>(g) / growth_samples);

    struct RunOutput {
        RunStats stats;
        std::vector<double> running_sup;  // over the growth grid
    };
    std::vector<RunOutput> outputs(static_cast<std::size_t>(runs));

    auto work = [&](int r) {
        CounterRng derived(seed, 0x5eedULL);
        std::uint64_t run_seed = derived.derive(static_cast<std::uint64_t>(r)).next_u64();
        PerturbationPath path = make_path(spec, run_seed);
        Trajectory pert = integrate_perturbed(sys, x0, path, horizon);
        DeviationReport report = measure_deviation(base, pert, path);

        RunOutput out;
        out.stats = RunStats{report.sup_deviation, report.sup_perturbation, report.ratio,
                             report.cumulative_abs};
        out.running_sup.assign(grid.size(), 0.0);
        double running = 0.0;
        std::size_t gi = 0;
        for (const auto& [t, d] : report.deviation_samples) {
            while (gi < grid.size() && t > grid[gi]) {
                out.running_sup[gi] = running;
                ++gi;
            }
            running = std::max(running, d);
        }
        for (; gi < grid.size(); ++gi) out.running_sup[gi] = running;
        outputs[static_cast<std::size_t>(r)] = std::move(out);
    };

    if (jobs == 1) {
        for (int r = 0; r < runs; ++r) work(r);
    } else {
        std::vector<std::thread> pool;
        std::atomic_int next{0};
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1)) work(r);
            });
        for (auto& th : pool) th.join();
    }

    SweepSummary summary;
    summary.runs = runs;
    double ratio_sum = 0.0;
    int ratio_count = 0;
    std::vector<double> sup_devs;
    for (const RunOutput& out : outputs) {
        summary.per_run.push_back(out.stats);
        summary.max_sup_deviation = std::max(summary.max_sup_deviation, out.stats.sup_deviation);
        sup_devs.push_back(out.stats.sup_deviation);
        if (!std::isnan(out.stats.ratio)) {
            ratio_sum += out.stats.ratio;
            ++ratio_count;
            summary.max_ratio = std::max(summary.max_ratio, out.stats.ratio);
        }
    }
    summary.ratio_defined = ratio_count > 0;
    summary.mean_ratio = ratio_count ? ratio_sum / ratio_count : 0.0;
    summary.median_sup_deviation = median_of(sup_devs);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        GrowthSample sample;
        sample.t = grid[g];
        std::vector<double> at_g;
        for (const RunOutput& out : outputs) {
            sample.max_sup_deviation = std::max(sample.max_sup_deviation, out.running_sup[g]);
            at_g.push_back(out.running_sup[g]);
        }
        sample.median_sup_deviation = median_of(at_g);
        summary.growth.push_back(sample);
    }
    return summary;
}

}  // namespace fpcs
