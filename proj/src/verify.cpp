#include "fpcs/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fpcs/constants.hpp"
#include "fpcs/critical.hpp"
#include "fpcs/integrate.hpp"

namespace fpcs {

PwlPotential random_system(CounterRng& rng, Eigen::Index dim, int pieces) {
    std::vector<Piece> parts;
    for (int i = 0; i < pieces; ++i) {
        Vec mu(dim);
        for (Eigen::Index k = 0; k < dim; ++k) mu(k) = rng.uniform(-2.0, 2.0);
        parts.push_back(Piece{std::move(mu), rng.uniform(-1.0, 1.0)});
    }
    return PwlPotential(dim, std::move(parts));
}

double explicit_euler_gap(const PwlPotential& sys, const Vec& x0, double horizon, double step) {
    Trajectory exact = integrate_unperturbed(sys, x0, horizon);
    const int m = sys.piece_count();
    Vec x = x0;
    double gap = 0.0;
    const long steps = static_cast<long>(horizon / step);
    for (long k = 0; k < steps; ++k) {
        // argmax piece selection; chattering across ties resolves the sliding
        // dynamics in the limit of small steps
        int best = 0;
        double best_value = sys.piece_value(0, x);
        for (int i = 1; i < m; ++i) {
            double v = sys.piece_value(i, x);
            if (v > best_value) {
                best_value = v;
                best = i;
            }
        }
        x += step * sys.effective_drift(best);
        double t = static_cast<double>(k + 1) * step;
        gap = std::max(gap, (x - exact.at(t)).norm());
    }
    return gap;
}

namespace {

Vec random_point(CounterRng& rng, Eigen::Index dim, double radius) {
    Vec x(dim);
    for (Eigen::Index k = 0; k < dim; ++k) x(k) = rng.uniform(-radius, radius);
    return x;
}

Vec plain_drift(const PwlPotential& sys, const Vec& x) {
    Evaluation ev = evaluate(sys, x);
    return min_norm_point(ev.active.drifts).point;
}

void check(SuiteResult& result, bool ok, const std::string& note) {
    ++result.cases;
    if (!ok) {
        ++result.failures;
        if (result.notes.size() < 8) result.notes.push_back(note);
    }
}

SuiteResult suite_segments(std::uint64_t seed) {
    SuiteResult result{"segments"};
    CounterRng rng(seed, 1);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + rng.next_int(3);
        int m = 2 + rng.next_int(5);
        PwlPotential sys = random_system(rng, n, m);
        Trajectory traj = integrate_unperturbed(sys, random_point(rng, n, 4.0), 50.0);
        check(result, traj.segment_count() <= (1u << sys.piece_count()) - 1,
              "segment count exceeds 2^m - 1");
        bool decreasing = true;
        for (std::size_t k = 0; k + 1 < traj.drifts.size(); ++k)
            if (traj.drifts[k + 1].norm() >= traj.drifts[k].norm() - 1e-10) decreasing = false;
        check(result, decreasing, "drift norms not strictly decreasing");
    }
    return result;
}

SuiteResult suite_nonexpansive(std::uint64_t seed) {
    SuiteResult result{"nonexpansive"};
    CounterRng rng(seed, 2);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + rng.next_int(3);
        PwlPotential sys = random_system(rng, n, 2 + rng.next_int(5));
        for (int pair = 0; pair < 10; ++pair) {
            Trajectory a = integrate_unperturbed(sys, random_point(rng, n, 4.0), 20.0);
            Trajectory b = integrate_unperturbed(sys, random_point(rng, n, 4.0), 20.0);
            std::set<double> times(a.times.begin(), a.times.end());
            times.insert(b.times.begin(), b.times.end());
            double prev = std::numeric_limits<double>::infinity();
            bool ok = true;
            for (double t : times) {
                double d = (a.at(t) - b.at(t)).norm();
                if (d > prev + 1e-9) ok = false;
                prev = d;
            }
            check(result, ok, "distance increased between unperturbed trajectories");
        }
    }
    return result;
}

SuiteResult suite_monotone(std::uint64_t seed) {
    SuiteResult result{"monotone"};
    CounterRng rng(seed, 3);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + rng.next_int(3);
        PwlPotential sys = random_system(rng, n, 2 + rng.next_int(5));
        for (int pair = 0; pair < 20; ++pair) {
            Vec x1 = random_point(rng, n, 4.0);
            Vec x2 = random_point(rng, n, 4.0);
            Vec v1 = plain_drift(sys, x1);
            Vec v2 = plain_drift(sys, x2);
            check(result, (v1 - v2).dot(x1 - x2) <= 1e-9, "monotone-map inequality violated");
        }
    }
    return result;
}

SuiteResult suite_oracle(std::uint64_t seed) {
    SuiteResult result{"oracle"};
    CounterRng rng(seed, 4);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 1 + rng.next_int(3);
        PwlPotential sys = random_system(rng, n, 2 + rng.next_int(5));
        double gap = explicit_euler_gap(sys, random_point(rng, n, 3.0), 5.0, 1e-4);
        check(result, gap <= 1e-2, "explicit-Euler cross-check gap " + std::to_string(gap));
    }
    return result;
}

SuiteResult suite_basins(std::uint64_t seed) {
    SuiteResult result{"basins"};
    CounterRng rng(seed, 5);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + rng.next_int(3);
        PwlPotential sys = random_system(rng, n, 2 + rng.next_int(5));
        PointList critical = find_critical_points(sys);
        double cnc = compute_cnc(sys, critical);
        check(result, cnc > 0, "CNC not positive");
        bool all_basins = true;
        bool any_global = critical.empty();
        for (const Vec& p : critical) {
            if (!verify_basin(sys, p, cnc)) all_basins = false;
            if (verify_basin(sys, p, std::numeric_limits<double>::infinity())) any_global = true;
        }
        check(result, all_basins, "CNC is not a basin radius for some critical point");
        check(result, any_global, "no critical point with a whole-space basin");

        // Field shift leaves the critical structure unchanged.
        Vec shift = random_point(rng, n, 1.0);
        std::vector<Piece> shifted = sys.pieces();
        for (Piece& piece : shifted) piece.drift += shift;
        PwlPotential moved(n, std::move(shifted));
        PointList critical2 = find_critical_points(moved);
        bool same = critical.size() == critical2.size();
        if (same) {
            for (const Vec& p : critical) {
                bool found = false;
                for (const Vec& q : critical2)
                    if ((p - q).norm() <= 1e-9 * (1.0 + p.norm())) found = true;
                if (!found) same = false;
            }
        }
        double cnc2 = compute_cnc(moved, critical2);
        bool cnc_same = (std::isinf(cnc) && std::isinf(cnc2)) || std::abs(cnc - cnc2) <= 1e-9;
        check(result, same && cnc_same, "critical structure changed under a field shift");
    }
    return result;
}

SuiteResult suite_decomposition(std::uint64_t seed) {
    SuiteResult result{"decomposition"};
    CounterRng rng(seed, 6);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + rng.next_int(2);
        int m = 2 + rng.next_int(4);
        PwlPotential sys = random_system(rng, n, m);
        for (unsigned mask = 1; mask < (1u << sys.piece_count()); ++mask) {
            std::vector<int> subset;
            PointList drifts;
            for (int i = 0; i < sys.piece_count(); ++i)
                if (mask & (1u << i)) {
                    subset.push_back(i);
                    drifts.push_back(sys.pieces()[static_cast<std::size_t>(i)].drift);
                }
            if (affine_rank(drifts) >= n) continue;
            ProjectedSystem projected = project_subsystem(sys, subset);
            // Points whose active set stays inside the subset: perturb into a
            // member region.
            for (int probe = 0; probe < 4; ++probe) {
                Vec x = random_point(rng, n, 3.0);
                Evaluation ev = evaluate(sys, x);
                bool inside = true;
                for (int idx : ev.active.indices)
                    if (std::find(subset.begin(), subset.end(), idx) == subset.end()) inside = false;
                if (!inside) continue;
                Vec parent = plain_drift(sys, x);
                Vec child = plain_drift(projected.child, projected.basis.transpose() * x);
                Vec lifted = projected.translation + projected.basis * child;
                check(result, (parent - lifted).norm() <= 1e-9,
                      "drift decomposition residual too large");
            }
        }
    }
    return result;
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"segments", "nonexpansive", "monotone", "oracle", "basins", "decomposition"};
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "segments" || name == "lemma2") return suite_segments(seed);
    if (name == "nonexpansive") return suite_nonexpansive(seed);
    if (name == "monotone") return suite_monotone(seed);
    if (name == "oracle") return suite_oracle(seed);
    if (name == "basins") return suite_basins(seed);
    if (name == "decomposition") return suite_decomposition(seed);
    throw BadParams("unknown suite '" + name + "'");
}

}  // namespace fpcs
