#include <doctest.h>

#include <cmath>

#include "fpcs/critical.hpp"
#include "fpcs/integrate.hpp"
#include "fpcs/rng.hpp"
#include "fpcs/system.hpp"
#include "fpcs/verify.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fpcs;
using fixtures::two_queue;
using fixtures::v1;
using fixtures::v2;

TEST_CASE("construction strips dominated duplicate pieces") {
    std::vector<Piece> pieces{{v2(-1, 0), 0.0}, {v2(-1, 0), 2.0}, {v2(0, -1), 0.0}};
    PwlPotential sys(2, pieces);
    CHECK(sys.piece_count() == 2);
    bool found = false;
    for (const Piece& p : sys.pieces())
        if ((p.drift - v2(-1, 0)).norm() < 1e-12) {
            found = true;
            CHECK(p.offset == 2.0);  // dominated offset stripped
        }
    CHECK(found);
    CHECK_THROWS_AS(PwlPotential(2, {}), BadParams);
}

TEST_CASE("evaluate on the two-queue potential") {
    auto sys = two_queue();
    auto e1 = evaluate(sys, v2(2, 1));
    CHECK(e1.value == doctest::Approx(2.0));
    REQUIRE(e1.active.indices.size() == 1);
    CHECK(e1.active.indices[0] == 0);

    auto e2 = evaluate(sys, v2(1, 1));
    CHECK(e2.value == doctest::Approx(1.0));
    CHECK(e2.active.indices == std::vector<int>{0, 1});

    auto e3 = evaluate(sys, v2(0, 0));
    CHECK(e3.value == doctest::Approx(0.0));
    CHECK(e3.active.indices.size() == 3);

    CHECK_THROWS_AS(evaluate(sys, v1(0)), DimensionMismatch);
}

TEST_CASE("actual_drift follows the longest queue") {
    auto sys = two_queue();
    CHECK((actual_drift(sys, v2(2, 1)) - v2(-1, 0)).norm() <= 1e-12);
    CHECK((actual_drift(sys, v2(1, 1)) - v2(-0.5, -0.5)).norm() <= 1e-10);
    CHECK(actual_drift(sys, v2(0, 0)).norm() <= 1e-10);
}

TEST_CASE("persisting_subset keeps the pieces that stay maximal") {
    auto sys = two_queue();
    auto origin = evaluate(sys, v2(0, 0));
    auto all = persisting_subset(sys, origin.active, Vec::Zero(2));
    CHECK(all.indices.size() == 3);

    auto diag = evaluate(sys, v2(1, 1));
    auto per = persisting_subset(sys, diag.active, v2(-0.5, -0.5));
    CHECK(per.indices == std::vector<int>{0, 1});

    // max{x1, 0} on the x2-axis: both pieces persist along the zero drift.
    PwlPotential flat(2, {{v2(-1, 0), 0.0}, {Vec::Zero(2), 0.0}});
    auto e = evaluate(flat, v2(0, 5));
    CHECK(e.active.indices.size() == 2);
    Vec xi = actual_drift(flat, v2(0, 5));
    CHECK(xi.norm() <= 1e-10);
    CHECK(persisting_subset(flat, e.active, xi).indices.size() == 2);
}

TEST_CASE("two-queue trajectory matches the worked breakpoints") {
    auto sys = two_queue();
    Trajectory traj = integrate_unperturbed(sys, v2(2, 1), 5.0);
    traj.check_consistency();
    REQUIRE(traj.times.size() == 3);
    CHECK(traj.times[0] == 0.0);
    CHECK(traj.times[1] == doctest::Approx(1.0));
    CHECK(traj.times[2] == doctest::Approx(3.0));
    CHECK((traj.states[1] - v2(1, 1)).norm() <= 1e-10);
    CHECK(traj.states[2].norm() <= 1e-10);
    CHECK((traj.drifts[0] - v2(-1, 0)).norm() <= 1e-12);
    CHECK((traj.drifts[1] - v2(-0.5, -0.5)).norm() <= 1e-10);
    CHECK(traj.flag == TerminalFlag::equilibrium);

    double gap = oracle::euler_gap(sys, v2(2, 1), traj, 5.0, 1e-5);
    CHECK(gap <= 1e-3);
}

TEST_CASE("single-piece trajectory is a straight line") {
    auto sys = fixtures::single_piece(v2(0.5, -0.25), v2(0.1, 0.1));
    Trajectory traj = integrate_unperturbed(sys, v2(1, 2), 4.0);
    CHECK(traj.flag == TerminalFlag::horizon_capped);
    CHECK(traj.segment_count() == 1);
    CHECK((traj.states.back() - (v2(1, 2) + 4.0 * v2(0.6, -0.15))).norm() <= 1e-12);
}

TEST_CASE("field-shifted two-queue trajectory agrees with the step oracle") {
    auto sys = two_queue(v2(0.3, 0.3));
    Trajectory traj = integrate_unperturbed(sys, v2(1, 0), 5.0);
    traj.check_consistency();
    // Events fixed by the explicit-Euler oracle: diagonal hit, then rest.
    double gap = oracle::euler_gap(sys, v2(1, 0), traj, 5.0, 1e-5);
    CHECK(gap <= 1e-3);
    REQUIRE(traj.times.size() >= 3);
    CHECK(traj.times[1] == doctest::Approx(1.0));
    CHECK((traj.states[1] - v2(0.3, 0.3)).norm() <= 1e-9);
    CHECK((traj.drifts[0] - v2(-0.7, 0.3)).norm() <= 1e-12);
    CHECK(traj.times[2] == doctest::Approx(2.5));
    CHECK(traj.states[2].norm() <= 1e-9);
    CHECK(traj.flag == TerminalFlag::equilibrium);
}

TEST_CASE("sliding along a boundary under a field keeps the drift consistent") {
    // Under lambda = (0.3, 0.3), starting on the x1 = 0 edge below the origin,
    // the trajectory climbs the boundary instead of chattering.
    auto sys = two_queue(v2(0.3, 0.3));
    Trajectory traj = integrate_unperturbed(sys, v2(0, -0.5), 4.0);
    double gap = oracle::euler_gap(sys, v2(0, -0.5), traj, 4.0, 1e-5);
    CHECK(gap <= 1e-3);
    CHECK((traj.drifts[0] - v2(0, 0.3)).norm() <= 1e-9);
}

TEST_CASE("drift norms decrease strictly and the segment cap holds") {
    CounterRng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 1 + rng.next_int(3);
        int m = 2 + rng.next_int(5);
        PwlPotential sys = random_system(rng, n, m);
        Vec x0(n);
        for (int k = 0; k < n; ++k) x0(k) = rng.uniform(-4.0, 4.0);
        Trajectory traj = integrate_unperturbed(sys, x0, 50.0);
        traj.check_consistency();
        CHECK(traj.segment_count() <= (1u << sys.piece_count()) - 1);
        for (std::size_t k = 0; k + 1 < traj.drifts.size(); ++k)
            CHECK(traj.drifts[k + 1].norm() < traj.drifts[k].norm() - 1e-10);
    }
}

TEST_CASE("straight-line motion from a critical point within its basin") {
    // One-dimensional potential with drifts {1, 2}: 0 is critical, xi = 1.
    auto sys = fixtures::one_dim({{1, 0}, {2, 0}});
    Trajectory traj = integrate_unperturbed(sys, v1(0), 3.0);
    CHECK(traj.drifts.size() >= 1);
    CHECK(traj.drifts[0](0) == doctest::Approx(1.0));
    // z(t) = p + t*xi along the first stretch.
    CHECK((traj.at(0.25) - v1(0.25)).norm() <= 1e-12);
}

TEST_CASE("trajectories from critical points stay straight for the basin stretch") {
    CounterRng rng(404);
    int checked = 0;
    for (int trial = 0; trial < 80 && checked < 20; ++trial) {
        int n = 1 + rng.next_int(3);
        PwlPotential sys = random_system(rng, n, 2 + rng.next_int(5));
        PointList critical = find_critical_points(sys);
        double cnc = compute_cnc(sys, critical);
        for (const Vec& p : critical) {
            Vec xi = actual_drift(sys, p);
            if (xi.norm() <= 1e-10 || std::isinf(cnc)) continue;
            double stretch = cnc / xi.norm();
            Trajectory traj = integrate_unperturbed(sys, p, stretch + 1.0);
            for (double f : {0.25, 0.6, 0.99}) {
                double t = f * stretch;
                CHECK((traj.at(t) - (p + t * xi)).norm() <= 1e-9 * (1.0 + p.norm()));
            }
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("drift selection is a monotone map") {
    CounterRng rng(55);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + rng.next_int(3);
        PwlPotential sys = random_system(rng, n, 2 + rng.next_int(5));
        for (int pair = 0; pair < 25; ++pair) {
            Vec x1(n), x2(n);
            for (int k = 0; k < n; ++k) {
                x1(k) = rng.uniform(-4.0, 4.0);
                x2(k) = rng.uniform(-4.0, 4.0);
            }
            Vec v1d = actual_drift(sys, x1);
            Vec v2d = actual_drift(sys, x2);
            CHECK((v1d - v2d).dot(x1 - x2) <= 1e-9);
        }
    }
}
