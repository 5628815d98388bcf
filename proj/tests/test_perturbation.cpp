#include <doctest.h>

#include <cmath>

#include "fpcs/perturbation.hpp"
#include "fpcs/rng.hpp"
#include "fpcs/verify.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fpcs;
using fixtures::two_queue;
using fixtures::v2;

TEST_CASE("perturbation path merges simultaneous jumps and tracks sups") {
    PerturbationPath path(2, {{1.0, v2(0.5, 0)}, {1.0, v2(0, 0.5)}, {2.0, v2(-1, 0)}});
    CHECK(path.jump_count() == 2);
    CHECK((path.value(1.5) - v2(0.5, 0.5)).norm() <= 1e-15);
    CHECK((path.value(2.5) - v2(-0.5, 0.5)).norm() <= 1e-15);
    CHECK(path.value(0.5).norm() == 0.0);
    CHECK(path.sup_norm_up_to(1.5) == doctest::Approx(std::sqrt(0.5)));
    CHECK(path.cumulative_abs_up_to(10.0) == doctest::Approx(std::sqrt(0.5) + 1.0));
}

TEST_CASE("make_path families") {
    PathSpec det;
    det.kind = PathKind::deterministic;
    det.dim = 2;
    det.jumps = {{0.5, v2(0.1, 0)}};
    auto p1 = make_path(det, 0);
    CHECK(p1.jump_count() == 1);

    PathSpec bern;
    bern.kind = PathKind::bernoulli_steps;
    bern.dim = 2;
    bern.amplitude = 0.1;
    bern.count = 4;
    auto p2 = make_path(bern, 7);
    CHECK(p2.jump_count() == 4);
    CHECK(p2.sup_norm_up_to(100.0) <= 0.4 + 1e-15);
    auto p2b = make_path(bern, 7);
    CHECK(p2.value(4.0) == p2b.value(4.0));  // reproducible per seed

    PathSpec square;
    square.kind = PathKind::square_wave;
    square.dim = 2;
    square.amplitude = 0.1;
    square.period = 2.0;
    square.horizon = 10.0;
    auto p3 = make_path(square, 0);
    CHECK(p3.sup_norm_up_to(10.0) == doctest::Approx(0.1));
    // Alternating +-0.2 increments after the centering jump.
    for (std::size_t k = 1; k < p3.jump_count(); ++k)
        CHECK(p3.increments()[k].norm() == doctest::Approx(0.2));

    PathSpec wiener;
    wiener.kind = PathKind::discretized_wiener;
    wiener.dim = 2;
    wiener.volatility = 0.5;
    wiener.step = 0.01;
    wiener.horizon = 2.0;
    auto p4 = make_path(wiener, 19);
    CHECK(p4.jump_count() == 200);
    auto p4b = make_path(wiener, 19);
    CHECK((p4.value(2.0) - p4b.value(2.0)).norm() == 0.0);
    // Increment scale ~ volatility * sqrt(step).
    double mean_sq = 0.0;
    for (const Vec& du : p4.increments()) mean_sq += du.squaredNorm();
    mean_sq /= static_cast<double>(p4.jump_count());
    CHECK(mean_sq == doctest::Approx(2.0 * 0.25 * 0.01).epsilon(0.35));

    PathSpec bad;
    bad.kind = PathKind::square_wave;
    bad.dim = 2;
    bad.amplitude = -1.0;
    bad.period = 2.0;
    bad.horizon = 10.0;
    CHECK_THROWS_AS(make_path(bad, 0), BadParams);
}

TEST_CASE("zero perturbation reproduces the unperturbed trajectory bit for bit") {
    auto sys = two_queue();
    PerturbationPath zero(2, {});
    Trajectory pert = integrate_perturbed(sys, v2(2, 1), zero, 5.0);
    Trajectory base = integrate_unperturbed(sys, v2(2, 1), 5.0);
    REQUIRE(pert.times.size() == base.times.size());
    for (std::size_t k = 0; k < base.times.size(); ++k) {
        CHECK(pert.times[k] == base.times[k]);
        CHECK((pert.states[k] - base.states[k]).norm() == 0.0);
    }
    auto report = measure_deviation(base, pert, zero);
    CHECK(report.sup_deviation == 0.0);
    CHECK(std::isnan(report.ratio));
}

TEST_CASE("single-piece system: deviation equals the perturbation exactly") {
    auto sys = fixtures::single_piece(v2(-0.3, 0.7), v2(0.05, -0.2));
    PathSpec spec;
    spec.kind = PathKind::bernoulli_steps;
    spec.dim = 2;
    spec.amplitude = 0.25;
    spec.count = 12;
    spec.spacing = 0.7;
    auto path = make_path(spec, 3);
    Trajectory base = integrate_unperturbed(sys, v2(1, 1), 10.0);
    Trajectory pert = integrate_perturbed(sys, v2(1, 1), path, 10.0);
    auto report = measure_deviation(base, pert, path);
    CHECK(report.sup_deviation == doctest::Approx(report.sup_perturbation).epsilon(1e-12));
    CHECK(report.ratio == doctest::Approx(1.0));
    // Spot values: x~(t) - x(t) = U(t).
    for (double t : {0.3, 1.4, 5.0, 9.9})
        CHECK((pert.at(t) - base.at(t) - path.value(t)).norm() <= 1e-12);
}

TEST_CASE("two-queue jump example against the explicit-Euler oracle") {
    auto sys = two_queue();
    PerturbationPath path(2, {{0.5, v2(0.5, 0)}});
    Trajectory pert = integrate_perturbed(sys, v2(2, 1), path, 5.0);
    // Follows (-1,0) to (1.5,1), jumps to (2,1), resumes.
    CHECK((pert.at(0.49999999) - v2(1.5, 1)).norm() <= 1e-6);
    CHECK((pert.at(0.5) - v2(2, 1)).norm() <= 1e-12);
    CHECK((pert.left_limit(0.5) - v2(1.5, 1)).norm() <= 1e-12);
    double gap = oracle::euler_gap_perturbed(sys, v2(2, 1), {{0.5, v2(0.5, 0)}}, pert, 5.0, 1e-5);
    CHECK(gap <= 1e-3);
}

TEST_CASE("deviation at 0+ equals the initial jump") {
    auto sys = two_queue();
    PerturbationPath path(2, {{0.0, v2(0.3, -0.4)}});
    Trajectory base = integrate_unperturbed(sys, v2(2, 1), 3.0);
    Trajectory pert = integrate_perturbed(sys, v2(2, 1), path, 3.0);
    CHECK((pert.at(0.0) - v2(2.3, 0.6)).norm() <= 1e-12);
    auto report = measure_deviation(base, pert, path);
    REQUIRE(!report.deviation_samples.empty());
    CHECK(report.deviation_samples.front().second == doctest::Approx(0.5));
}

TEST_CASE("sup deviation never exceeds the cumulative jump mass") {
    CounterRng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + rng.next_int(3);
        PwlPotential sys = random_system(rng, n, 2 + rng.next_int(5));
        PathSpec spec;
        spec.kind = PathKind::bernoulli_steps;
        spec.dim = n;
        spec.amplitude = rng.uniform(0.05, 0.5);
        spec.count = 10 + rng.next_int(20);
        spec.spacing = 0.5;
        auto path = make_path(spec, rng.next_u64());
        Vec x0(n);
        for (int k = 0; k < n; ++k) x0(k) = rng.uniform(-2.0, 2.0);
        double horizon = spec.spacing * spec.count + 1.0;
        Trajectory base = integrate_unperturbed(sys, x0, horizon);
        Trajectory pert = integrate_perturbed(sys, x0, path, horizon);
        auto report = measure_deviation(base, pert, path);
        CHECK(report.sup_deviation <= report.cumulative_abs + 1e-9);
    }
}

TEST_CASE("sweep determinism and zero-perturbation flagging") {
    auto sys = two_queue();
    PathSpec spec;
    spec.kind = PathKind::bernoulli_steps;
    spec.dim = 2;
    spec.amplitude = 0.2;
    spec.count = 20;
    spec.spacing = 0.25;
    auto s1 = sensitivity_sweep(sys, v2(2, 1), spec, 8, 6.0, 99);
    auto s2 = sensitivity_sweep(sys, v2(2, 1), spec, 8, 6.0, 99);
    CHECK(s1.max_ratio == s2.max_ratio);
    CHECK(s1.max_sup_deviation == s2.max_sup_deviation);
    for (int r = 0; r < 8; ++r)
        CHECK(s1.per_run[static_cast<std::size_t>(r)].sup_deviation ==
              s2.per_run[static_cast<std::size_t>(r)].sup_deviation);
    // Parallel evaluation returns the same numbers in the same order.
    auto s3 = sensitivity_sweep(sys, v2(2, 1), spec, 8, 6.0, 99, 2);
    CHECK(s1.max_ratio == s3.max_ratio);
    for (int r = 0; r < 8; ++r)
        CHECK(s1.per_run[static_cast<std::size_t>(r)].sup_deviation ==
              s3.per_run[static_cast<std::size_t>(r)].sup_deviation);

    PathSpec zero;
    zero.kind = PathKind::deterministic;
    zero.dim = 2;
    auto sz = sensitivity_sweep(sys, v2(2, 1), zero, 1, 6.0, 1);
    CHECK(!sz.ratio_defined);
    CHECK(sz.max_ratio == 0.0);
    CHECK(sz.max_sup_deviation == 0.0);
}
