#include <doctest.h>

#include <cmath>

#include "fpcs/constants.hpp"
#include "fpcs/critical.hpp"
#include "fpcs/rng.hpp"
#include "fpcs/verify.hpp"
#include "support/fixtures.hpp"

using namespace fpcs;
using fixtures::two_queue;
using fixtures::v1;
using fixtures::v2;

TEST_CASE("subsystem projection for the two-queue drift pairs") {
    auto sys = two_queue();

    // {mu1, mu3}: affine hull is the x-axis, w = 0, child = max{y, 0}.
    auto p13 = project_subsystem(sys, {0, 2});
    CHECK(p13.translation.norm() <= 1e-12);
    CHECK((p13.basis - (Mat(2, 1) << 1, 0).finished()).norm() <= 1e-12);
    REQUIRE(p13.child.dim() == 1);
    REQUIRE(p13.child.piece_count() == 2);
    CHECK(p13.child.pieces()[0].drift(0) == doctest::Approx(-1.0));
    CHECK(p13.child.pieces()[1].drift(0) == doctest::Approx(0.0));

    // {mu1, mu2}: w = (-1/2, -1/2), direction (1,-1)/sqrt(2), drifts +-1/sqrt(2).
    auto p12 = project_subsystem(sys, {0, 1});
    CHECK((p12.translation - v2(-0.5, -0.5)).norm() <= 1e-12);
    CHECK(std::abs(p12.basis(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(p12.basis(0, 0) == doctest::Approx(-p12.basis(1, 0)));
    REQUIRE(p12.child.piece_count() == 2);
    CHECK(std::abs(p12.child.pieces()[0].drift(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(p12.child.pieces()[0].drift(0) == doctest::Approx(-p12.child.pieces()[1].drift(0)));

    // Singleton: w equals the drift and the child is the zero system.
    auto p2 = project_subsystem(sys, {1});
    CHECK((p2.translation - v2(0, -1)).norm() <= 1e-12);
    CHECK(p2.child.piece_count() == 1);
    CHECK(p2.child.pieces()[0].drift.norm() <= 1e-12);

    CHECK_THROWS_AS(project_subsystem(sys, {0, 1, 2}), NotLowDimensional);
    CHECK_THROWS_AS(project_subsystem(sys, {}), BadParams);
}

TEST_CASE("worked constants for the two-queue system") {
    auto report = compute_constants(two_queue(), 1.0);
    CHECK(report.kind == "recursive");
    CHECK(report.critical_count == 1);
    CHECK(report.diameter == 0.0);
    CHECK(std::isinf(report.gamma_min));
    CHECK(report.gamma == 1.0);
    CHECK(report.gamma_provenance == "override");
    CHECK(report.sigma == 5.0);
    CHECK(report.eta == 240.0);
    CHECK(report.theta_star == 0.0);
    CHECK(report.kappa == 1921.0);
    // All six low-dimensional subsets appear as children with kappa = 1.
    CHECK(report.children.size() == 6);
    for (const auto& child : report.children) CHECK(child.kappa == 1.0);
}

TEST_CASE("constants base cases") {
    auto single = fixtures::single_piece(v2(2, -1), Vec::Zero(2));
    auto r1 = compute_constants(single);
    CHECK(r1.kind == "constant");
    CHECK(r1.kappa == 1.0);

    auto line = fixtures::one_dim({{-1, 0}, {1, 0}});
    auto r2 = compute_constants(line);
    CHECK(r2.kind == "one_dimensional");
    CHECK(r2.kappa == 1.0);

    PwlPotential point(0, {Piece{Vec(0), 3.0}});
    auto r0 = compute_constants(point);
    CHECK(r0.kind == "dimension0");
    CHECK(r0.kappa == 0.0);
}

TEST_CASE("eta is at least 16 whenever a critical point exists") {
    CounterRng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 1 + rng.next_int(2);
        PwlPotential sys = random_system(rng, n + 1, 2 + rng.next_int(4));
        auto report = compute_constants(sys);
        if (report.kind != "recursive" || report.critical_count == 0) continue;
        CHECK(report.eta >= 16.0);
        CHECK(report.kappa > 0.0);
        CHECK(std::isfinite(report.kappa));
    }
}

TEST_CASE("constants are field-invariant and deterministic") {
    auto sys = two_queue();
    auto r1 = compute_constants(sys, 1.0);
    auto r2 = compute_constants(sys.with_field(v2(0.3, 0.3)), 1.0);
    CHECK(r1.kappa == r2.kappa);
    CHECK(r1.sigma == r2.sigma);
    CHECK(r1.eta == r2.eta);
    auto r3 = compute_constants(sys, 1.0);
    CHECK(r1.kappa == r3.kappa);
    CHECK(r1.children.size() == r3.children.size());
}

TEST_CASE("scale guard") {
    CounterRng rng(3);
    PwlPotential big = random_system(rng, 3, 13);
    CHECK_THROWS_AS(compute_constants(big), ScaleLimit);
}

TEST_CASE("drift decomposition residuals stay within tolerance") {
    CounterRng rng(23);
    auto plain_drift = [](const PwlPotential& s, const Vec& x) {
        Evaluation ev = evaluate(s, x);
        return min_norm_point(ev.active.drifts).point;
    };
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + rng.next_int(2);
        PwlPotential sys = random_system(rng, n, 2 + rng.next_int(4));
        for (unsigned mask = 1; mask < (1u << sys.piece_count()); ++mask) {
            std::vector<int> subset;
            PointList drifts;
            for (int i = 0; i < sys.piece_count(); ++i)
                if (mask & (1u << i)) {
                    subset.push_back(i);
                    drifts.push_back(sys.pieces()[static_cast<std::size_t>(i)].drift);
                }
            if (affine_rank(drifts) >= n) continue;
            auto projected = project_subsystem(sys, subset);
            for (int probe = 0; probe < 6; ++probe) {
                Vec x(n);
                for (int k = 0; k < n; ++k) x(k) = rng.uniform(-3.0, 3.0);
                Evaluation ev = evaluate(sys, x);
                bool inside = true;
                for (int idx : ev.active.indices)
                    if (std::find(subset.begin(), subset.end(), idx) == subset.end())
                        inside = false;
                if (!inside) continue;
                Vec parent = plain_drift(sys, x);
                Vec lifted = projected.translation +
                             projected.basis *
                                 plain_drift(projected.child, projected.basis.transpose() * x);
                CHECK((parent - lifted).norm() <= 1e-9);
                ++checked;
            }
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("kappa certification on small systems") {
    auto sys = two_queue();
    auto report = compute_constants(sys, 1.0);
    CertifySettings settings;
    settings.runs_per_family = 5;
    settings.horizon = 20.0;
    settings.thetas = {0.1, 1.0};
    auto result = certify_kappa(sys, report, settings);
    CHECK(result.ok);
    CHECK(result.max_ratio <= report.kappa);
    CHECK(result.total_runs > 0);

    auto single = fixtures::single_piece(v2(-1, 0), Vec::Zero(2));
    auto rs = compute_constants(single);
    CertifySettings tight;
    tight.runs_per_family = 3;
    tight.horizon = 10.0;
    tight.thetas = {0.5};
    auto rr = certify_kappa(single, rs, tight);
    CHECK(rr.ok);
    CHECK(rr.max_ratio == doctest::Approx(1.0));

    // One-dimensional systems: the base constant 1 is optimistic once an
    // equilibrium can trap the perturbed state (a +theta/-theta swing parks it
    // at distance 2*theta), so the observed ratio lands in [1, 2].
    CounterRng rng(77);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        PwlPotential line = random_system(rng, 1, 2 + rng.next_int(4));
        auto lr = compute_constants(line);
        CertifySettings quick;
        quick.runs_per_family = 3;
        quick.horizon = 10.0;
        quick.thetas = {0.3};
        quick.include_field_shift = true;
        auto res = certify_kappa(line, lr, quick);
        worst = std::max(worst, res.max_ratio);
        CHECK(res.max_ratio <= 2.0 + 1e-9);
    }
    CHECK(worst > 0.0);
}
