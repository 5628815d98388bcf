#include "fpcs/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "fpcs/critical.hpp"

namespace fpcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ProjectedSystem project_subsystem(const PwlPotential& sys, const std::vector<int>& subset) {
    if (subset.empty()) throw BadParams("project_subsystem: empty subset");
    const Eigen::Index n = sys.dim();
    if (n < 1) throw BadParams("project_subsystem: parent must have dimension >= 1");
    PointList drifts;
    for (int i : subset) {
        if (i < 0 || i >= sys.piece_count()) throw BadParams("project_subsystem: bad piece index");
        drifts.push_back(sys.pieces()[static_cast<std::size_t>(i)].drift);
    }
    if (!is_low_dimensional(drifts, n))
        throw NotLowDimensional("project_subsystem: subset spans the whole space");

    Mat diffs = difference_matrix(drifts);
    Mat span = orthonormal_span(diffs);
    // w: projection of the origin onto the affine hull mu_0 + span.
    Vec w = drifts[0] - span * (span.transpose() * drifts[0]);

    double scale = 1.0;
    for (const Vec& mu : drifts) scale = std::max(scale, mu.norm());

    Mat basis;
    if (w.norm() > 1e-12 * scale) {
        Mat avoid = w / w.norm();
        basis = orthonormal_completion(span, avoid, n - 1);
    } else {
        w = Vec::Zero(n);
        basis = orthonormal_completion(span, Mat(n, 0), n - 1);
    }

    // Invariants of the decomposition.
    for (const Vec& mu : drifts) {
        if (std::abs(w.dot(mu - drifts[0])) > 1e-9 * scale * (1.0 + w.norm()))
            throw DriftInconsistency("project_subsystem: w not orthogonal to drift differences");
        Vec rel = mu - w;
        if ((rel - basis * (basis.transpose() * rel)).norm() > 1e-9 * (1.0 + scale))
            throw DriftInconsistency("project_subsystem: drift leaves the subspace");
    }

    std::vector<Piece> child_pieces;
    for (std::size_t k = 0; k < drifts.size(); ++k) {
        child_pieces.push_back(Piece{basis.transpose() * (drifts[k] - w),
                                     sys.pieces()[static_cast<std::size_t>(subset[k])].offset});
    }
    PwlPotential child(n - 1, std::move(child_pieces), Vec::Zero(n - 1), sys.active_tol());
    return ProjectedSystem{subset, std::move(w), std::move(basis), std::move(child)};
}

namespace {

std::string canonical_key(const PwlPotential& sys) {
    std::vector<std::string> rows;
    char buf[64];
    for (const Piece& p : sys.pieces()) {
        std::string row;
        for (Eigen::Index i = 0; i < p.drift.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.9e,", p.drift(i));
            row += buf;
        }
        std::snprintf(buf, sizeof(buf), "|%.9e", p.offset);
        row += buf;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    std::string key = std::to_string(sys.dim()) + "#";
    for (const std::string& r : rows) key += r + ";";
    return key;
}

struct Ctx {
    std::optional<double> gamma_override;
    std::map<std::string, std::shared_ptr<const ConstantsReport>> memo;
    long budget = 100000;
};

std::shared_ptr<const ConstantsReport> compute_rec(const PwlPotential& sys, Ctx& ctx) {
    if (--ctx.budget < 0) throw ScaleLimit("compute_constants: subset budget exhausted");

    auto report = std::make_shared<ConstantsReport>();
    report->dim = static_cast<int>(sys.dim());
    report->piece_count = sys.piece_count();

    if (sys.dim() == 0) {
        report->kind = "dimension0";
        report->kappa = 0.0;
        return report;
    }
    if (sys.piece_count() == 1) {
        // Constant drift: the deviation equals the perturbation exactly.
        report->kind = "constant";
        report->kappa = 1.0;
        return report;
    }
    if (sys.dim() == 1) {
        report->kind = "one_dimensional";
        report->kappa = 1.0;
        return report;
    }

    const int n = static_cast<int>(sys.dim());
    const int m = sys.piece_count();
    if (n > 3 || m > 12)
        throw ScaleLimit("compute_constants: system beyond desk scale (n <= 3, m <= 12)");

    report->kind = "recursive";

    // sigma = 4 + max child kappa over low-dimensional drift subsets.
    double max_child_kappa = 0.0;
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> subset;
        PointList drifts;
        for (int i = 0; i < m; ++i) {
            if (mask & (1u << i)) {
                subset.push_back(i);
                drifts.push_back(sys.pieces()[static_cast<std::size_t>(i)].drift);
            }
        }
        if (affine_rank(drifts) >= n) continue;
        ProjectedSystem projected = project_subsystem(sys, subset);
        std::string key = canonical_key(projected.child);
        std::shared_ptr<const ConstantsReport> child_report;
        auto it = ctx.memo.find(key);
        if (it != ctx.memo.end()) {
            child_report = it->second;
        } else {
            child_report = compute_rec(projected.child, ctx);
            ctx.memo.emplace(std::move(key), child_report);
        }
        max_child_kappa = std::max(max_child_kappa, child_report->kappa);
        report->children.push_back(ConstantsReport::Child{subset, child_report->kappa, child_report});
    }
    report->sigma = 4.0 + max_child_kappa;
    report->eta = m * std::pow(2.0, m + 1) * report->sigma;

    PointList critical = find_critical_points(sys);
    report->critical_count = static_cast<int>(critical.size());
    report->diameter = critical_diameter(critical);
    report->gamma_min = compute_cnc(sys, critical);

    if (critical.empty()) {
        // Trajectories never approach a critical point; the far-field bound
        // applies globally.
        report->gamma = ctx.gamma_override.value_or(1.0);
        report->gamma_provenance = ctx.gamma_override ? "override" : "n/a";
        report->theta_star = 0.0;
        report->kappa = report->eta;
        return report;
    }

    if (ctx.gamma_override) {
        report->gamma = *ctx.gamma_override;
        report->gamma_provenance = "override";
    } else {
        report->gamma = compute_gamma_bound(sys, critical);
        report->gamma_provenance = "bound";
    }
    const double m2 = static_cast<double>(report->critical_count) + 2.0;
    const double g1 = report->gamma + 1.0;

    if (std::isinf(report->gamma_min)) {
        if (report->diameter == 0.0) {
            // Every region contains the single critical point: threshold
            // collapses and the whole space is its basin.
            report->theta_star = 0.0;
            report->kappa = 4.0 * g1 * report->eta + 1.0;
        } else {
            report->theta_star = kInf;
            report->kappa = 5.0 * m2 * g1 * report->eta;
        }
        return report;
    }

    report->theta_star = report->gamma_min / (40.0 * m2 * g1 * report->eta);
    report->kappa = 4.0 * report->diameter / report->theta_star + 5.0 * m2 * g1 * report->eta;
    return report;
}

}  // namespace

ConstantsReport compute_constants(const PwlPotential& sys, std::optional<double> gamma_override) {
    if (gamma_override && !(*gamma_override >= 1.0))
        throw BadParams("compute_constants: gamma override must be >= 1");
    Ctx ctx;
    ctx.gamma_override = gamma_override;
    // The field never enters the constants: regions, critical points and all
    // derived quantities agree between F and F + lambda.
    return *compute_rec(sys.has_field() ? PwlPotential(sys.dim(), sys.pieces(), Vec::Zero(sys.dim()),
                                                       sys.active_tol())
                                        : sys,
                        ctx);
}

namespace {

std::vector<std::pair<double, Vec>> adversarial_jumps(Eigen::Index dim, double theta,
                                                      double horizon, double spacing) {
    // U(t) hops between unit directions scaled by theta: axis sweeps with
    // alternating signs, then the all-ones diagonal. sup |U| == theta.
    std::vector<Vec> targets;
    for (Eigen::Index a = 0; a < dim; ++a) {
        Vec u = Vec::Zero(dim);
        u(a) = 1.0;
        targets.push_back(u);
        targets.push_back(-u);
    }
    targets.push_back(Vec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
    targets.push_back(-targets.back());

    std::vector<std::pair<double, Vec>> jumps;
    Vec current = Vec::Zero(dim);
    std::size_t k = 0;
    for (double t = 0.0; t <= horizon; t += spacing) {
        Vec next = theta * targets[k % targets.size()];
        jumps.emplace_back(t, next - current);
        current = next;
        ++k;
    }
    return jumps;
}

}  // namespace

CertifyResult certify_kappa(const PwlPotential& sys, const ConstantsReport& report,
                            const CertifySettings& settings) {
    CertifyResult result;
    Vec x0 = Vec::Zero(sys.dim());
    Vec shift = settings.field_shift;
    if (shift.size() == 0) shift = Vec::Constant(sys.dim(), 0.3);

    std::vector<PwlPotential> variants{sys};
    if (settings.include_field_shift) variants.push_back(sys.with_field(sys.external_field() + shift));

    std::uint64_t family_index = 0;
    for (const PwlPotential& variant : variants) {
        for (double theta : settings.thetas) {
            std::vector<PathSpec> specs;
            PathSpec square;
            square.kind = PathKind::square_wave;
            square.dim = sys.dim();
            square.amplitude = theta;
            square.period = settings.horizon / 8.0;
            square.horizon = settings.horizon;
            specs.push_back(square);

            PathSpec steps;
            steps.kind = PathKind::bernoulli_steps;
            steps.dim = sys.dim();
            steps.amplitude = theta;
            steps.count = static_cast<int>(std::min(settings.horizon, 1000.0));
            steps.spacing = settings.horizon / steps.count;
            specs.push_back(steps);

            PathSpec adversarial;
            adversarial.kind = PathKind::deterministic;
            adversarial.dim = sys.dim();
            adversarial.jumps = adversarial_jumps(sys.dim(), theta, settings.horizon,
                                                  settings.horizon / 16.0);
            specs.push_back(adversarial);

            for (const PathSpec& spec : specs) {
                int runs = spec.kind == PathKind::bernoulli_steps ? settings.runs_per_family : 1;
                SweepSummary summary =
                    sensitivity_sweep(variant, x0, spec, runs, settings.horizon,
                                      settings.seed + family_index, settings.jobs);
                ++family_index;
                result.total_runs += summary.runs;
                if (summary.ratio_defined)
                    result.max_ratio = std::max(result.max_ratio, summary.max_ratio);
            }
        }
    }
    result.ok = result.max_ratio <= report.kappa * (1.0 + 1e-9);
    return result;
}

}  // namespace fpcs
