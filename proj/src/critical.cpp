#include "fpcs/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpcs/integrate.hpp"
#include "fpcs/rng.hpp"

namespace fpcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_critical_point(const PwlPotential& sys, const Vec& p) {
    Evaluation ev = evaluate(sys, p);
    return affine_rank(ev.active.drifts) == sys.dim();
}

Vec plain_drift(const PwlPotential& sys, const Vec& p) {
    Evaluation ev = evaluate(sys, p);
    return min_norm_point(ev.active.drifts).point;
}

// Subsets of {0..m-1} of size k with a callback, reused for gamma bounds.
template <typename F>
void for_each_subset(int m, int k, F&& f) {
    if (k > m || k <= 0) return;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

// Halfspace system whose intersection is the common-value point of the drift
// subset: for every ordered pair (i, j), (mu_i - mu_j)' x <= b_i - b_j.
Polyhedron pairwise_halfspaces(const PwlPotential& sys, const std::vector<int>& subset) {
    const Eigen::Index n = sys.dim();
    const int k = static_cast<int>(subset.size());
    Mat a(k * (k - 1), n);
    Vec c(k * (k - 1));
    Eigen::Index row = 0;
    for (int i : subset) {
        for (int j : subset) {
            if (i == j) continue;
            a.row(row) = (sys.pieces()[static_cast<std::size_t>(i)].drift -
                          sys.pieces()[static_cast<std::size_t>(j)].drift)
                             .transpose();
            c(row) = sys.pieces()[static_cast<std::size_t>(i)].offset -
                     sys.pieces()[static_cast<std::size_t>(j)].offset;
            ++row;
        }
    }
    return Polyhedron(std::move(a), std::move(c));
}

std::vector<std::vector<int>> spanning_subsets(const PwlPotential& sys) {
    const Eigen::Index n = sys.dim();
    const int m = sys.piece_count();
    std::vector<std::vector<int>> out;
    for_each_subset(m, static_cast<int>(n) + 1, [&](const std::vector<int>& idx) {
        PointList drifts;
        for (int i : idx) drifts.push_back(sys.pieces()[static_cast<std::size_t>(i)].drift);
        if (affine_rank(drifts) == n) out.push_back(idx);
    });
    return out;
}

}  // namespace

PointList find_critical_points(const PwlPotential& sys) {
    PointList critical;
    if (sys.dim() == 0) return critical;
    for (int i = 0; i < sys.piece_count(); ++i) {
        PointList vertices = enumerate_vertices(sys.region(i));
        for (const Vec& v : vertices) {
            if (!is_critical_point(sys, v)) continue;
            bool dup = false;
            for (const Vec& u : critical)
                if ((u - v).norm() <= 1e-8 * (1.0 + v.norm())) {
                    dup = true;
                    break;
                }
            if (!dup) critical.push_back(v);
        }
    }
    return critical;
}

double compute_cnc(const PwlPotential& sys, const PointList& critical) {
    double best = kInf;
    for (const Vec& p : critical) {
        for (int i = 0; i < sys.piece_count(); ++i) {
            double d = distance_to_polyhedron(sys.region(i), p);
            if (std::isinf(d)) continue;  // empty region
            if (d <= 1e-9 * (1.0 + p.norm())) continue;  // p belongs to the region
            best = std::min(best, d);
        }
    }
    return 0.5 * best;
}

double critical_diameter(const PointList& critical) {
    double best = 0.0;
    for (std::size_t i = 0; i < critical.size(); ++i)
        for (std::size_t j = i + 1; j < critical.size(); ++j)
            best = std::max(best, (critical[i] - critical[j]).norm());
    return best;
}

std::vector<int> drift_neighborhood_indices(const PwlPotential& sys, const Vec& x, double r) {
    if (r < 0) throw BadParams("drift_neighborhood: radius must be >= 0");
    std::vector<int> out;
    const double tol = 1e-9 * (1.0 + x.norm() + r);
    for (int i = 0; i < sys.piece_count(); ++i) {
        double d = distance_to_polyhedron(sys.region(i), x);
        if (d <= r + tol) out.push_back(i);
    }
    return out;
}

PointList drift_neighborhood(const PwlPotential& sys, const Vec& x, double r) {
    PointList out;
    for (int i : drift_neighborhood_indices(sys, x, r))
        out.push_back(sys.pieces()[static_cast<std::size_t>(i)].drift);
    return out;
}

bool is_low_dimensional(const PointList& s, Eigen::Index dim) {
    if (s.empty()) throw BadParams("is_low_dimensional: empty set");
    return affine_rank(s) < dim;
}

bool verify_basin(const PwlPotential& sys, const Vec& p, double rho) {
    if (!(rho > 0)) throw BadParams("verify_basin: rho must be positive");
    if (!is_critical_point(sys, p)) throw NotCritical("verify_basin: point fails the rank test");
    Vec xi = plain_drift(sys, p);
    PointList drifts;
    if (std::isinf(rho)) {
        for (const Piece& piece : sys.pieces()) drifts.push_back(piece.drift);
    } else {
        drifts = drift_neighborhood(sys, p, rho);
    }
    const double need = xi.squaredNorm();
    const double tol = 1e-9 * (1.0 + need);
    for (const Vec& y : drifts)
        if (xi.dot(y) < need - tol) return false;
    return true;
}

double compute_gamma_bound(const PwlPotential& sys, const PointList& critical) {
    (void)critical;
    double bound = 1.0;
    for (const auto& subset : spanning_subsets(sys))
        bound = std::max(bound, hoffman_constant(pairwise_halfspaces(sys, subset)));
    return bound;
}

GammaEstimate estimate_gamma(const PwlPotential& sys, const PointList& critical, int samples,
                             std::uint64_t seed) {
    if (samples < 1) throw BadParams("estimate_gamma: samples must be >= 1");
    GammaEstimate est;
    auto subsets = spanning_subsets(sys);
    if (subsets.empty() || critical.empty()) {
        // No full-dimensional drift subset or no critical points: the sampled
        // ratio is undefined; report the neutral pair.
        if (!subsets.empty()) est.bound = compute_gamma_bound(sys, critical);
        return est;
    }
    est.bound = compute_gamma_bound(sys, critical);

    // Region polyhedra cached; r(x) = min over spanning subsets of the
    // largest region distance within the subset.
    std::vector<Polyhedron> regions;
    for (int i = 0; i < sys.piece_count(); ++i) regions.push_back(sys.region(i));

    double scale = 1.0;
    for (const Vec& p : critical) scale = std::max(scale, p.norm());
    for (const Piece& piece : sys.pieces()) scale = std::max(scale, piece.drift.norm());

    CounterRng rng(seed, 0x9a);
    const Eigen::Index n = sys.dim();
    for (int s = 0; s < samples; ++s) {
        const Vec& anchor = critical[static_cast<std::size_t>(s) % critical.size()];
        Vec dir(n);
        for (Eigen::Index i = 0; i < n; ++i) dir(i) = rng.next_normal();
        double norm = dir.norm();
        if (norm < 1e-12) continue;
        dir /= norm;
        double radius = scale * std::pow(10.0, rng.uniform(-2.0, 0.5));
        Vec x = anchor + radius * dir;

        double dist_c = kInf;
        for (const Vec& p : critical) dist_c = std::min(dist_c, (x - p).norm());
        if (dist_c < 1e-9) continue;

        double rx = kInf;
        for (const auto& subset : subsets) {
            double worst = 0.0;
            for (int i : subset) {
                double d = distance_to_polyhedron(regions[static_cast<std::size_t>(i)], x);
                worst = std::max(worst, d);
                if (worst >= rx) break;
            }
            rx = std::min(rx, worst);
        }
        if (!(rx > 1e-12) || std::isinf(rx)) continue;
        est.empirical = std::max(est.empirical, dist_c / rx);
    }
    return est;
}

namespace {

// First time in [lo, hi] at which |w + t v|^2 <= rr, or +inf.
double first_time_inside(const Vec& w, const Vec& v, double lo, double hi, double rr) {
    double a = v.squaredNorm();
    double b = 2.0 * w.dot(v);
    double c = w.squaredNorm() - rr;
    if (a <= 1e-300) return (c <= 0.0) ? lo : kInf;
    double disc = b * b - 4 * a * c;
    if (disc < 0) return kInf;
    double root = std::sqrt(disc);
    double t1 = (-b - root) / (2 * a);
    double t2 = (-b + root) / (2 * a);
    double entry = std::max(lo, t1);
    if (entry <= hi && entry <= t2) return entry;
    return kInf;
}

// First time in [lo, hi] at which |w + t v|^2 > rr, or +inf.
double first_time_outside(const Vec& w, const Vec& v, double lo, double hi, double rr) {
    double a = v.squaredNorm();
    double b = 2.0 * w.dot(v);
    double c = w.squaredNorm() - rr;
    auto value = [&](double t) { return (a * t + b) * t + c; };
    if (value(lo) > 0) return lo;
    if (a <= 1e-300) return kInf;
    double disc = b * b - 4 * a * c;
    if (disc < 0) return kInf;  // cannot happen when value(lo) <= 0
    double t2 = (-b + std::sqrt(disc)) / (2 * a);
    if (t2 < hi) return std::max(t2, lo);
    return kInf;
}

}  // namespace

bool no_revisit_check(const PwlPotential& sys, const Vec& p, double rho, const Vec& x0,
                      double horizon) {
    if (!(rho > 0)) throw BadParams("no_revisit_check: rho must be positive");
    if (!is_critical_point(sys, p)) return true;  // vacuous: precondition unmet
    if (std::isinf(rho)) return true;             // nothing lies beyond an infinite radius

    Trajectory traj = integrate_unperturbed(sys, x0, horizon);
    const double inner = rho / 3.0;
    const double slack = 1e-9 * (1.0 + rho);

    int stage = 0;  // 0: before entry, 1: inside, 2: escaped
    for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
        double len = traj.times[k + 1] - traj.times[k];
        if (len <= 0) continue;
        Vec w = traj.states[k] - p;
        const Vec& v = traj.drifts[k];
        double cursor = 0.0;
        while (cursor <= len) {
            if (stage == 0) {
                double t = first_time_inside(w, v, cursor, len, inner * inner);
                if (std::isinf(t)) break;
                stage = 1;
                cursor = t;
            } else if (stage == 1) {
                double t = first_time_outside(w, v, cursor, len, rho * rho);
                if (std::isinf(t)) break;
                stage = 2;
                cursor = t;
            } else {
                double t = first_time_inside(w, v, cursor, len, (inner - slack) * (inner - slack));
                if (!std::isinf(t)) return false;  // came back close: violation
                break;
            }
        }
    }
    // Equilibrium tail: the final state persists beyond the last breakpoint.
    if (stage == 2 && !traj.states.empty() &&
        (traj.states.back() - p).norm() <= inner - slack)
        return false;
    return true;
}

CriticalAnalysis analyze_system(const PwlPotential& sys, int gamma_samples, std::uint64_t seed) {
    CriticalAnalysis out;
    out.critical_points = find_critical_points(sys);
    out.cnc = compute_cnc(sys, out.critical_points);
    out.diameter = critical_diameter(out.critical_points);
    GammaEstimate gamma = estimate_gamma(sys, out.critical_points, gamma_samples, seed);
    out.gamma_bound = gamma.bound;
    out.gamma_empirical = gamma.empirical;
    for (const Vec& p : out.critical_points) {
        BasinCertificate cert;
        cert.point = p;
        cert.radius = out.cnc;
        cert.verified = verify_basin(sys, p, out.cnc);
        out.basins.push_back(std::move(cert));
    }
    return out;
}

}  // namespace fpcs
