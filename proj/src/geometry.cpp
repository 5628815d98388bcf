#include "fpcs/geometry.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace fpcs {

Polyhedron::Polyhedron(Mat a, Vec c) : normals(std::move(a)), offsets(std::move(c)) {
    if (normals.rows() != offsets.size())
        throw DimensionMismatch("polyhedron: normals/offsets length mismatch");
}

double Polyhedron::max_violation(const Vec& x) const {
    if (count() == 0) return 0.0;
    require_dim(x, dim(), "polyhedron query point");
    return (normals * x - offsets).maxCoeff();
}

bool Polyhedron::contains(const Vec& x, double tol) const {
    return max_violation(x) <= tol * (1.0 + x.norm());
}

namespace {

// Visits all k-subsets of {0,...,m-1} in lexicographic order.
template <typename F>
void for_each_subset(int m, int k, F&& f) {
    if (k > m || k < 0) return;
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

Mat rows_of(const Mat& a, const std::vector<int>& idx) {
    Mat out(static_cast<Eigen::Index>(idx.size()), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = a.row(idx[i]);
    return out;
}

Vec entries_of(const Vec& c, const std::vector<int>& idx) {
    Vec out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = c(idx[i]);
    return out;
}

// Affine minimizer of ||sum_i alpha_i q_i|| subject to sum alpha = 1 over the
// columns of q, via the bordered Gram system.
Vec affine_minimizer_weights(const Mat& q) {
    const Eigen::Index k = q.cols();
    Mat sys(k + 1, k + 1);
    sys.topLeftCorner(k, k) = 2.0 * (q.transpose() * q);
    sys.topRightCorner(k, 1).setOnes();
    sys.bottomLeftCorner(1, k).setOnes();
    sys(k, k) = 0.0;
    Vec rhs = Vec::Zero(k + 1);
    rhs(k) = 1.0;
    Eigen::FullPivLU<Mat> lu(sys);
    Vec sol;
    if (lu.isInvertible()) {
        sol = lu.solve(rhs);
    } else {
        sol = sys.completeOrthogonalDecomposition().solve(rhs);
    }
    return sol.head(k);
}

}  // namespace

MinNormResult min_norm_point(const PointList& points, double tol) {
    if (points.empty()) throw BadParams("min_norm_point: empty point set");
    if (tol <= 0) throw BadParams("min_norm_point: tol must be positive");
    const Eigen::Index n = points[0].size();
    for (const Vec& p : points) {
        require_dim(p, n, "hull point");
        require_finite(p, "hull point");
    }
    const int m = static_cast<int>(points.size());

    if (n == 0) return MinNormResult{Vec(0), {0}, {1.0}, 0.0};

    // Corral state: indices into `points`, convex weights, current iterate.
    int start = 0;
    double best = points[0].squaredNorm();
    for (int i = 1; i < m; ++i) {
        double s = points[i].squaredNorm();
        if (s < best) {
            best = s;
            start = i;
        }
    }
    std::vector<int> corral{start};
    std::vector<double> weights{1.0};
    Vec x = points[start];

    const int max_iter = 200 + 20 * m;
    const double drop_eps = 1e-14;
    double gap = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iter; ++iter) {
        // Wolfe criterion: x'p >= x'x - tol for all p.
        int j = 0;
        double min_dot = x.dot(points[0]);
        for (int i = 1; i < m; ++i) {
            double d = x.dot(points[i]);
            if (d < min_dot) {
                min_dot = d;
                j = i;
            }
        }
        gap = x.squaredNorm() - min_dot;
        if (gap <= tol) {
            return MinNormResult{x, corral, weights, gap};
        }
        if (std::find(corral.begin(), corral.end(), j) == corral.end()) {
            corral.push_back(j);
            weights.push_back(0.0);
        }

        // Minor cycle: move to the affine minimizer of the corral, dropping
        // points whose weight would become non-positive.
        for (int minor = 0; minor <= m + 1; ++minor) {
            Mat q(n, static_cast<Eigen::Index>(corral.size()));
            for (std::size_t i = 0; i < corral.size(); ++i) q.col(static_cast<Eigen::Index>(i)) = points[corral[i]];
            Vec alpha = affine_minimizer_weights(q);
            if (alpha.minCoeff() > drop_eps) {
                weights.assign(alpha.data(), alpha.data() + alpha.size());
                x = q * alpha;
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                double a = alpha(static_cast<Eigen::Index>(i));
                double w = weights[i];
                if (a < drop_eps && w > a) theta = std::min(theta, w / (w - a));
            }
            std::vector<int> next_corral;
            std::vector<double> next_weights;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                double w = (1.0 - theta) * weights[i] + theta * alpha(static_cast<Eigen::Index>(i));
                if (w > drop_eps) {
                    next_corral.push_back(corral[i]);
                    next_weights.push_back(w);
                }
            }
            if (next_corral.empty()) {
                // All weights collapsed; keep the best single point.
                next_corral.push_back(corral[0]);
                next_weights.push_back(1.0);
            }
            corral = std::move(next_corral);
            weights = std::move(next_weights);
            double total = 0.0;
            for (double w : weights) total += w;
            for (double& w : weights) w /= total;
            x.setZero();
            for (std::size_t i = 0; i < corral.size(); ++i) x += weights[i] * points[corral[i]];
        }
    }
    throw NoConvergence("min_norm_point: iteration cap exceeded, gap=" + std::to_string(gap));
}

namespace {

struct Candidate {
    bool found = false;
    Vec point;
    double distance = std::numeric_limits<double>::infinity();
};

// Exact projection by KKT-candidate enumeration: some linearly independent
// subset of at most n active constraints certifies the projection.
Candidate projection_candidate(const Polyhedron& p, const Vec& x, double tol) {
    const Eigen::Index n = p.dim();
    const int m = static_cast<int>(p.count());
    const double scale = 1.0 + x.norm() + (m > 0 ? p.offsets.cwiseAbs().maxCoeff() : 0.0);

    Candidate best;
    if (p.contains(x, tol)) {
        best.found = true;
        best.point = x;
        best.distance = 0.0;
        return best;
    }
    const int kmax = static_cast<int>(std::min<Eigen::Index>(n, m));
    for (int k = 1; k <= kmax; ++k) {
        for_each_subset(m, k, [&](const std::vector<int>& idx) {
            Mat a = rows_of(p.normals, idx);
            if (smallest_singular_value(a) <= 1e-10 * (1.0 + a.norm())) return;
            Vec c = entries_of(p.offsets, idx);
            Mat gram = a * a.transpose();
            Vec lambda = gram.ldlt().solve(a * x - c);
            if (lambda.minCoeff() < -tol * scale) return;
            Vec y = x - a.transpose() * lambda;
            if (p.max_violation(y) > tol * scale) return;
            double dist = (x - y).norm();
            if (!best.found || dist < best.distance) {
                best.found = true;
                best.point = y;
                best.distance = dist;
            }
        });
    }
    return best;
}

}  // namespace

ProjectionResult project_onto_polyhedron(const Polyhedron& p, const Vec& x, double tol) {
    require_finite(x, "projection query point");
    if (tol <= 0) throw BadParams("project_onto_polyhedron: tol must be positive");
    Candidate c = projection_candidate(p, x, tol);
    if (!c.found) throw EmptyPolyhedron("project_onto_polyhedron: infeasible polyhedron");
    return ProjectionResult{c.point, c.distance};
}

double distance_to_polyhedron(const Polyhedron& p, const Vec& x, double tol) {
    Candidate c = projection_candidate(p, x, tol);
    if (!c.found) return std::numeric_limits<double>::infinity();
    return c.distance;
}

bool is_feasible(const Polyhedron& p, double tol) {
    if (p.count() == 0) return true;
    return projection_candidate(p, Vec::Zero(p.dim()), tol).found;
}

PointList enumerate_vertices(const Polyhedron& p, double tol) {
    const Eigen::Index n = p.dim();
    const int m = static_cast<int>(p.count());
    PointList vertices;
    if (n == 0 || m < n) return vertices;

    const double feas_tol = 1e-8 * (1.0 + p.offsets.cwiseAbs().maxCoeff());
    for_each_subset(m, static_cast<int>(n), [&](const std::vector<int>& idx) {
        Mat a = rows_of(p.normals, idx);
        Eigen::FullPivLU<Mat> lu(a);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        Vec v = lu.solve(entries_of(p.offsets, idx));
        if (!v.allFinite()) return;
        if (p.max_violation(v) > feas_tol) return;
        for (const Vec& u : vertices)
            if ((u - v).norm() <= tol * (1.0 + v.norm())) return;
        vertices.push_back(v);
    });
    return vertices;
}

double hoffman_constant(const Polyhedron& p, double tol) {
    const Eigen::Index n = p.dim();

    // Normalize rows; drop trivial halfspaces (zero normal, nonnegative offset).
    std::vector<int> keep;
    Mat a(p.count(), n);
    Vec c(p.count());
    Eigen::Index rows = 0;
    for (Eigen::Index i = 0; i < p.count(); ++i) {
        double norm = p.normals.row(i).norm();
        if (norm <= 1e-14) {
            if (p.offsets(i) < -1e-12) throw EmptyIntersection("hoffman_constant: contradictory trivial halfspace");
            continue;
        }
        a.row(rows) = p.normals.row(i) / norm;
        c(rows) = p.offsets(i) / norm;
        ++rows;
    }
    a.conservativeResize(rows, n);
    c.conservativeResize(rows);
    Polyhedron normalized(a, c);
    if (!is_feasible(normalized, tol)) throw EmptyIntersection("hoffman_constant: empty intersection");
    if (rows == 0) return 1.0;

    double best = 1.0;
    const int kmax = static_cast<int>(std::min<Eigen::Index>(n, rows));
    for (int k = 1; k <= kmax; ++k) {
        for_each_subset(static_cast<int>(rows), k, [&](const std::vector<int>& idx) {
            Mat sub = rows_of(a, idx);
            double sigma = smallest_singular_value(sub);
            if (sigma <= 1e-9) return;  // dependent subset, no certificate
            best = std::max(best, std::sqrt(static_cast<double>(k)) / sigma);
        });
    }
    return best;
}

}  // namespace fpcs
