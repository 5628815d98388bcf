#pragma once

#include <vector>

#include "fpcs/linalg.hpp"

namespace fpcs {

// Intersection of halfspaces {x : normals.row(i) * x <= offsets(i)}.
struct Polyhedron {
    Mat normals;   // k x n, one row per halfspace
    Vec offsets;   // k

    Polyhedron() = default;
    Polyhedron(Mat a, Vec c);

    Eigen::Index dim() const { return normals.cols(); }
    Eigen::Index count() const { return normals.rows(); }

    double max_violation(const Vec& x) const;
    bool contains(const Vec& x, double tol = 1e-9) const;
};

struct MinNormResult {
    Vec point;
    std::vector<int> support;      // indices into the input set with positive hull weight
    std::vector<double> weights;   // matching convex weights
    double gap;                    // duality-gap certificate at termination
};

// Minimum-norm point of conv(points), Wolfe's algorithm with duality-gap
// termination. The minimizer is unique; the support set need not be.
MinNormResult min_norm_point(const PointList& points, double tol = 1e-12);

struct ProjectionResult {
    Vec point;
    double distance;
};

// Euclidean projection of x onto P. Throws EmptyPolyhedron when P is
// infeasible. KKT residual of the returned point is at most tol.
ProjectionResult project_onto_polyhedron(const Polyhedron& p, const Vec& x, double tol = 1e-10);

// Distance wrapper with the empty-set convention d(x, {}) = +inf.
double distance_to_polyhedron(const Polyhedron& p, const Vec& x, double tol = 1e-10);

bool is_feasible(const Polyhedron& p, double tol = 1e-10);

// All basic feasible solutions (extreme points). Empty when the polyhedron
// has no vertex, e.g. when it contains a line or is infeasible.
PointList enumerate_vertices(const Polyhedron& p, double tol = 1e-8);

// Upper bound c with d(x, ∩W_i) <= c * max_i d(x, W_i) for all x, where the
// W_i are the halfspaces of `p`. Rows are normalized internally. Throws
// EmptyIntersection when the intersection is empty.
double hoffman_constant(const Polyhedron& p, double tol = 1e-10);

}  // namespace fpcs
