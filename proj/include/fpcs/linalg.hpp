#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fpcs/errors.hpp"

namespace fpcs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A finite set of points (or drift vectors) in R^n. Duplicates permitted;
// hull/rank operations ignore them.
using PointList = std::vector<Vec>;

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline void require_finite(const Vec& v, const char* what = "vector") {
    if (!v.allFinite()) throw NonFinite(std::string(what) + " has non-finite entries");
}

inline void require_dim(const Vec& v, Eigen::Index n, const char* what = "vector") {
    if (v.size() != n) throw DimensionMismatch(std::string(what) + " has wrong dimension");
}

// Matrix whose columns are pts[i] - pts[0].
Mat difference_matrix(const PointList& pts);

// Rank of {p - q : p,q in pts} via SVD with relative threshold.
int affine_rank(const PointList& pts, double rel_tol = 1e-9);

// Smallest singular value of a (possibly rectangular) matrix.
double smallest_singular_value(const Mat& a);

// Orthonormal basis (columns) of the span of the columns of `a`,
// deterministic up to the sign convention: first nonzero coordinate of each
// basis vector is positive.
Mat orthonormal_span(const Mat& a, double rel_tol = 1e-9);

// Extends `basis` (orthonormal columns) with deterministic orthonormal
// vectors to `target_cols` columns, staying orthogonal to the columns of
// `avoid` as well.
Mat orthonormal_completion(const Mat& basis, const Mat& avoid, Eigen::Index target_cols);

}  // namespace fpcs
