#include "fpcs/linalg.hpp"

#include <Eigen/SVD>

namespace fpcs {

Mat difference_matrix(const PointList& pts) {
    if (pts.empty()) return Mat(0, 0);
    const Eigen::Index n = pts[0].size();
    Mat d(n, static_cast<Eigen::Index>(pts.size()) - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) d.col(static_cast<Eigen::Index>(i) - 1) = pts[i] - pts[0];
    return d;
}

int affine_rank(const PointList& pts, double rel_tol) {
    if (pts.size() <= 1) return 0;
    Mat d = difference_matrix(pts);
    Eigen::JacobiSVD<Mat> svd(d);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    const double thresh = rel_tol * (1.0 + s(0));
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thresh) ++r;
    return r;
}

double smallest_singular_value(const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0.0;
    return s(s.size() - 1);
}

namespace {

void fix_sign(Mat& basis) {
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        for (Eigen::Index i = 0; i < basis.rows(); ++i) {
            if (std::abs(basis(i, j)) > 1e-12) {
                if (basis(i, j) < 0) basis.col(j) *= -1.0;
                break;
            }
        }
    }
}

}  // namespace

Mat orthonormal_span(const Mat& a, double rel_tol) {
    if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double thresh = rel_tol * (1.0 + (s.size() ? s(0) : 0.0));
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thresh) ++r;
    Mat basis = svd.matrixU().leftCols(r);
    fix_sign(basis);
    return basis;
}

Mat orthonormal_completion(const Mat& basis, const Mat& avoid, Eigen::Index target_cols) {
    const Eigen::Index n = basis.rows();
    Mat out(n, target_cols);
    Eigen::Index have = basis.cols();
    out.leftCols(have) = basis;

    // Candidates: coordinate axes, Gram-Schmidt against everything kept so far.
    Mat kept(n, have + avoid.cols());
    kept << basis, avoid;
    for (Eigen::Index axis = 0; axis < n && have < target_cols; ++axis) {
        Vec v = Vec::Zero(n);
        v(axis) = 1.0;
        v -= kept * (kept.transpose() * v);
        v -= out.leftCols(have) * (out.leftCols(have).transpose() * v);
        double norm = v.norm();
        if (norm > 1e-9) {
            v /= norm;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (std::abs(v(i)) > 1e-12) {
                    if (v(i) < 0) v *= -1.0;
                    break;
                }
            }
            out.col(have++) = v;
        }
    }
    if (have != target_cols) throw NoConvergence("orthonormal completion failed");
    return out;
}

}  // namespace fpcs
