#include "fpcs/system.hpp"

#include <algorithm>
#include <cmath>

namespace fpcs {

PwlPotential::PwlPotential(Eigen::Index dim, std::vector<Piece> pieces, Vec external_field,
                           double active_tol)
    : dim_(dim), field_(std::move(external_field)), active_tol_(active_tol) {
    if (dim < 0) throw BadParams("PwlPotential: negative dimension");
    if (pieces.empty()) throw BadParams("PwlPotential: at least one piece required");
    if (active_tol <= 0) throw BadParams("PwlPotential: active_tol must be positive");
    if (field_.size() == 0) field_ = Vec::Zero(dim);
    require_dim(field_, dim, "external field");
    require_finite(field_, "external field");

    for (const Piece& p : pieces) {
        require_dim(p.drift, dim, "piece drift");
        require_finite(p.drift, "piece drift");
        if (!std::isfinite(p.offset)) throw NonFinite("piece offset is not finite");
    }

    // Equal drifts: only the piece with the largest offset ever attains the max.
    for (const Piece& p : pieces) {
        bool dominated = false;
        for (Piece& q : pieces_) {
            if ((q.drift - p.drift).norm() <= active_tol * (1.0 + p.drift.norm())) {
                q.offset = std::max(q.offset, p.offset);
                dominated = true;
                break;
            }
        }
        if (!dominated) pieces_.push_back(p);
    }
}

Vec PwlPotential::effective_drift(int i) const { return pieces_[static_cast<std::size_t>(i)].drift + field_; }

double PwlPotential::piece_value(int i, const Vec& x) const {
    const Piece& p = pieces_[static_cast<std::size_t>(i)];
    return -p.drift.dot(x) + p.offset;
}

PwlPotential PwlPotential::with_field(Vec field) const {
    return PwlPotential(dim_, pieces_, std::move(field), active_tol_);
}

PwlPotential PwlPotential::folded() const {
    std::vector<Piece> shifted = pieces_;
    for (Piece& p : shifted) p.drift += field_;
    return PwlPotential(dim_, std::move(shifted), Vec::Zero(dim_), active_tol_);
}

Polyhedron PwlPotential::region(int i) const {
    const int m = piece_count();
    Mat a(m - 1, dim_);
    Vec c(m - 1);
    Eigen::Index row = 0;
    for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        // piece i dominates piece j: (mu_i - mu_j)' x <= b_i - b_j
        a.row(row) = (pieces_[static_cast<std::size_t>(i)].drift - pieces_[static_cast<std::size_t>(j)].drift).transpose();
        c(row) = pieces_[static_cast<std::size_t>(i)].offset - pieces_[static_cast<std::size_t>(j)].offset;
        ++row;
    }
    return Polyhedron(std::move(a), std::move(c));
}

Evaluation evaluate(const PwlPotential& sys, const Vec& x) {
    require_dim(x, sys.dim(), "evaluation point");
    require_finite(x, "evaluation point");
    const int m = sys.piece_count();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> values(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        values[static_cast<std::size_t>(i)] = sys.piece_value(i, x);
        best = std::max(best, values[static_cast<std::size_t>(i)]);
    }
    Evaluation ev;
    ev.value = best;
    const double tol = sys.active_tol() * (1.0 + std::abs(best));
    for (int i = 0; i < m; ++i) {
        if (values[static_cast<std::size_t>(i)] >= best - tol) {
            ev.active.indices.push_back(i);
            ev.active.drifts.push_back(sys.pieces()[static_cast<std::size_t>(i)].drift);
        }
    }
    return ev;
}

Vec actual_drift(const PwlPotential& sys, const Vec& x) {
    Evaluation ev = evaluate(sys, x);
    PointList hull;
    hull.reserve(ev.active.indices.size());
    for (int i : ev.active.indices) hull.push_back(sys.effective_drift(i));
    return min_norm_point(hull).point;
}

ActiveSet persisting_subset(const PwlPotential& sys, const ActiveSet& active, const Vec& drift) {
    require_dim(drift, sys.dim(), "drift");
    ActiveSet out;
    if (active.indices.empty()) return out;
    std::vector<double> slopes;
    slopes.reserve(active.indices.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < active.indices.size(); ++k) {
        double s = -active.drifts[k].dot(drift);
        slopes.push_back(s);
        best = std::max(best, s);
    }
    const double tol = sys.active_tol() * (1.0 + std::abs(best));
    for (std::size_t k = 0; k < active.indices.size(); ++k) {
        if (slopes[k] >= best - tol) {
            out.indices.push_back(active.indices[k]);
            out.drifts.push_back(active.drifts[k]);
        }
    }
    return out;
}

}  // namespace fpcs
