#pragma once

#include <vector>

#include "fpcs/geometry.hpp"
#include "fpcs/linalg.hpp"

namespace fpcs {

struct Piece {
    Vec drift;      // mu
    double offset;  // b
};

// Piecewise-linear convex potential Phi(x) = max_i(-mu_i' x + b_i) plus an
// optional constant external field lambda added to the induced dynamics.
// Adding lambda produces the equivalent system with pieces (mu_i + lambda, b_i):
// same regions, shifted drifts.
class PwlPotential {
public:
    PwlPotential(Eigen::Index dim, std::vector<Piece> pieces, Vec external_field = Vec(),
                 double active_tol = 1e-9);

    Eigen::Index dim() const { return dim_; }
    int piece_count() const { return static_cast<int>(pieces_.size()); }
    const std::vector<Piece>& pieces() const { return pieces_; }
    const Vec& external_field() const { return field_; }
    bool has_field() const { return field_.size() > 0 && field_.norm() > 0.0; }
    double active_tol() const { return active_tol_; }

    // Drift that piece i contributes to the dynamics (mu_i + lambda).
    Vec effective_drift(int i) const;

    double piece_value(int i, const Vec& x) const;

    // Same pieces, replaced field.
    PwlPotential with_field(Vec field) const;
    // The field folded into the pieces: (mu_i + lambda, b_i), zero field.
    PwlPotential folded() const;

    // Effective region of piece i as a polyhedron (independent of the field).
    Polyhedron region(int i) const;

private:
    Eigen::Index dim_;
    std::vector<Piece> pieces_;
    Vec field_;
    double active_tol_;
};

struct ActiveSet {
    std::vector<int> indices;  // pieces attaining the max within tolerance
    PointList drifts;          // matching mu_i (field not applied)
};

struct Evaluation {
    double value;
    ActiveSet active;
};

Evaluation evaluate(const PwlPotential& sys, const Vec& x);

// Right derivative of the unperturbed trajectory through x: the unique
// minimum-norm element of {mu_i + lambda : i active at x}.
Vec actual_drift(const PwlPotential& sys, const Vec& x);

// Pieces of `active` that remain maximal immediately when moving along
// `drift` (argmax of the piece-value slope).
ActiveSet persisting_subset(const PwlPotential& sys, const ActiveSet& active, const Vec& drift);

}  // namespace fpcs
