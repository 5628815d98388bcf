#pragma once

#include <vector>

#include "fpcs/system.hpp"

namespace fixtures {

using fpcs::Piece;
using fpcs::PwlPotential;
using fpcs::Vec;

inline Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
inline Vec v1(double a) { return (Vec(1) << a).finished(); }

// Two parallel queues, unit server, idling allowed: max{x1, x2, 0}.
inline PwlPotential two_queue(Vec field = Vec::Zero(2)) {
    std::vector<Piece> pieces{{v2(-1, 0), 0.0}, {v2(0, -1), 0.0}, {Vec::Zero(2), 0.0}};
    return PwlPotential(2, pieces, std::move(field));
}

inline PwlPotential single_piece(Vec drift, Vec field) {
    Eigen::Index n = drift.size();
    std::vector<Piece> pieces{{std::move(drift), 0.0}};
    return PwlPotential(n, pieces, std::move(field));
}

inline PwlPotential one_dim(std::vector<std::pair<double, double>> mu_b) {
    std::vector<Piece> pieces;
    for (auto& [mu, b] : mu_b) pieces.push_back(Piece{v1(mu), b});
    return PwlPotential(1, pieces);
}

}  // namespace fixtures
