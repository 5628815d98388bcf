#pragma once

#include <cstdint>
#include <vector>

#include "fpcs/system.hpp"

namespace fpcs {

// All operations in this header analyze the potential's geometry (regions,
// critical points, basins). They never depend on the external field: adding a
// constant field leaves regions, critical points and the CNC unchanged.

// Critical points: points where the active drifts' differences span R^n;
// equivalently the extreme points of the effective regions.
PointList find_critical_points(const PwlPotential& sys);

// Conic neighbourhood constant: half the minimum distance from a critical
// point to a region not containing it; +inf when no such pair exists.
double compute_cnc(const PwlPotential& sys, const PointList& critical);

double critical_diameter(const PointList& critical);

// Drifts whose regions intersect the closed r-ball around x.
std::vector<int> drift_neighborhood_indices(const PwlPotential& sys, const Vec& x, double r);
PointList drift_neighborhood(const PwlPotential& sys, const Vec& x, double r);

// True iff the affine span of S is a proper subspace of R^dim.
bool is_low_dimensional(const PointList& s, Eigen::Index dim);

// Checks the basin condition xi(p)' y >= |xi(p)|^2 for every drift y active
// within distance rho of p (all drifts when rho is infinite). Throws
// NotCritical when p is not a critical point.
bool verify_basin(const PwlPotential& sys, const Vec& p, double rho);

// Deterministic Hoffman-based bound for the low-dimensionality constant.
double compute_gamma_bound(const PwlPotential& sys, const PointList& critical);

struct GammaEstimate {
    double bound = 1.0;
    double empirical = 1.0;
};

// (provable bound, sampled estimate); both clamped to >= 1. Sampling maximizes
// d(x, C) / r(x) where r(x) is the smallest radius at which the drift
// neighborhood of x becomes full-dimensional.
GammaEstimate estimate_gamma(const PwlPotential& sys, const PointList& critical, int samples,
                             std::uint64_t seed);

// Simulates the unperturbed trajectory from x0 and reports whether it ever
// returns within rho/3 of p after having been within rho/3 and later beyond
// rho. Vacuously true when p is not critical or rho is infinite.
bool no_revisit_check(const PwlPotential& sys, const Vec& p, double rho, const Vec& x0,
                      double horizon);

struct BasinCertificate {
    Vec point;
    double radius = 0.0;
    bool verified = false;
};

struct CriticalAnalysis {
    PointList critical_points;
    double cnc = 0.0;
    double diameter = 0.0;
    std::vector<BasinCertificate> basins;
    double gamma_bound = 1.0;
    double gamma_empirical = 1.0;
};

CriticalAnalysis analyze_system(const PwlPotential& sys, int gamma_samples = 2000,
                                std::uint64_t seed = 1);

}  // namespace fpcs
