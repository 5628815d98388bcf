#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fpcs/perturbation.hpp"
#include "fpcs/system.hpp"

namespace fpcs {

// Orthogonal decomposition of the dynamics restricted to a low-dimensional
// drift subset: a constant translation w (min-norm point of the subset's
// affine hull) plus an (n-1)-dimensional system on the subspace spanned by
// the basis columns.
struct ProjectedSystem {
    std::vector<int> subset;  // piece indices of the parent
    Vec translation;          // w, orthogonal to every drift difference
    Mat basis;                // n x (n-1), orthonormal columns spanning Y
    PwlPotential child;       // drifts basis'(mu - w), unchanged offsets
};

ProjectedSystem project_subsystem(const PwlPotential& sys, const std::vector<int>& subset);

struct ConstantsReport {
    std::string kind;  // "recursive", "dimension0", "constant", "one_dimensional"
    int dim = 0;
    int piece_count = 0;
    int critical_count = 0;
    double diameter = 0.0;      // D^C
    double gamma = 1.0;         // value used in the formulas
    std::string gamma_provenance = "n/a";  // "override" or "bound"
    double gamma_min = 0.0;     // CNC, +inf allowed
    double sigma = 0.0;
    double eta = 0.0;
    double theta_star = 0.0;    // +inf allowed
    double kappa = 0.0;

    struct Child {
        std::vector<int> subset;
        double kappa = 0.0;
        std::shared_ptr<const ConstantsReport> report;
    };
    std::vector<Child> children;
};

// Recursive sensitivity constant:
//   sigma = 4 + max child kappa over low-dimensional drift subsets,
//   eta = m * 2^(m+1) * sigma,
//   theta* = gamma_min / (40 (M+2)(gamma+1) eta),
//   kappa = 4 D^C / theta* + 5 (M+2)(gamma+1) eta,  or 4 (gamma+1) eta + 1
//           when theta* = 0;  kappa = eta with no critical points.
// Base cases: dimension 0 -> 0; single effective piece -> 1; one-dimensional
// multi-piece -> 1. Deterministic; throws ScaleLimit beyond desk scale.
ConstantsReport compute_constants(const PwlPotential& sys,
                                  std::optional<double> gamma_override = std::nullopt);

struct CertifySettings {
    int runs_per_family = 20;
    double horizon = 40.0;
    std::uint64_t seed = 1;
    std::vector<double> thetas = {0.01, 0.1, 1.0};
    bool include_field_shift = true;
    Vec field_shift;  // defaults to 0.3 * ones when empty
    int jobs = 1;
};

struct CertifyResult {
    bool ok = false;
    double max_ratio = 0.0;
    int total_runs = 0;
};

// Empirical certification: sweeps square-wave, adversarial deterministic, and
// random-step families (optionally with a shifted constant field) and checks
// every observed deviation ratio against report.kappa.
CertifyResult certify_kappa(const PwlPotential& sys, const ConstantsReport& report,
                            const CertifySettings& settings = {});

}  // namespace fpcs
