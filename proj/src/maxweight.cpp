#include "fpcs/maxweight.hpp"

namespace fpcs {

PwlPotential to_fpcs(const SchedulingScenario& scenario) {
    const Eigen::Index n = scenario.queue_count;
    if (n < 1) throw BadParams("scheduling scenario: queue count must be >= 1");
    if (scenario.service_vectors.empty() && !scenario.include_idle)
        throw BadParams("scheduling scenario: no schedules");
    require_dim(scenario.arrival_rate, n, "arrival rate");
    if (scenario.arrival_rate.minCoeff() < 0) throw BadParams("arrival rates must be nonnegative");

    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < scenario.service_vectors.size(); ++i) {
        const Vec& s = scenario.service_vectors[i];
        require_dim(s, n, "service vector");
        if (s.minCoeff() < 0) throw BadParams("service vectors must be nonnegative");
        for (std::size_t j = 0; j < i; ++j)
            if ((scenario.service_vectors[j] - s).norm() <= 1e-12)
                throw DuplicateVectors("duplicate service vector");
        if (scenario.include_idle && s.norm() <= 1e-12)
            throw DuplicateVectors("zero service vector duplicates the idle schedule");
        pieces.push_back(Piece{-s, 0.0});
    }
    if (scenario.include_idle) pieces.push_back(Piece{Vec::Zero(n), 0.0});
    return PwlPotential(n, std::move(pieces), scenario.arrival_rate);
}

PerturbationPath arrivals_to_perturbation(const std::vector<Vec>& arrival_counts, const Vec& rate) {
    std::vector<std::pair<double, Vec>> jumps;
    jumps.reserve(arrival_counts.size());
    double t = 0.0;
    for (const Vec& counts : arrival_counts) {
        require_dim(counts, rate.size(), "arrival counts");
        if (counts.minCoeff() < 0) throw BadParams("arrival counts must be nonnegative");
        t += 1.0;
        jumps.emplace_back(t, counts - rate);
    }
    return PerturbationPath(rate.size(), std::move(jumps));
}

}  // namespace fpcs
