#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fpcs/perturbation.hpp"
#include "fpcs/system.hpp"

namespace fpcs {

// Parsed scenario file (versioned JSON, unknown keys rejected).
struct ScenarioConfig {
    int version;
    PwlPotential system;
    Vec initial_state;
    double horizon;
    std::optional<PathSpec> perturbation;
    std::uint64_t perturbation_seed = 0;
    std::optional<double> gamma_override;
};

// Parses scenario text. Throws SchemaError with a line-anchored message on
// malformed JSON and a JSON-pointer-anchored message on semantic problems.
ScenarioConfig parse_scenario(const std::string& text);

ScenarioConfig load_scenario(const std::string& path);

}  // namespace fpcs
