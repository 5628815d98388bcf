#include "fpcs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fpcs/maxweight.hpp"

namespace fpcs {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) fail(where, "unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(where, std::string("missing '") + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) fail(where + "." + key, "number is not finite");
    return d;
}

Vec get_vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty number array");
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(where, "expected numbers");
        out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    if (!out.allFinite()) fail(where, "entries must be finite");
    return out;
}

PwlPotential parse_system(const json& sys, double active_tol) {
    if (!sys.is_object()) fail("$.system", "expected an object");
    const bool has_pieces = sys.contains("pieces");
    const bool has_mw = sys.contains("maxweight");
    if (has_pieces == has_mw) fail("$.system", "exactly one of 'pieces' or 'maxweight' required");

    if (has_pieces) {
        check_keys(sys, "$.system", {"pieces", "lambda"});
        const json& pieces = sys.at("pieces");
        if (!pieces.is_array() || pieces.empty()) fail("$.system.pieces", "expected a non-empty array");
        std::vector<Piece> parsed;
        Eigen::Index dim = -1;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const std::string where = "$.system.pieces[" + std::to_string(i) + "]";
            const json& p = pieces[i];
            if (!p.is_object()) fail(where, "expected an object");
            check_keys(p, where, {"mu", "b"});
            if (!p.contains("mu")) fail(where, "missing 'mu'");
            Vec mu = get_vector(p.at("mu"), where + ".mu");
            if (dim < 0) dim = mu.size();
            if (mu.size() != dim) fail(where + ".mu", "inconsistent dimension");
            double b = p.contains("b") ? get_number(p, where, "b") : 0.0;
            parsed.push_back(Piece{std::move(mu), b});
        }
        Vec field = Vec::Zero(dim);
        if (sys.contains("lambda")) {
            field = get_vector(sys.at("lambda"), "$.system.lambda");
            if (field.size() != dim) fail("$.system.lambda", "inconsistent dimension");
        }
        return PwlPotential(dim, std::move(parsed), std::move(field), active_tol);
    }

    check_keys(sys, "$.system", {"maxweight"});
    const json& mw = sys.at("maxweight");
    if (!mw.is_object()) fail("$.system.maxweight", "expected an object");
    check_keys(mw, "$.system.maxweight", {"services", "idle", "lambda"});
    if (!mw.contains("services")) fail("$.system.maxweight", "missing 'services'");
    const json& services = mw.at("services");
    if (!services.is_array() || services.empty())
        fail("$.system.maxweight.services", "expected a non-empty array");
    SchedulingScenario scenario;
    for (std::size_t i = 0; i < services.size(); ++i) {
        Vec s = get_vector(services[i], "$.system.maxweight.services[" + std::to_string(i) + "]");
        if (scenario.queue_count == 0) scenario.queue_count = s.size();
        if (s.size() != scenario.queue_count)
            fail("$.system.maxweight.services", "inconsistent dimensions");
        scenario.service_vectors.push_back(std::move(s));
    }
    scenario.include_idle = true;
    if (mw.contains("idle")) {
        if (!mw.at("idle").is_boolean()) fail("$.system.maxweight.idle", "expected a boolean");
        scenario.include_idle = mw.at("idle").get<bool>();
    }
    scenario.arrival_rate = Vec::Zero(scenario.queue_count);
    if (mw.contains("lambda")) {
        scenario.arrival_rate = get_vector(mw.at("lambda"), "$.system.maxweight.lambda");
        if (scenario.arrival_rate.size() != scenario.queue_count)
            fail("$.system.maxweight.lambda", "inconsistent dimension");
    }
    try {
        return to_fpcs(scenario);
    } catch (const Error& e) {
        fail("$.system.maxweight", e.what());
    }
}

PathSpec parse_perturbation(const json& pert, Eigen::Index dim, double horizon,
                            std::uint64_t& seed_out) {
    if (!pert.is_object()) fail("$.perturbation", "expected an object");
    check_keys(pert, "$.perturbation", {"kind", "params", "seed"});
    if (!pert.contains("kind") || !pert.at("kind").is_string())
        fail("$.perturbation", "missing string 'kind'");
    const std::string kind = pert.at("kind").get<std::string>();
    seed_out = 0;
    if (pert.contains("seed")) {
        if (!pert.at("seed").is_number_integer() || pert.at("seed").get<long long>() < 0)
            fail("$.perturbation.seed", "expected a nonnegative integer");
        seed_out = pert.at("seed").get<std::uint64_t>();
    }
    json params = pert.contains("params") ? pert.at("params") : json::object();
    if (!params.is_object()) fail("$.perturbation.params", "expected an object");

    PathSpec spec;
    spec.dim = dim;
    spec.horizon = horizon;
    const std::string where = "$.perturbation.params";
    if (kind == "deterministic") {
        spec.kind = PathKind::deterministic;
        check_keys(params, where, {"jumps"});
        if (!params.contains("jumps") || !params.at("jumps").is_array())
            fail(where, "missing array 'jumps'");
        for (std::size_t i = 0; i < params.at("jumps").size(); ++i) {
            const json& j = params.at("jumps")[i];
            const std::string jw = where + ".jumps[" + std::to_string(i) + "]";
            if (!j.is_object()) fail(jw, "expected an object");
            check_keys(j, jw, {"t", "du"});
            double t = get_number(j, jw, "t");
            if (!j.contains("du")) fail(jw, "missing 'du'");
            Vec du = get_vector(j.at("du"), jw + ".du");
            if (du.size() != dim) fail(jw + ".du", "inconsistent dimension");
            spec.jumps.emplace_back(t, std::move(du));
        }
    } else if (kind == "bernoulli_steps") {
        spec.kind = PathKind::bernoulli_steps;
        check_keys(params, where, {"theta", "count", "spacing"});
        spec.amplitude = get_number(params, where, "theta");
        if (!params.contains("count") || !params.at("count").is_number_integer())
            fail(where, "missing integer 'count'");
        spec.count = params.at("count").get<int>();
        spec.spacing = params.contains("spacing") ? get_number(params, where, "spacing") : 1.0;
    } else if (kind == "discretized_wiener") {
        spec.kind = PathKind::discretized_wiener;
        check_keys(params, where, {"volatility", "step"});
        spec.volatility = get_number(params, where, "volatility");
        spec.step = params.contains("step") ? get_number(params, where, "step") : 1e-2;
    } else if (kind == "square_wave") {
        spec.kind = PathKind::square_wave;
        check_keys(params, where, {"amplitude", "period", "axis"});
        spec.amplitude = get_number(params, where, "amplitude");
        spec.period = get_number(params, where, "period");
        if (params.contains("axis")) {
            if (!params.at("axis").is_number_integer()) fail(where + ".axis", "expected an integer");
            spec.axis = params.at("axis").get<int>();
        }
    } else {
        fail("$.perturbation.kind", "unknown kind '" + kind + "'");
    }
    return spec;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Anchor the message to a line for editor-friendly reports.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": " + e.what());
    }
    if (!doc.is_object()) fail("$", "expected a JSON object");
    check_keys(doc, "$",
               {"version", "system", "initial_state", "horizon", "perturbation", "tolerances",
                "gamma_override"});
    if (!doc.contains("version") || !doc.at("version").is_number_integer())
        fail("$.version", "missing integer version");
    int version = doc.at("version").get<int>();
    if (version != 1) fail("$.version", "unsupported version " + std::to_string(version));

    double active_tol = 1e-9;
    if (doc.contains("tolerances")) {
        const json& tol = doc.at("tolerances");
        if (!tol.is_object()) fail("$.tolerances", "expected an object");
        check_keys(tol, "$.tolerances", {"active_tol"});
        if (tol.contains("active_tol")) {
            active_tol = get_number(tol, "$.tolerances", "active_tol");
            if (!(active_tol > 0)) fail("$.tolerances.active_tol", "must be positive");
        }
    }

    if (!doc.contains("system")) fail("$", "missing 'system'");
    PwlPotential system = parse_system(doc.at("system"), active_tol);

    if (!doc.contains("initial_state")) fail("$", "missing 'initial_state'");
    Vec x0 = get_vector(doc.at("initial_state"), "$.initial_state");
    if (x0.size() != system.dim()) fail("$.initial_state", "inconsistent dimension");

    if (!doc.contains("horizon")) fail("$", "missing 'horizon'");
    double horizon = get_number(doc, "$", "horizon");
    if (!(horizon > 0)) fail("$.horizon", "must be positive");

    std::optional<PathSpec> perturbation;
    std::uint64_t seed = 0;
    if (doc.contains("perturbation"))
        perturbation = parse_perturbation(doc.at("perturbation"), system.dim(), horizon, seed);

    std::optional<double> gamma_override;
    if (doc.contains("gamma_override")) {
        double g = get_number(doc, "$", "gamma_override");
        if (!(g >= 1.0)) fail("$.gamma_override", "must be >= 1");
        gamma_override = g;
    }

    return ScenarioConfig{version,      std::move(system), std::move(x0), horizon,
                          perturbation, seed,              gamma_override};
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

}  // namespace fpcs
