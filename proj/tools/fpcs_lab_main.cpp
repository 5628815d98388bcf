#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fpcs/constants.hpp"
#include "fpcs/critical.hpp"
#include "fpcs/integrate.hpp"
#include "fpcs/perturbation.hpp"
#include "fpcs/scenario.hpp"
#include "fpcs/verify.hpp"

namespace {

using fpcs::Vec;
using nlohmann::json;

int log_level() {
    const char* env = std::getenv("FPCS_LAB_LOG");
    if (!env) return 0;
    std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[fpcs-lab] " << msg << "\n";
}

// 17 significant digits: doubles round-trip exactly.
std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Non-finite doubles have no JSON representation; the file format spells
// infinities out as strings.
json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json json_vector(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fpcs::SchemaError("cannot write output file '" + path.string() + "'");
    out << content;
}

std::string trajectory_csv(const fpcs::Trajectory& unperturbed,
                           const fpcs::Trajectory* perturbed) {
    const Eigen::Index n = unperturbed.dim();
    std::string csv = "t";
    for (Eigen::Index i = 1; i <= n; ++i) csv += ",x_" + std::to_string(i);
    csv += ",segment_id,kind\n";
    auto emit = [&](const fpcs::Trajectory& traj, const char* label) {
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            csv += fmt_double(traj.times[k]);
            for (Eigen::Index i = 0; i < n; ++i) csv += "," + fmt_double(traj.states[k](i));
            csv += "," + std::to_string(k);
            csv += ",";
            csv += traj.kinds[k] == fpcs::BreakKind::jump ? "jump" : label;
            csv += "\n";
        }
    };
    emit(unperturbed, "unperturbed");
    if (perturbed) emit(*perturbed, "perturbed");
    return csv;
}

json trajectory_json(const fpcs::Trajectory& traj) {
    json out;
    out["terminal"] = traj.flag == fpcs::TerminalFlag::equilibrium ? "equilibrium" : "horizon-capped";
    out["breakpoints"] = json::array();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        json bp;
        bp["t"] = traj.times[k];
        bp["x"] = json_vector(traj.states[k]);
        bp["kind"] = traj.kinds[k] == fpcs::BreakKind::jump ? "jump" : "flow";
        out["breakpoints"].push_back(std::move(bp));
    }
    return out;
}

json constants_json(const fpcs::ConstantsReport& report) {
    json out;
    out["kind"] = report.kind;
    out["n"] = report.dim;
    out["m"] = report.piece_count;
    out["kappa"] = json_number(report.kappa);
    if (report.kind == "recursive") {
        out["M"] = report.critical_count;
        out["D_C"] = json_number(report.diameter);
        out["gamma"] = json_number(report.gamma);
        out["gamma_provenance"] = report.gamma_provenance;
        out["gamma_min"] = json_number(report.gamma_min);
        out["sigma"] = json_number(report.sigma);
        out["eta"] = json_number(report.eta);
        out["theta_star"] = json_number(report.theta_star);
        out["children"] = json::array();
        for (const auto& child : report.children) {
            json c = constants_json(*child.report);
            c["subset"] = child.subset;
            out["children"].push_back(std::move(c));
        }
    }
    return out;
}

struct GlobalOptions {
    std::string out_dir = ".";
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<double> gamma;
    int runs = 20;
    int jobs = 1;
};

void emit(const json& doc, const GlobalOptions& opts, const std::string& filename) {
    std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        write_file(std::filesystem::path(opts.out_dir) / filename, text);
    }
}

int cmd_simulate(const std::string& scenario_path, const GlobalOptions& opts) {
    fpcs::ScenarioConfig scenario = fpcs::load_scenario(scenario_path);
    log_info("simulate: " + scenario_path);

    fpcs::Trajectory base =
        fpcs::integrate_unperturbed(scenario.system, scenario.initial_state, scenario.horizon);

    std::optional<fpcs::Trajectory> perturbed;
    std::optional<fpcs::DeviationReport> deviation;
    if (scenario.perturbation) {
        std::uint64_t seed = opts.seed.value_or(scenario.perturbation_seed);
        fpcs::PerturbationPath path = fpcs::make_path(*scenario.perturbation, seed);
        perturbed = fpcs::integrate_perturbed(scenario.system, scenario.initial_state, path,
                                              scenario.horizon);
        deviation = fpcs::measure_deviation(base, *perturbed, path);
    }

    std::filesystem::create_directories(opts.out_dir);
    json run;
    run["version"] = 1;
    run["command"] = "simulate";
    run["system"] = {{"dim", scenario.system.dim()},
                     {"pieces", scenario.system.piece_count()},
                     {"lambda", json_vector(scenario.system.external_field())}};
    run["horizon"] = scenario.horizon;
    run["unperturbed"] = {{"terminal", base.flag == fpcs::TerminalFlag::equilibrium
                                           ? "equilibrium"
                                           : "horizon-capped"},
                          {"breakpoints", base.times.size()},
                          {"segments", base.segment_count()}};
    if (perturbed) {
        run["perturbed"] = {{"terminal", perturbed->flag == fpcs::TerminalFlag::equilibrium
                                             ? "equilibrium"
                                             : "horizon-capped"},
                            {"breakpoints", perturbed->times.size()},
                            {"segments", perturbed->segment_count()}};
        run["deviation"] = {{"sup_deviation", json_number(deviation->sup_deviation)},
                            {"sup_perturbation", json_number(deviation->sup_perturbation)},
                            {"ratio", json_number(deviation->ratio)},
                            {"cumulative_abs", json_number(deviation->cumulative_abs)},
                            {"samples", deviation->deviation_samples.size()}};
    } else {
        run["perturbed"] = nullptr;
        run["deviation"] = nullptr;
    }

    if (opts.format == "json") {
        json traj;
        traj["unperturbed"] = trajectory_json(base);
        if (perturbed) traj["perturbed"] = trajectory_json(*perturbed);
        write_file(std::filesystem::path(opts.out_dir) / "trajectory.json", traj.dump(2) + "\n");
        run["outputs"] = {{"trajectory", "trajectory.json"}};
    } else {
        write_file(std::filesystem::path(opts.out_dir) / "trajectory.csv",
                   trajectory_csv(base, perturbed ? &*perturbed : nullptr));
        run["outputs"] = {{"trajectory", "trajectory.csv"}};
    }
    emit(run, opts, "run.json");
    return 0;
}

int cmd_analyze(const std::string& scenario_path, const GlobalOptions& opts) {
    fpcs::ScenarioConfig scenario = fpcs::load_scenario(scenario_path);
    log_info("analyze: " + scenario_path);
    fpcs::CriticalAnalysis analysis =
        fpcs::analyze_system(scenario.system, 2000, opts.seed.value_or(1));

    json out;
    out["version"] = 1;
    out["command"] = "analyze";
    out["critical_points"] = json::array();
    for (const Vec& p : analysis.critical_points) out["critical_points"].push_back(json_vector(p));
    out["M"] = analysis.critical_points.size();
    out["cnc"] = json_number(analysis.cnc);
    out["D_C"] = json_number(analysis.diameter);
    out["basins"] = json::array();
    for (const auto& cert : analysis.basins)
        out["basins"].push_back({{"point", json_vector(cert.point)},
                                 {"radius", json_number(cert.radius)},
                                 {"verified", cert.verified}});
    out["gamma_bound"] = json_number(analysis.gamma_bound);
    out["gamma_empirical"] = json_number(analysis.gamma_empirical);
    emit(out, opts, "analysis.json");
    return 0;
}

int cmd_constants(const std::string& scenario_path, const GlobalOptions& opts) {
    fpcs::ScenarioConfig scenario = fpcs::load_scenario(scenario_path);
    log_info("constants: " + scenario_path);
    std::optional<double> gamma = opts.gamma ? opts.gamma : scenario.gamma_override;
    fpcs::ConstantsReport report = fpcs::compute_constants(scenario.system, gamma);
    json out = constants_json(report);
    out["version"] = 1;
    out["command"] = "constants";
    emit(out, opts, "constants.json");
    return 0;
}

int cmd_sensitivity(const std::string& scenario_path, const GlobalOptions& opts) {
    fpcs::ScenarioConfig scenario = fpcs::load_scenario(scenario_path);
    if (!scenario.perturbation)
        throw fpcs::SchemaError("$.perturbation: required for the sensitivity command");
    log_info("sensitivity: " + scenario_path);

    std::uint64_t seed = opts.seed.value_or(scenario.perturbation_seed);
    fpcs::SweepSummary summary =
        fpcs::sensitivity_sweep(scenario.system, scenario.initial_state, *scenario.perturbation,
                                opts.runs, scenario.horizon, seed, opts.jobs);

    std::optional<double> gamma = opts.gamma ? opts.gamma : scenario.gamma_override;
    json kappa = nullptr;
    json certified = nullptr;
    try {
        fpcs::ConstantsReport report = fpcs::compute_constants(scenario.system, gamma);
        kappa = json_number(report.kappa);
        if (summary.ratio_defined) certified = summary.max_ratio <= report.kappa;
    } catch (const fpcs::ScaleLimit&) {
        log_info("constants beyond desk scale; kappa omitted from the sweep report");
    }

    std::filesystem::create_directories(opts.out_dir);
    std::string growth = "t,max_sup_deviation,median_sup_deviation\n";
    for (const auto& sample : summary.growth)
        growth += fmt_double(sample.t) + "," + fmt_double(sample.max_sup_deviation) + "," +
                  fmt_double(sample.median_sup_deviation) + "\n";
    write_file(std::filesystem::path(opts.out_dir) / "growth.csv", growth);

    json out;
    out["version"] = 1;
    out["command"] = "sensitivity";
    out["runs"] = summary.runs;
    out["seed"] = seed;
    out["max_ratio"] = summary.ratio_defined ? json_number(summary.max_ratio) : json(nullptr);
    out["mean_ratio"] = summary.ratio_defined ? json_number(summary.mean_ratio) : json(nullptr);
    out["max_sup_deviation"] = json_number(summary.max_sup_deviation);
    out["median_sup_deviation"] = json_number(summary.median_sup_deviation);
    out["kappa"] = kappa;
    out["max_ratio_le_kappa"] = certified;
    out["per_run"] = json::array();
    for (const auto& stats : summary.per_run)
        out["per_run"].push_back({{"sup_deviation", json_number(stats.sup_deviation)},
                                  {"sup_perturbation", json_number(stats.sup_perturbation)},
                                  {"ratio", json_number(stats.ratio)},
                                  {"cumulative_abs", json_number(stats.cumulative_abs)}});
    out["outputs"] = {{"growth_csv", "growth.csv"}};
    emit(out, opts, "sweep.json");
    return 0;
}

int cmd_verify(const std::string& suite, const GlobalOptions& opts) {
    std::vector<std::string> names;
    if (suite == "all")
        names = fpcs::suite_names();
    else
        names.push_back(suite);

    json out;
    out["version"] = 1;
    out["command"] = "verify";
    out["suites"] = json::array();
    bool all_passed = true;
    for (const std::string& name : names) {
        fpcs::SuiteResult result = fpcs::run_suite(name, opts.seed.value_or(1));
        std::cerr << "suite " << result.name << ": " << (result.passed() ? "PASS" : "FAIL") << " ("
                  << result.cases << " cases";
        if (result.failures) std::cerr << ", " << result.failures << " failures";
        std::cerr << ")\n";
        for (const std::string& note : result.notes) std::cerr << "  " << note << "\n";
        json entry = {{"name", result.name},
                      {"cases", result.cases},
                      {"failures", result.failures},
                      {"passed", result.passed()}};
        out["suites"].push_back(std::move(entry));
        all_passed = all_passed && result.passed();
    }
    out["passed"] = all_passed;
    emit(out, opts, "verify.json");
    return all_passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and sensitivity analyzer for piecewise-constant subgradient flows"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions opts;
    app.add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    app.add_option("--jobs", opts.jobs, "Worker pool size for sweeps")->capture_default_str();
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Seed override");
    double gamma_value = 1.0;
    auto* gamma_opt = app.add_option("--gamma", gamma_value, "Gamma override (>= 1)");
    app.add_option("--runs", opts.runs, "Runs per sweep")->capture_default_str();
    app.add_option("--format", opts.format, "Trajectory output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    std::string scenario_path;
    std::string suite = "all";

    CLI::App* simulate = app.add_subcommand("simulate", "Integrate a scenario and emit trajectories");
    simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    CLI::App* analyze = app.add_subcommand("analyze", "Critical points, CNC, basins, gamma");
    analyze->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    CLI::App* constants = app.add_subcommand("constants", "Recursive sensitivity constants");
    constants->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    CLI::App* sensitivity = app.add_subcommand("sensitivity", "Monte-Carlo deviation sweep");
    sensitivity->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    CLI::App* verify = app.add_subcommand("verify", "Randomized property suites");
    verify->add_option("--suite", suite, "Suite name or 'all'")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (seed_opt->count()) opts.seed = seed_value;
    if (gamma_opt->count()) opts.gamma = gamma_value;

    try {
        if (simulate->parsed()) return cmd_simulate(scenario_path, opts);
        if (analyze->parsed()) return cmd_analyze(scenario_path, opts);
        if (constants->parsed()) return cmd_constants(scenario_path, opts);
        if (sensitivity->parsed()) return cmd_sensitivity(scenario_path, opts);
        if (verify->parsed()) return cmd_verify(suite, opts);
    } catch (const fpcs::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const fpcs::BadParams& e) {
        // Parameter-domain problems from the suite dispatcher are usage errors.
        std::string what = e.what();
        if (what.rfind("unknown suite", 0) == 0) {
            std::cerr << "usage error: " << what << "\n";
            return 2;
        }
        json err = {{"error", e.code()}, {"message", what}};
        std::cout << err.dump(2) << "\n";
        return 3;
    } catch (const fpcs::ScaleLimit& e) {
        json err = {{"error", e.code()}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return 4;
    } catch (const fpcs::Error& e) {
        json err = {{"error", e.code()}, {"message", e.what()}};
        std::cout << err.dump(2) << "\n";
        return 3;
    }
    return 2;
}
