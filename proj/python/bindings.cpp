#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpcs/constants.hpp"
#include "fpcs/critical.hpp"
#include "fpcs/integrate.hpp"
#include "fpcs/maxweight.hpp"
#include "fpcs/perturbation.hpp"
#include "fpcs/scenario.hpp"
#include "fpcs/verify.hpp"

namespace py = pybind11;
using namespace fpcs;

namespace {

PwlPotential make_system(Eigen::Index dim, const std::vector<std::pair<Vec, double>>& pieces,
                         std::optional<Vec> field, double active_tol) {
    std::vector<Piece> parts;
    for (const auto& [mu, b] : pieces) parts.push_back(Piece{mu, b});
    return PwlPotential(dim, std::move(parts), field.value_or(Vec::Zero(dim)), active_tol);
}

PathSpec spec_from_kwargs(const std::string& kind, Eigen::Index dim, py::dict params) {
    PathSpec spec;
    spec.dim = dim;
    if (kind == "deterministic") {
        spec.kind = PathKind::deterministic;
        for (auto item : params["jumps"])
            spec.jumps.emplace_back(item.cast<py::tuple>()[0].cast<double>(),
                                    item.cast<py::tuple>()[1].cast<Vec>());
    } else if (kind == "bernoulli_steps") {
        spec.kind = PathKind::bernoulli_steps;
        spec.amplitude = params["theta"].cast<double>();
        spec.count = params["count"].cast<int>();
        if (params.contains("spacing")) spec.spacing = params["spacing"].cast<double>();
    } else if (kind == "discretized_wiener") {
        spec.kind = PathKind::discretized_wiener;
        spec.volatility = params["volatility"].cast<double>();
        if (params.contains("step")) spec.step = params["step"].cast<double>();
        spec.horizon = params["horizon"].cast<double>();
    } else if (kind == "square_wave") {
        spec.kind = PathKind::square_wave;
        spec.amplitude = params["amplitude"].cast<double>();
        spec.period = params["period"].cast<double>();
        spec.horizon = params["horizon"].cast<double>();
        if (params.contains("axis")) spec.axis = params["axis"].cast<int>();
    } else {
        throw BadParams("unknown path kind '" + kind + "'");
    }
    return spec;
}

py::dict constants_dict(const ConstantsReport& report) {
    py::dict out;
    out["kind"] = report.kind;
    out["n"] = report.dim;
    out["m"] = report.piece_count;
    out["kappa"] = report.kappa;
    if (report.kind == "recursive") {
        out["M"] = report.critical_count;
        out["D_C"] = report.diameter;
        out["gamma"] = report.gamma;
        out["gamma_provenance"] = report.gamma_provenance;
        out["gamma_min"] = report.gamma_min;
        out["sigma"] = report.sigma;
        out["eta"] = report.eta;
        out["theta_star"] = report.theta_star;
        py::list children;
        for (const auto& child : report.children) {
            py::dict c = constants_dict(*child.report);
            c["subset"] = child.subset;
            children.append(c);
        }
        out["children"] = children;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_fpcs, m) {
    m.doc() = "Exact simulation and sensitivity analysis of piecewise-constant subgradient flows";

    py::register_exception<Error>(m, "FpcsError");

    py::class_<PwlPotential>(m, "System")
        .def(py::init(&make_system), py::arg("dim"), py::arg("pieces"),
             py::arg("field") = std::nullopt, py::arg("active_tol") = 1e-9)
        .def_property_readonly("dim", &PwlPotential::dim)
        .def_property_readonly("piece_count", &PwlPotential::piece_count)
        .def_property_readonly("field", &PwlPotential::external_field)
        .def("pieces",
             [](const PwlPotential& sys) {
                 std::vector<std::pair<Vec, double>> out;
                 for (const Piece& p : sys.pieces()) out.emplace_back(p.drift, p.offset);
                 return out;
             })
        .def("with_field", &PwlPotential::with_field, py::arg("field"))
        .def("evaluate",
             [](const PwlPotential& sys, const Vec& x) {
                 Evaluation ev = evaluate(sys, x);
                 return py::make_tuple(ev.value, ev.active.indices);
             },
             py::arg("x"))
        .def("actual_drift", [](const PwlPotential& sys, const Vec& x) { return actual_drift(sys, x); },
             py::arg("x"));

    py::enum_<TerminalFlag>(m, "TerminalFlag")
        .value("equilibrium", TerminalFlag::equilibrium)
        .value("horizon_capped", TerminalFlag::horizon_capped);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("horizon", &Trajectory::horizon)
        .def_readonly("flag", &Trajectory::flag)
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("drifts", &Trajectory::drifts)
        .def_property_readonly("segment_count", &Trajectory::segment_count)
        .def("at", &Trajectory::at, py::arg("t"))
        .def("left_limit", &Trajectory::left_limit, py::arg("t"));

    py::class_<PerturbationPath>(m, "PerturbationPath")
        .def(py::init<Eigen::Index, std::vector<std::pair<double, Vec>>>(), py::arg("dim"),
             py::arg("jumps"))
        .def_property_readonly("jump_count", &PerturbationPath::jump_count)
        .def_property_readonly("jump_times", &PerturbationPath::jump_times)
        .def("value", &PerturbationPath::value, py::arg("t"))
        .def("sup_norm_up_to", &PerturbationPath::sup_norm_up_to, py::arg("t"))
        .def("cumulative_abs_up_to", &PerturbationPath::cumulative_abs_up_to, py::arg("t"));

    py::class_<DeviationReport>(m, "DeviationReport")
        .def_readonly("sup_deviation", &DeviationReport::sup_deviation)
        .def_readonly("sup_perturbation", &DeviationReport::sup_perturbation)
        .def_readonly("ratio", &DeviationReport::ratio)
        .def_readonly("cumulative_abs", &DeviationReport::cumulative_abs)
        .def_readonly("samples", &DeviationReport::deviation_samples);

    py::class_<SweepSummary>(m, "SweepSummary")
        .def_readonly("runs", &SweepSummary::runs)
        .def_readonly("ratio_defined", &SweepSummary::ratio_defined)
        .def_readonly("max_ratio", &SweepSummary::max_ratio)
        .def_readonly("mean_ratio", &SweepSummary::mean_ratio)
        .def_readonly("max_sup_deviation", &SweepSummary::max_sup_deviation)
        .def_readonly("median_sup_deviation", &SweepSummary::median_sup_deviation);

    m.def("integrate", &integrate_unperturbed, py::arg("system"), py::arg("x0"), py::arg("horizon"));
    m.def("make_path",
          [](const std::string& kind, Eigen::Index dim, py::dict params, std::uint64_t seed) {
              return make_path(spec_from_kwargs(kind, dim, params), seed);
          },
          py::arg("kind"), py::arg("dim"), py::arg("params"), py::arg("seed") = 0);
    m.def("integrate_perturbed", &integrate_perturbed, py::arg("system"), py::arg("x0"),
          py::arg("path"), py::arg("horizon"));
    m.def("measure_deviation", &measure_deviation, py::arg("unperturbed"), py::arg("perturbed"),
          py::arg("path"));
    m.def("sensitivity_sweep",
          [](const PwlPotential& sys, const Vec& x0, const std::string& kind, py::dict params,
             int runs, double horizon, std::uint64_t seed, int jobs) {
              return sensitivity_sweep(sys, x0, spec_from_kwargs(kind, sys.dim(), params), runs,
                                       horizon, seed, jobs);
          },
          py::arg("system"), py::arg("x0"), py::arg("kind"), py::arg("params"), py::arg("runs"),
          py::arg("horizon"), py::arg("seed") = 0, py::arg("jobs") = 1);

    m.def("min_norm_point",
          [](const PointList& pts, double tol) {
              MinNormResult r = min_norm_point(pts, tol);
              return py::make_tuple(r.point, r.support, r.weights);
          },
          py::arg("points"), py::arg("tol") = 1e-12);
    m.def("project_onto_polyhedron",
          [](const Mat& normals, const Vec& offsets, const Vec& x, double tol) {
              ProjectionResult r = project_onto_polyhedron(Polyhedron(normals, offsets), x, tol);
              return py::make_tuple(r.point, r.distance);
          },
          py::arg("normals"), py::arg("offsets"), py::arg("x"), py::arg("tol") = 1e-10);
    m.def("enumerate_vertices",
          [](const Mat& normals, const Vec& offsets, double tol) {
              return enumerate_vertices(Polyhedron(normals, offsets), tol);
          },
          py::arg("normals"), py::arg("offsets"), py::arg("tol") = 1e-8);
    m.def("hoffman_constant",
          [](const Mat& normals, const Vec& offsets, double tol) {
              return hoffman_constant(Polyhedron(normals, offsets), tol);
          },
          py::arg("normals"), py::arg("offsets"), py::arg("tol") = 1e-10);

    m.def("find_critical_points", &find_critical_points, py::arg("system"));
    m.def("compute_cnc", &compute_cnc, py::arg("system"), py::arg("critical_points"));
    m.def("is_low_dimensional", &is_low_dimensional, py::arg("points"), py::arg("dim"));
    m.def("drift_neighborhood", &drift_neighborhood, py::arg("system"), py::arg("x"), py::arg("r"));
    m.def("verify_basin", &verify_basin, py::arg("system"), py::arg("point"), py::arg("rho"));
    m.def("no_revisit_check", &no_revisit_check, py::arg("system"), py::arg("point"),
          py::arg("rho"), py::arg("x0"), py::arg("horizon"));
    m.def("estimate_gamma",
          [](const PwlPotential& sys, const PointList& critical, int samples, std::uint64_t seed) {
              GammaEstimate est = estimate_gamma(sys, critical, samples, seed);
              return py::make_tuple(est.bound, est.empirical);
          },
          py::arg("system"), py::arg("critical_points"), py::arg("samples") = 2000,
          py::arg("seed") = 1);
    m.def("analyze",
          [](const PwlPotential& sys, int gamma_samples, std::uint64_t seed) {
              CriticalAnalysis a = analyze_system(sys, gamma_samples, seed);
              py::dict out;
              out["critical_points"] = a.critical_points;
              out["cnc"] = a.cnc;
              out["D_C"] = a.diameter;
              out["gamma_bound"] = a.gamma_bound;
              out["gamma_empirical"] = a.gamma_empirical;
              py::list basins;
              for (const auto& cert : a.basins) {
                  py::dict b;
                  b["point"] = cert.point;
                  b["radius"] = cert.radius;
                  b["verified"] = cert.verified;
                  basins.append(b);
              }
              out["basins"] = basins;
              return out;
          },
          py::arg("system"), py::arg("gamma_samples") = 2000, py::arg("seed") = 1);
    m.def("compute_constants",
          [](const PwlPotential& sys, std::optional<double> gamma_override) {
              return constants_dict(compute_constants(sys, gamma_override));
          },
          py::arg("system"), py::arg("gamma_override") = std::nullopt);

    m.def("maxweight_system",
          [](const std::vector<Vec>& services, bool idle, std::optional<Vec> rate) {
              SchedulingScenario scenario;
              if (services.empty()) throw BadParams("at least one service vector required");
              scenario.queue_count = services.front().size();
              scenario.service_vectors = services;
              scenario.include_idle = idle;
              scenario.arrival_rate = rate.value_or(Vec::Zero(scenario.queue_count));
              return to_fpcs(scenario);
          },
          py::arg("services"), py::arg("idle") = true, py::arg("rate") = std::nullopt);
    m.def("arrivals_to_perturbation", &arrivals_to_perturbation, py::arg("arrival_counts"),
          py::arg("rate"));

    m.def("run_suite",
          [](const std::string& name, std::uint64_t seed) {
              SuiteResult r = run_suite(name, seed);
              py::dict out;
              out["name"] = r.name;
              out["cases"] = r.cases;
              out["failures"] = r.failures;
              out["passed"] = r.passed();
              return out;
          },
          py::arg("name"), py::arg("seed") = 1);
}
