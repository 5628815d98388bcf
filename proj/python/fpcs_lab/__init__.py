"""Exact simulation and sensitivity analysis of piecewise-constant subgradient flows."""

from ._fpcs import (
    DeviationReport,
    FpcsError,
    PerturbationPath,
    SweepSummary,
    System,
    TerminalFlag,
    Trajectory,
    analyze,
    arrivals_to_perturbation,
    compute_cnc,
    compute_constants,
    drift_neighborhood,
    enumerate_vertices,
    estimate_gamma,
    find_critical_points,
    hoffman_constant,
    integrate,
    integrate_perturbed,
    is_low_dimensional,
    make_path,
    maxweight_system,
    measure_deviation,
    min_norm_point,
    no_revisit_check,
    project_onto_polyhedron,
    run_suite,
    sensitivity_sweep,
    verify_basin,
)

__all__ = [
    "DeviationReport",
    "FpcsError",
    "PerturbationPath",
    "SweepSummary",
    "System",
    "TerminalFlag",
    "Trajectory",
    "analyze",
    "arrivals_to_perturbation",
    "compute_cnc",
    "compute_constants",
    "drift_neighborhood",
    "enumerate_vertices",
    "estimate_gamma",
    "find_critical_points",
    "hoffman_constant",
    "integrate",
    "integrate_perturbed",
    "is_low_dimensional",
    "make_path",
    "maxweight_system",
    "measure_deviation",
    "min_norm_point",
    "no_revisit_check",
    "project_onto_polyhedron",
    "run_suite",
    "sensitivity_sweep",
    "verify_basin",
]
