"""Verification of the derivative identities, maximum principles and the
gap-uniform gradient bound."""
from .barrier import barrier_invariants, barrier_reference
from .checks import MaxPrincipleReport, gradient_bound_report, subharmonic_max_check
from .families import AnalyticFamily, analytic_family_2d, analytic_family_3d
from .oracles import ErrorReport, RadialSolution, radial_constancy_check, single_disk_oracle, transmission_solution
from .residuals import ResidualReport, fit_order, identity_residuals_nd, lemma_residuals_2d, specialisation_gap
from .sweep import CaseSettings, SweepTable, delta_sweep, run_case, sweep_checks

__all__ = [
    "AnalyticFamily",
    "CaseSettings",
    "ErrorReport",
    "MaxPrincipleReport",
    "RadialSolution",
    "ResidualReport",
    "SweepTable",
    "analytic_family_2d",
    "analytic_family_3d",
    "barrier_invariants",
    "barrier_reference",
    "delta_sweep",
    "fit_order",
    "gradient_bound_report",
    "identity_residuals_nd",
    "lemma_residuals_2d",
    "radial_constancy_check",
    "run_case",
    "single_disk_oracle",
    "specialisation_gap",
    "subharmonic_max_check",
    "sweep_checks",
    "transmission_solution",
]
