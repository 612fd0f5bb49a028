"""Finite-difference solver and verification toolkit for the Dirichlet
problem with two nearly touching disk inclusions of finite conductivity."""
from .coefficient import SharpCoefficient, SmoothCoefficient, edge_harmonic_mean, eval_sharp, eval_smooth
from .fields import (
    BarrierProfile,
    CombinationParams,
    ComparisonConstants,
    barrier_b,
    combination,
    quantity_M,
    quantity_N,
    radial_R,
    select_alpha_beta,
    tangential_T,
)
from .geometry import Geometry, RegionLabel, RegionMasks, build_geometry, classify, gap_segment_halfwidth, region_masks
from .solver import BoundarySpec, Grid, ScalarField, SolveReport, VectorField, assemble, build_grid, gradient, solve_dirichlet

__version__ = "0.1.0"

__all__ = [
    "BarrierProfile",
    "BoundarySpec",
    "CombinationParams",
    "ComparisonConstants",
    "Geometry",
    "Grid",
    "RegionLabel",
    "RegionMasks",
    "ScalarField",
    "SharpCoefficient",
    "SmoothCoefficient",
    "SolveReport",
    "VectorField",
    "assemble",
    "barrier_b",
    "build_geometry",
    "build_grid",
    "classify",
    "combination",
    "edge_harmonic_mean",
    "eval_sharp",
    "eval_smooth",
    "gap_segment_halfwidth",
    "gradient",
    "quantity_M",
    "quantity_N",
    "radial_R",
    "region_masks",
    "select_alpha_beta",
    "solve_dirichlet",
    "tangential_T",
]
