"""One-configuration solve pipeline and the gap-width sweep built on it."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import UnresolvedGap
from ..coefficient import SharpCoefficient, SmoothCoefficient
from ..fields import (
    ComparisonConstants,
    barrier_b,
    quantity_M,
    quantity_N,
    radial_R,
    select_alpha_beta,
    tangential_T,
)
from ..geometry import DEFAULT_BOX, DEFAULT_MU, build_geometry, region_masks
from ..solver import BoundarySpec, assemble, build_grid, gradient, solve_dirichlet
from .checks import gradient_bound_report, subharmonic_max_check
from .io import csv_text

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "delta",
    "h",
    "mode",
    "kappa_plus",
    "kappa_minus",
    "boundary",
    "epsilon",
    "sup_interior_grad",
    "sup_S_grad",
    "sup_E_grad",
    "segment_ratio",
    "max_N_wplus",
    "alpha",
    "beta",
    "N_minus_M_max_E",
    "grad_to_comb_ratio_at_N_max",
    "M_interior_max_E",
    "M_boundary_max_E",
    "M_margin_E",
    "M_allowed_E",
    "subharmonic_ok",
    "K",
    "A",
    "iterations",
    "relative_residual",
    "sup_abs_u",
    "max_principle_ok",
]


@dataclass(frozen=True)
class CaseSettings:
    mu: float = DEFAULT_MU
    box: tuple = DEFAULT_BOX
    mode: str = "sharp"
    epsilon_fraction: float = 0.125  # epsilon = fraction * delta
    profile: str = "cosine"
    K: float = 4.0
    C_scale: float = 4.0
    tol: float = 1e-10
    backend: str = "amg"
    quadrature: int = 16
    max_iter: Optional[int] = None


@dataclass
class CaseResult:
    row: dict
    fields: dict = field(default_factory=dict, repr=False)


def make_coefficient(geometry, kappa_plus, kappa_minus, settings: CaseSettings):
    sharp = SharpCoefficient(geometry, kappa_plus, kappa_minus)
    eps = settings.epsilon_fraction * geometry.delta
    if settings.mode == "sharp":
        return sharp, SmoothCoefficient(sharp, eps, settings.profile)
    if settings.mode == "smooth":
        smooth = SmoothCoefficient(sharp, eps, settings.profile)
        return smooth, smooth
    raise ValueError(f"unknown coefficient mode {settings.mode!r}")


def run_case(
    delta: float,
    kappa_plus: float,
    kappa_minus: float,
    phi: BoundarySpec,
    h: float,
    settings: CaseSettings = CaseSettings(),
    *,
    keep_fields: bool = False,
) -> CaseResult:
    """Solve one configuration and collect every diagnostic of a sweep row."""
    geometry = build_geometry(delta, settings.mu, settings.box)
    coeff, smooth = make_coefficient(geometry, kappa_plus, kappa_minus, settings)
    grid = build_grid(geometry.box, h)
    system = assemble(grid, coeff, quadrature=settings.quadrature)
    u, report = solve_dirichlet(system, phi, settings.tol, backend=settings.backend, max_iter=settings.max_iter)
    del system
    grad = gradient(u)
    masks = region_masks(geometry, grid)
    stats = gradient_bound_report(u, grad, masks)

    consts = ComparisonConstants.from_kappas(kappa_plus, kappa_minus, settings.K, settings.C_scale)
    M = quantity_M(u, grad, consts.A)
    T = tangential_T(grad)
    R = radial_R(grad, coeff)
    params, _ = select_alpha_beta(M, T, R, grad, masks.e)
    b = barrier_b(smooth, settings.K, "plus")
    N = quantity_N(u, T, R, params, b, consts.A, masks.w_plus)

    X1, X2 = grid.mesh()
    r2 = X1 * X1 + X2 * X2
    comb = params.alpha * T.values + params.beta * R.values
    e = masks.e
    # N - M on the gap box, with the common A u^2 term cancelled exactly
    excess = comb[e] ** 2 / r2[e] * (1.0 + b(np.sqrt(r2[e]))) - (grad.v1[e] ** 2 + grad.v2[e] ** 2)
    n_vals = np.where(masks.w_plus, N.values, -np.inf)
    n_idx = np.unravel_index(int(np.argmax(n_vals)), n_vals.shape)
    comb_at = abs(comb[n_idx])
    grad_at = math.hypot(grad.v1[n_idx], grad.v2[n_idx])
    sub = subharmonic_max_check(M, masks)

    row = {
        "delta": float(delta),
        "h": float(h),
        "mode": settings.mode,
        "kappa_plus": float(kappa_plus),
        "kappa_minus": float(kappa_minus),
        "boundary": phi.family,
        "epsilon": float(smooth.epsilon),
        **stats,
        "max_N_wplus": float(N.values[n_idx]),
        "alpha": float(params.alpha),
        "beta": float(params.beta),
        "N_minus_M_max_E": float(excess.max()),
        "grad_to_comb_ratio_at_N_max": float(grad_at / comb_at) if comb_at > 0 else float("nan"),
        "M_interior_max_E": sub.interior_max,
        "M_boundary_max_E": sub.boundary_max,
        "M_margin_E": sub.margin,
        "M_allowed_E": sub.allowed,
        "subharmonic_ok": sub.ok,
        "K": float(settings.K),
        "A": consts.A,
        "iterations": int(report.iterations),
        "relative_residual": report.relative_residual,
        "sup_abs_u": report.sup_abs_u,
        "max_principle_ok": report.max_principle_ok,
    }
    logger.info("delta=%g h=%g sup=%.6g", delta, h, stats["sup_interior_grad"])
    fields = {}
    if keep_fields:
        fields = dict(geometry=geometry, grid=grid, u=u, grad=grad, masks=masks, M=M, N=N, T=T, R=R, barrier=b, report=report)
    return CaseResult(row, fields)


@dataclass
class SweepTable:
    rows: list[dict]

    def column(self, name: str, h: Optional[float] = None) -> list:
        return [r[name] for r in self.rows if h is None or r["h"] == h]

    @property
    def h_levels(self) -> list[float]:
        return sorted({r["h"] for r in self.rows}, reverse=True)

    def finest(self) -> list[dict]:
        hmin = min(r["h"] for r in self.rows)
        return [r for r in self.rows if r["h"] == hmin]

    def to_csv(self) -> str:
        return csv_text(self.rows, SWEEP_COLUMNS)


def delta_sweep(
    deltas,
    kappas: tuple[float, float],
    phi: BoundarySpec,
    h_levels,
    settings: CaseSettings = CaseSettings(),
    *,
    require_resolution: bool = True,
) -> SweepTable:
    """Solve every ``(delta, h)`` pair; rows ordered by delta then h."""
    deltas = [float(d) for d in deltas]
    h_levels = sorted((float(h) for h in h_levels), reverse=True)
    if require_resolution and min(h_levels) > min(deltas) / 8 * (1 + 1e-12):
        raise UnresolvedGap(f"finest h={min(h_levels)!r} does not resolve delta_min/8={min(deltas) / 8!r}")
    rows = []
    for d in deltas:
        for h in h_levels:
            rows.append(run_case(d, kappas[0], kappas[1], phi, h, settings).row)
    return SweepTable(rows)


def sweep_checks(
    table: SweepTable,
    *,
    expect: str = "bounded",
    bounded_factor: float = 1.5,
    blowup_factor: float = 2.0,
    refinement_tol: float = 0.05,
    n_vs_m_tol: float = 1e-12,
) -> dict:
    """Sweep-wide invariants.

    Per-row flags are always checked.  ``expect='bounded'`` also requires
    the finest-grid suprema (gradient and ``max N``) to vary by at most
    ``bounded_factor``; ``expect='blowup'`` requires the gradient supremum
    at the smallest gap to be ``blowup_factor`` times that at the largest.
    With two or more grids the two finest must agree to ``refinement_tol``.
    """
    rows = table.rows
    out = {
        "max_principle": all(r["max_principle_ok"] for r in rows),
        "subharmonic": all(r["subharmonic_ok"] for r in rows),
        "n_below_m": all(r["N_minus_M_max_E"] <= n_vs_m_tol for r in rows),
    }
    finest = sorted(table.finest(), key=lambda r: -r["delta"])
    sups = [r["sup_interior_grad"] for r in finest]
    ns = [r["max_N_wplus"] for r in finest]
    out["grad_factor"] = max(sups) / min(sups)
    out["N_factor"] = max(ns) / min(ns)
    out["blowup_ratio"] = sups[-1] / sups[0]
    if expect == "bounded":
        out["bounded"] = out["grad_factor"] <= bounded_factor and out["N_factor"] <= bounded_factor
    elif expect == "blowup":
        out["blowup"] = out["blowup_ratio"] >= blowup_factor
    levels = table.h_levels
    if len(levels) >= 2:
        fine, next_fine = levels[-1], levels[-2]
        worst = 0.0
        for d in sorted({r["delta"] for r in rows}):
            a = [r["sup_interior_grad"] for r in rows if r["delta"] == d and r["h"] == fine][0]
            b = [r["sup_interior_grad"] for r in rows if r["delta"] == d and r["h"] == next_fine][0]
            worst = max(worst, abs(a - b) / abs(a))
        out["refinement_change"] = worst
        out["refinement"] = worst <= refinement_tol
    out["ok"] = all(v for k, v in out.items() if isinstance(v, bool))
    return out


__all__ = ["CaseSettings", "CaseResult", "SweepTable", "SWEEP_COLUMNS", "run_case", "delta_sweep", "sweep_checks"]
