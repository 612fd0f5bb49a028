"""Solver validation against closed-form single-inclusion solutions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from ..coefficient import SharpCoefficient
from ..fields import radial_R
from ..geometry import build_geometry, region_masks
from ..solver import assemble, build_grid, gradient, solve_dirichlet


@dataclass
class ErrorReport:
    name: str
    kappa: float
    h_levels: list[float]
    errors: list[float]
    secondary: list[float] = field(default_factory=list)
    secondary_name: str = ""

    @property
    def ratios(self) -> list[float]:
        return [b / a if a > 0 else float("nan") for a, b in zip(self.errors, self.errors[1:])]

    def as_rows(self) -> list[dict]:
        rows = []
        for i, h in enumerate(self.h_levels):
            row = {"check": self.name, "kappa": float(self.kappa), "h": float(h), "error": self.errors[i]}
            row["ratio"] = self.ratios[i - 1] if i > 0 else float("nan")
            if self.secondary:
                row[self.secondary_name] = self.secondary[i]
            rows.append(row)
        return rows


def transmission_solution(kappa: float, x1, x2):
    """Field of a unit disk of conductivity ``kappa`` in a uniform unit field
    along ``x1``: ``u`` and its gradient."""
    r2 = x1 * x1 + x2 * x2
    c = (1.0 - kappa) / (1.0 + kappa)
    inside = r2 <= 1.0
    safe = np.where(inside, 1.0, r2)
    u = np.where(inside, 2.0 * x1 / (1.0 + kappa), x1 + c * x1 / safe)
    g1 = np.where(inside, 2.0 / (1.0 + kappa), 1.0 + c * (x2 * x2 - x1 * x1) / safe**2)
    g2 = np.where(inside, 0.0, -2.0 * c * x1 * x2 / safe**2)
    return u, g1, g2


def single_disk_oracle(
    kappa: float,
    h_levels,
    *,
    box=(-8.0, 8.0, -8.0, 8.0),
    mu: float = 0.25,
    tol: float = 1e-10,
    backend: str = "amg",
    quadrature: int = 16,
) -> ErrorReport:
    """Max-norm error of the discrete solution against the exact transmission
    field, with the exact trace as boundary data.  The secondary column is
    the error of ``|grad u|`` over the interior set."""
    geometry = build_geometry(0.1, mu, box, has_minus=False)
    coeff = SharpCoefficient(geometry, kappa, 1.0)
    u_err, g_err = [], []
    for h in h_levels:
        grid = build_grid(box, h)
        X1, X2 = grid.mesh()
        exact, e1, e2 = transmission_solution(kappa, X1, X2)
        u, _ = solve_dirichlet(assemble(grid, coeff, quadrature=quadrature), exact, tol, backend=backend)
        u_err.append(float(np.max(np.abs(u.values - exact))))
        grad = gradient(u)
        masks = region_masks(geometry, grid)
        diff = np.abs(grad.norm() - np.hypot(e1, e2))
        g_err.append(float(diff[masks.interior].max()))
    return ErrorReport("single_disk", kappa, [float(h) for h in h_levels], u_err, g_err, "grad_error")


@dataclass(frozen=True)
class RadialSolution:
    """``g`` with ``(r a g')' = 0``, ``g(r_lo) = 0``, ``g(r_hi) = 1``."""

    kappa: float
    r_lo: float
    r_hi: float
    flux: float  # the constant r a g'

    @classmethod
    def build(cls, kappa: float, r_lo: float = 0.5, r_hi: float = 2.0):
        def inv(s):
            return 1.0 / (s * (kappa if s <= 1.0 else 1.0))

        total, _ = quad(inv, r_lo, r_hi, points=[1.0], epsabs=1e-13, epsrel=1e-12)
        return cls(kappa, r_lo, r_hi, 1.0 / total)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lo = np.log(np.minimum(r, 1.0) / self.r_lo) / self.kappa
        hi = np.log(np.maximum(r, 1.0))
        return self.flux * (lo + hi)


def radial_constancy_check(
    kappa: float,
    h_levels,
    *,
    box=(-2.0, 2.0, -2.0, 2.0),
    r_lo: float = 0.5,
    exclude_band: float = 0.125,
    tol: float = 1e-10,
    backend: str = "amg",
    quadrature: int = 16,
) -> ErrorReport:
    """Relative max deviation of the nodal ``R`` from the exact flux constant
    for a concentric radial solution.

    Nodes with ``r < r_lo`` are held at the exact solution.  Deviation is
    measured on free nodes at least ``2h`` beyond ``r_lo`` and at least
    ``exclude_band`` away from the circle, on both sides of it; the nodal
    gradient is not consistent in the first cells next to the interface.
    """
    geometry = build_geometry(0.1, 0.25, box, has_minus=False)
    coeff = SharpCoefficient(geometry, kappa, 1.0)
    exact = RadialSolution.build(kappa, r_lo, 0.5 * (box[1] - box[0]))
    errs, counts = [], []
    for h in h_levels:
        grid = build_grid(box, h)
        X1, X2 = grid.mesh()
        r = np.hypot(X1, X2)
        hole = r < r_lo
        system = assemble(grid, coeff, fixed=hole, quadrature=quadrature)
        # hole values only matter next to free nodes; keep the centre finite
        u, _ = solve_dirichlet(system, exact(np.maximum(r, 0.5 * r_lo)), tol, backend=backend)
        R = radial_R(gradient(u), coeff).values
        keep = ~system.fixed & (np.abs(r - 1.0) >= exclude_band) & (r >= r_lo + 2 * h)
        errs.append(float(np.max(np.abs(R[keep] - exact.flux)) / abs(exact.flux)))
        counts.append(float(keep.sum()))
    return ErrorReport("radial_constancy", kappa, [float(h) for h in h_levels], errs, counts, "nodes")
