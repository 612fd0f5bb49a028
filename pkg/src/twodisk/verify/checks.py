"""Maximum-location and gradient-bound diagnostics on solved fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyRegion
from ..geometry import RegionMasks
from ..solver import ScalarField, VectorField, argmax_node


@dataclass
class MaxPrincipleReport:
    interior_max: float
    boundary_max: float
    interior_location: tuple[float, float]
    boundary_location: tuple[float, float]
    margin: float  # interior_max - boundary_max
    allowed: float
    ok: bool


def _region_interior(region: np.ndarray) -> np.ndarray:
    inner = region.copy()
    inner[0, :] = inner[-1, :] = inner[:, 0] = inner[:, -1] = False
    inner[1:-1, 1:-1] &= region[:-2, 1:-1] & region[2:, 1:-1] & region[1:-1, :-2] & region[1:-1, 2:]
    return inner


def subharmonic_max_check(M: ScalarField, masks: RegionMasks, *, slack_factor: float = 10.0) -> MaxPrincipleReport:
    """Compare the maximum of ``M`` over the interior of the thin gap box
    with its maximum over the box's boundary nodes.

    The allowance is ``slack_factor * h * (max M - min M)`` over the box.
    """
    region = masks.e
    if not region.any():
        raise EmptyRegion("the gap box contains no grid nodes")
    inner = _region_interior(region)
    rows = np.unique(np.nonzero(inner)[1])
    if rows.size < 3:
        raise EmptyRegion(f"the gap box has {rows.size} interior rows, need at least 3")
    edge = region & ~inner
    vals = M.values
    i_idx = argmax_node(vals, inner)
    b_idx = argmax_node(vals, edge)
    x1, x2 = M.grid.x1, M.grid.x2
    span = float(vals[region].max() - vals[region].min())
    allowed = slack_factor * M.grid.h * span
    margin = float(vals[i_idx] - vals[b_idx])
    return MaxPrincipleReport(
        interior_max=float(vals[i_idx]),
        boundary_max=float(vals[b_idx]),
        interior_location=(float(x1[i_idx[0]]), float(x2[i_idx[1]])),
        boundary_location=(float(x1[b_idx[0]]), float(x2[b_idx[1]])),
        margin=margin,
        allowed=allowed,
        ok=margin <= allowed,
    )


def gradient_bound_report(u: ScalarField, grad: VectorField, masks: RegionMasks) -> dict:
    """Suprema of ``|grad u|`` over the interior set, the gap segment and the
    gap box, plus the ratio ``sup_interior / (sup_segment + 1)``."""
    g = grad.norm()

    def sup(mask):
        return float(g[mask].max()) if mask.any() else float("nan")

    out = {
        "sup_interior_grad": sup(masks.interior),
        "sup_S_grad": sup(masks.s),
        "sup_E_grad": sup(masks.e),
    }
    out["segment_ratio"] = out["sup_interior_grad"] / (out["sup_S_grad"] + 1.0)
    return out
