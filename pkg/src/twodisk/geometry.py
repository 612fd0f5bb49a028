"""Two-disk configuration, derived regions and distances."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import GapTooWide, MarginViolation, NonPositiveParameter, OutOfDomain

if TYPE_CHECKING:
    from .solver import Grid

DEFAULT_BOX = (-4.0, 4.0, -7.0, 3.0)
DEFAULT_MU = 0.25
DEFAULT_DELTA0 = 0.5

# relative slack used for closed-set membership on grid nodes
_MEMBER_TOL = 1e-9


class RegionLabel(enum.Enum):
    DiskPlus = "DiskPlus"
    DiskMinus = "DiskMinus"
    Exterior = "Exterior"


@dataclass(frozen=True)
class Geometry:
    """Rectangular domain holding two unit disks a distance ``2*delta`` apart.

    ``box`` is ``(x1_lo, x1_hi, x2_lo, x2_hi)``.  The upper disk is centred at
    the origin, the lower one at ``(0, -2 - 2*delta)``.  Setting
    ``has_minus=False`` removes the lower disk (single-inclusion setups).
    """

    box: tuple[float, float, float, float]
    delta: float
    mu: float
    has_minus: bool = True
    radius: float = 1.0

    @property
    def box_lo(self) -> tuple[float, float]:
        return (self.box[0], self.box[2])

    @property
    def box_hi(self) -> tuple[float, float]:
        return (self.box[1], self.box[3])

    @property
    def center_plus(self) -> tuple[float, float]:
        return (0.0, 0.0)

    @property
    def center_minus(self) -> tuple[float, float]:
        return (0.0, -2.0 - 2.0 * self.delta)

    @property
    def midline(self) -> float:
        """x2-coordinate of the line halfway between the disks."""
        return -1.0 - self.delta

    def centers(self) -> list[tuple[float, float]]:
        if self.has_minus:
            return [self.center_plus, self.center_minus]
        return [self.center_plus]

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo1, hi1, lo2, hi2 = self.box
        return (
            (x[..., 0] >= lo1 - tol)
            & (x[..., 0] <= hi1 + tol)
            & (x[..., 1] >= lo2 - tol)
            & (x[..., 1] <= hi2 + tol)
        )

    def dist_to_circle(self, x, which: str = "plus") -> np.ndarray:
        """Distance from ``x`` to the boundary circle of the chosen disk."""
        x = np.asarray(x, dtype=float)
        c = self.center_plus if which == "plus" else self.center_minus
        r = np.hypot(x[..., 0] - c[0], x[..., 1] - c[1])
        return np.abs(r - self.radius)

    def dist_to_box_boundary(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo1, hi1, lo2, hi2 = self.box
        return np.minimum.reduce(
            [x[..., 0] - lo1, hi1 - x[..., 0], x[..., 1] - lo2, hi2 - x[..., 1]]
        )


def build_geometry(
    delta: float,
    mu: float = DEFAULT_MU,
    box=DEFAULT_BOX,
    *,
    delta0: float = DEFAULT_DELTA0,
    has_minus: bool = True,
) -> Geometry:
    """Validate parameters and return a :class:`Geometry`.

    Raises
    ------
    NonPositiveParameter
        ``delta <= 0`` or ``mu <= 0`` (or ``mu >= 1``, ``delta >= delta0``).
    GapTooWide
        ``delta >= mu``; the gap segment would be empty.
    MarginViolation
        A disk is closer than ``2*mu`` to the box boundary.
    """
    if not delta > 0 or not mu > 0:
        raise NonPositiveParameter(f"delta={delta!r} and mu={mu!r} must be positive")
    if mu >= 1:
        raise NonPositiveParameter(f"mu={mu!r} must lie in (0, 1)")
    if delta >= delta0:
        raise NonPositiveParameter(f"delta={delta!r} must be below delta0={delta0!r}")
    if has_minus and delta >= mu:
        raise GapTooWide(f"delta={delta!r} >= mu={mu!r}")
    box = tuple(float(v) for v in box)
    if len(box) != 4 or box[0] >= box[1] or box[2] >= box[3]:
        raise NonPositiveParameter(f"degenerate box {box!r}")
    g = Geometry(box=box, delta=float(delta), mu=float(mu), has_minus=has_minus)
    lo1, hi1, lo2, hi2 = box
    for c in g.centers():
        margin = min(c[0] - 1 - lo1, hi1 - c[0] - 1, c[1] - 1 - lo2, hi2 - c[1] - 1)
        if margin < 2 * mu - 1e-12:
            raise MarginViolation(
                f"disk centred at {c} is {margin:.6g} from the box boundary, "
                f"need at least 2*mu={2 * mu:.6g}"
            )
    return g


def classify(g: Geometry, x) -> RegionLabel:
    """Region of a single point, closed disks taking precedence."""
    x = np.asarray(x, dtype=float)
    if not bool(g.contains(x)):
        raise OutOfDomain(f"point {tuple(x)} lies outside the box {g.box}")
    if math.hypot(x[0] - g.center_plus[0], x[1] - g.center_plus[1]) <= g.radius:
        return RegionLabel.DiskPlus
    if g.has_minus and math.hypot(x[0] - g.center_minus[0], x[1] - g.center_minus[1]) <= g.radius:
        return RegionLabel.DiskMinus
    return RegionLabel.Exterior


def region_codes(g: Geometry, x1, x2) -> np.ndarray:
    """Vectorised classify: 1 for the upper disk, -1 for the lower, 0 outside."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    out = np.zeros(np.broadcast(x1, x2).shape, dtype=np.int8)
    out[np.hypot(x1, x2) <= g.radius] = 1
    if g.has_minus:
        cm = g.center_minus
        out[np.hypot(x1 - cm[0], x2 - cm[1]) <= g.radius] = -1
    return out


def gap_segment_halfwidth(g: Geometry) -> float:
    """Half-length of the longest centred horizontal segment on the midline
    lying within distance ``mu`` of both circles."""
    arg = (1.0 + g.mu) ** 2 - (1.0 + g.delta) ** 2
    if not arg > 0:
        raise GapTooWide(f"no gap segment: delta={g.delta!r}, mu={g.mu!r}")
    return math.sqrt(arg)


@dataclass(frozen=True)
class RegionMasks:
    """Per-node indicator arrays, shape ``(nx, ny)``."""

    interior: np.ndarray  # the set of points at distance >= mu from the box boundary
    w_plus: np.ndarray
    w_minus: np.ndarray
    e: np.ndarray
    s: np.ndarray
    c1: float


def region_masks(g: Geometry, grid: "Grid") -> RegionMasks:
    X1, X2 = grid.mesh()
    tol = _MEMBER_TOL * max(grid.h, 1.0)
    interior = g.dist_to_box_boundary(np.stack([X1, X2], axis=-1)) >= g.mu - tol
    mid = g.midline
    d_plus = np.abs(np.hypot(X1, X2) - 1.0)
    w_plus = (d_plus <= g.mu + tol) & (X2 >= mid - tol)
    if g.has_minus:
        cm = g.center_minus
        d_minus = np.abs(np.hypot(X1 - cm[0], X2 - cm[1]) - 1.0)
        w_minus = (d_minus <= g.mu + tol) & (X2 <= mid + tol)
        c1 = gap_segment_halfwidth(g)
        e = (np.abs(X1) <= c1 + tol) & (np.abs(X2 - mid) <= 0.5 * g.delta + tol)
        row = int(np.argmin(np.abs(grid.x2 - mid)))
        s = np.zeros_like(e)
        s[:, row] = e[:, row]
    else:
        w_minus = np.zeros_like(w_plus)
        c1 = float("nan")
        e = np.zeros_like(w_plus)
        s = np.zeros_like(w_plus)
    return RegionMasks(interior=interior, w_plus=w_plus, w_minus=w_minus, e=e, s=s, c1=c1)
