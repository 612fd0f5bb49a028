"""Conductivity fields: the sharp three-valued coefficient, its radial
mollification, and exact harmonic face averages for assembly."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CollarsOverlap, OutOfDomain
from .geometry import Geometry, region_codes


@dataclass(frozen=True)
class SharpCoefficient:
    geometry: Geometry
    kappa_plus: float
    kappa_minus: float = 1.0

    def __post_init__(self):
        if not (self.kappa_plus > 0 and self.kappa_minus > 0):
            raise ValueError("conductivities must be positive")

    def values(self, x1, x2) -> np.ndarray:
        code = region_codes(self.geometry, x1, x2)
        out = np.ones(code.shape)
        out[code == 1] = self.kappa_plus
        out[code == -1] = self.kappa_minus
        return out

    def disks(self) -> list[tuple[tuple[float, float], float]]:
        g = self.geometry
        out = [(g.center_plus, self.kappa_plus)]
        if g.has_minus:
            out.append((g.center_minus, self.kappa_minus))
        return out


def eval_sharp(c: SharpCoefficient, x) -> float:
    x = np.asarray(x, dtype=float)
    if not bool(c.geometry.contains(x)):
        raise OutOfDomain(f"point {tuple(x)} lies outside the box {c.geometry.box}")
    return float(c.values(x[0], x[1]))


# Collar profiles.  Each maps t = (r - 1)/eps in [-1, 1] to a weight falling
# monotonically from 1 (inside) to 0 (outside), with zero slope at both ends.
def _cosine(t):
    t = np.clip(t, -1.0, 1.0)
    return 0.5 * (1.0 - np.sin(0.5 * np.pi * t)), -0.25 * np.pi * np.cos(0.5 * np.pi * t)


def _smoothstep(t):
    s = 0.5 * (1.0 - np.clip(t, -1.0, 1.0))
    return s * s * (3.0 - 2.0 * s), -3.0 * s * (1.0 - s)


PROFILES = {"cosine": _cosine, "smoothstep": _smoothstep}


@dataclass(frozen=True)
class SmoothCoefficient:
    """Radially mollified coefficient.

    Inside the collar ``|r - 1| < epsilon`` around each circle the value is
    ``1 + (kappa - 1) * w((r - 1)/epsilon)`` with ``w`` the chosen profile;
    elsewhere it coincides with the sharp coefficient.
    """

    base: SharpCoefficient
    epsilon: float
    profile: str = "cosine"

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; choose from {sorted(PROFILES)}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        g = self.base.geometry
        if g.has_minus and self.epsilon >= 0.25 * g.delta:
            raise CollarsOverlap(
                f"epsilon={self.epsilon!r} must be below delta/4={0.25 * g.delta!r}"
            )

    @property
    def geometry(self) -> Geometry:
        return self.base.geometry

    def radial(self, r, kappa: float):
        """Value and radial derivative of the collar profile at radius ``r``."""
        w, dw = PROFILES[self.profile]((np.asarray(r, dtype=float) - 1.0) / self.epsilon)
        inside = np.abs(np.asarray(r) - 1.0) < self.epsilon
        return 1.0 + (kappa - 1.0) * w, np.where(inside, (kappa - 1.0) * dw / self.epsilon, 0.0)

    def evaluate(self, x1, x2):
        """Value and gradient arrays ``(a, a_1, a_2)``."""
        x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
        a = np.ones(x1.shape)
        g1 = np.zeros_like(a)
        g2 = np.zeros_like(a)
        for (cx, cy), kappa in self.base.disks():
            d1, d2 = x1 - cx, x2 - cy
            r = np.hypot(d1, d2)
            near = r < 1.0 + self.epsilon
            if not np.any(near):
                continue
            val, dval = self.radial(r[near], kappa)
            a[near] = val
            rs = r[near]
            safe = np.where(rs > 0, rs, 1.0)
            g1[near] = dval * d1[near] / safe
            g2[near] = dval * d2[near] / safe
        return a, g1, g2

    def values(self, x1, x2) -> np.ndarray:
        return self.evaluate(x1, x2)[0]


def eval_smooth(c: SmoothCoefficient, x):
    """Value and analytic gradient of the mollified coefficient at one point."""
    x = np.asarray(x, dtype=float)
    if not bool(c.geometry.contains(x)):
        raise OutOfDomain(f"point {tuple(x)} lies outside the box {c.geometry.box}")
    a, g1, g2 = c.evaluate(x[0], x[1])
    return float(a), np.array([float(g1), float(g2)])


def _overlap(lo, hi, half):
    return np.clip(np.minimum(hi, half) - np.maximum(lo, -half), 0.0, None)


def _chord_lengths(c: SharpCoefficient, along_lo, along_hi, across, horizontal: bool):
    """Length of an axis-aligned segment inside each disk.

    ``along_*`` are the segment end coordinates along its axis, ``across``
    the fixed transverse coordinate.  Returns a list of ``(length, kappa)``.
    """
    out = []
    for (cx, cy), kappa in c.disks():
        ca, cb = (cx, cy) if horizontal else (cy, cx)
        off = across - cb
        half = np.sqrt(np.clip(1.0 - off * off, 0.0, None))
        length = np.where(np.abs(off) < 1.0, _overlap(along_lo - ca, along_hi - ca, half), 0.0)
        out.append((length, kappa))
    return out


def edge_harmonic_mean(c: SharpCoefficient, p, q) -> float:
    """Exact harmonic mean of the sharp coefficient along segment ``pq``.

    The segment must be axis aligned.  Returns ``|pq| / integral(1/a ds)``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p[1] == q[1]:
        horizontal, lo, hi, across = True, min(p[0], q[0]), max(p[0], q[0]), p[1]
    elif p[0] == q[0]:
        horizontal, lo, hi, across = False, min(p[1], q[1]), max(p[1], q[1]), p[0]
    else:
        raise ValueError("segment must be axis aligned")
    h = hi - lo
    if h == 0:
        return eval_sharp(c, p)
    inv = h
    for length, kappa in _chord_lengths(c, lo, hi, across, horizontal):
        inv += float(length) * (1.0 / kappa - 1.0)
    return h / inv


def face_coefficients(c, grid, quadrature: int = 16):
    """Face coefficients for the 5-point flux stencil.

    Returns ``(ax, ay)`` with shapes ``(nx-1, ny)`` and ``(nx, ny-1)``.  For a
    :class:`SharpCoefficient` the value on a face is the line-integral
    harmonic mean along the grid edge, averaged with ``quadrature``
    Gauss-Legendre points over lines parallel to the edge spanning the dual
    cell face; ``quadrature=1`` uses the single edge only.  For a
    :class:`SmoothCoefficient` the coefficient is sampled at the edge midpoint.
    """
    x1, x2 = grid.x1, grid.x2
    h = grid.h
    xm = 0.5 * (x1[:-1] + x1[1:])
    ym = 0.5 * (x2[:-1] + x2[1:])
    if isinstance(c, SmoothCoefficient):
        ax = c.values(xm[:, None], x2[None, :])
        ay = c.values(x1[:, None], ym[None, :])
        return ax, ay
    ax = c.values(xm[:, None], x2[None, :])
    ay = c.values(x1[:, None], ym[None, :])
    nodes, weights = np.polynomial.legendre.leggauss(int(quadrature))
    for arr, horizontal in ((ax, True), (ay, False)):
        mid_a, mid_b = (xm[:, None], x2[None, :]) if horizontal else (x1[:, None], ym[None, :])
        mid_a, mid_b = np.broadcast_arrays(mid_a, mid_b)
        band = np.zeros(arr.shape, dtype=bool)
        for (cx, cy), _ in c.disks():
            band |= np.abs(np.hypot(mid_a - cx, mid_b - cy) - 1.0) <= h
        if not np.any(band):
            continue
        if horizontal:
            along, across = mid_a[band], mid_b[band]
        else:
            along, across = mid_b[band], mid_a[band]
        acc = np.zeros(along.shape)
        for xi, wi in zip(nodes, weights):
            line = across + 0.5 * h * xi
            inv = np.full(along.shape, h)
            for length, kappa in _chord_lengths(c, along - 0.5 * h, along + 0.5 * h, line, horizontal):
                inv += length * (1.0 / kappa - 1.0)
            acc += 0.5 * wi * h / inv
        arr[band] = acc
    return ax, ay


def coefficient_min(c) -> float:
    base = c.base if isinstance(c, SmoothCoefficient) else c
    return min(1.0, base.kappa_plus, base.kappa_minus if base.geometry.has_minus else 1.0)


def kappa_of(c, which: str = "plus") -> float:
    base = c.base if isinstance(c, SmoothCoefficient) else c
    return base.kappa_plus if which == "plus" else base.kappa_minus


__all__ = [
    "SharpCoefficient",
    "SmoothCoefficient",
    "PROFILES",
    "eval_sharp",
    "eval_smooth",
    "edge_harmonic_mean",
    "face_coefficients",
    "coefficient_min",
    "kappa_of",
]

