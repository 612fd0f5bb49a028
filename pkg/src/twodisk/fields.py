"""Derived nodal quantities: tangential and radial derivatives, their linear
combinations, the radial barrier profile and the comparison quantities."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .coefficient import SharpCoefficient, SmoothCoefficient
from .errors import OriginInRegion, SharpModeUnsupported
from .solver import ScalarField, VectorField, argmax_node


@dataclass(frozen=True)
class CombinationParams:
    alpha: float
    beta: float

    @property
    def is_unit(self) -> bool:
        return abs(self.alpha**2 + self.beta**2 - 1.0) <= 1e-12


@dataclass(frozen=True)
class ComparisonConstants:
    """Constants of the comparison quantities: ``A = C_scale * max kappa^{+-2K}``."""

    K: float
    C_scale: float
    A: float

    @classmethod
    def from_kappas(cls, kappa_plus: float, kappa_minus: float, K: float = 4.0, C_scale: float = 4.0):
        if not (K > 0 and C_scale >= 1):
            raise ValueError("need K > 0 and C_scale >= 1")
        big = max(kappa_plus ** (2 * K), kappa_plus ** (-2 * K), kappa_minus ** (2 * K), kappa_minus ** (-2 * K))
        return cls(K=float(K), C_scale=float(C_scale), A=float(C_scale * big))


def _offsets(grid, center):
    X1, X2 = grid.mesh()
    return X1 - center[0], X2 - center[1]


def tangential_T(grad: VectorField, center=(0.0, 0.0)) -> ScalarField:
    """``T = -x2 u_1 + x1 u_2`` about ``center``."""
    y1, y2 = _offsets(grad.grid, center)
    return ScalarField(grad.grid, -y2 * grad.v1 + y1 * grad.v2)


def nodal_coefficient(coeff, grid) -> np.ndarray:
    X1, X2 = grid.mesh()
    return coeff.values(X1, X2)


def radial_R(grad: VectorField, coeff, center=(0.0, 0.0)) -> ScalarField:
    """``R = a (x1 u_1 + x2 u_2)`` about ``center`` with the nodal coefficient."""
    y1, y2 = _offsets(grad.grid, center)
    a = nodal_coefficient(coeff, grad.grid)
    return ScalarField(grad.grid, a * (y1 * grad.v1 + y2 * grad.v2))


def combination(T: ScalarField, R: ScalarField, p: CombinationParams) -> ScalarField:
    if T.grid != R.grid:
        raise ValueError("T and R live on different grids")
    return ScalarField(T.grid, p.alpha * T.values + p.beta * R.values)


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 30, rel: float = 1e-12) -> float:
    """Adaptive Simpson quadrature with Richardson correction.

    A segment is accepted when its correction is below the absolute budget or
    below ``rel`` times the segment value; the second test keeps the
    recursion finite when ``tol`` is under the float resolution of the result.
    """

    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(lo, hi, fa, fm, fb, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, lo, mid)
        right = simpson(fm, frm, fb, mid, hi)
        diff = left + right - whole
        if depth >= max_depth or abs(diff) <= 15.0 * max(eps, rel * abs(left + right)):
            return left + right + diff / 15.0
        return recurse(lo, mid, fa, flm, fm, left, 0.5 * eps, depth + 1) + recurse(
            mid, hi, fm, frm, fb, right, 0.5 * eps, depth + 1
        )

    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass
class BarrierProfile:
    """Sampled radial barrier ``b(r)`` vanishing for ``r >= 1 + epsilon``.

    Variant ``PowerK`` has ``b' = 1 - a^K`` (inner conductivity at least 1),
    ``PowerNegK`` has ``b' = 1 - a^{-K}``.

    With ``integrand`` set, ``b(r)`` between samples is the next sample value
    above ``r`` plus Gauss-Legendre integration of ``-b'`` up to it, split at
    the collar edges; otherwise monotone cubic interpolation of the samples.
    """

    kappa: float
    epsilon: float
    K: float
    variant: str
    radii: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    coefficient: np.ndarray
    center: tuple[float, float] = (0.0, 0.0)
    integrand: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self._interp = PchipInterpolator(self.radii, self.values, extrapolate=True)

    @property
    def exponent(self) -> float:
        return self.K if self.variant == "PowerK" else -self.K

    def _completion(self, lo, hi):
        total = np.zeros(lo.shape)
        cuts = [1.0 - self.epsilon, 1.0 + self.epsilon]
        edges = [lo] + [np.clip(c, lo, hi) for c in cuts] + [hi]
        for a, b in zip(edges, edges[1:]):
            half = 0.5 * (b - a)
            if not np.any(half > 0):
                continue
            mid = 0.5 * (a + b)
            for xi, wi in zip(_GL_NODES, _GL_WEIGHTS):
                total += wi * half * self.integrand(mid + half * xi)
        return total

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        top = self.radii[-1]
        if self.integrand is None:
            out = np.where(r >= top, 0.0, self._interp(np.minimum(r, top)))
            return np.maximum(out, 0.0)
        flat = np.minimum(r.ravel(), top)
        i = np.minimum(np.searchsorted(self.radii, flat, side="left"), len(self.radii) - 1)
        out = self.values[i] + self._completion(flat, self.radii[i])
        return np.maximum(out, 0.0).reshape(r.shape)


def barrier_b(
    coeff: SmoothCoefficient,
    K: float,
    which_disk: str = "plus",
    *,
    n_samples: int = 512,
    tol: float = 1e-10,
) -> BarrierProfile:
    """Barrier profile sampled on ``[1 - mu - eps, 1 + eps]``.

    ``b(r) = int_r^{1+eps} (a(s)^{+-K} - 1) ds`` is accumulated from the outer
    edge inward, one adaptive Simpson integral per sample interval.
    """
    if not isinstance(coeff, SmoothCoefficient):
        raise SharpModeUnsupported("the barrier is defined for the mollified coefficient only")
    if not K > 0:
        raise ValueError("K must be positive")
    base = coeff.base
    g = base.geometry
    kappa = base.kappa_plus if which_disk == "plus" else base.kappa_minus
    center = g.center_plus if which_disk == "plus" else g.center_minus
    variant = "PowerK" if kappa >= 1 else "PowerNegK"
    power = K if variant == "PowerK" else -K
    eps = coeff.epsilon

    def integrand(s):
        return coeff.radial(s, kappa)[0] ** power - 1.0

    radii = np.linspace(1.0 - g.mu - eps, 1.0 + eps, n_samples)
    radii[-1] = 1.0 + eps
    # split at the inner collar edge so the constant part is integrated exactly
    pieces = np.zeros(n_samples)
    per = tol / n_samples
    for i in range(n_samples - 1, 0, -1):
        lo, hi = radii[i - 1], radii[i]
        edge = 1.0 - eps
        if lo < edge < hi:
            pieces[i - 1] = adaptive_simpson(integrand, lo, edge, per) + adaptive_simpson(integrand, edge, hi, per)
        else:
            pieces[i - 1] = adaptive_simpson(integrand, lo, hi, per)
    values = np.concatenate([np.cumsum(pieces[::-1][1:])[::-1], [0.0]])
    a = coeff.radial(radii, kappa)[0]
    slopes = 1.0 - a**power
    return BarrierProfile(kappa, eps, float(K), variant, radii, values, slopes, a, center, integrand)


def quantity_M(u: ScalarField, grad: VectorField, A: float) -> ScalarField:
    """``M = |grad u|^2 + A u^2``."""
    return ScalarField(u.grid, grad.v1**2 + grad.v2**2 + A * u.values**2)


def quantity_N(
    u: ScalarField,
    T: ScalarField,
    R: ScalarField,
    p: CombinationParams,
    b: BarrierProfile,
    A: float,
    support: np.ndarray,
    center=(0.0, 0.0),
) -> ScalarField:
    """``N = (alpha T + beta R)^2 / |x|^2 * (1 + b) + A u^2`` on ``support``.

    Values off the support are set to zero and ``support`` is attached to
    the returned field.
    """
    if not p.is_unit:
        raise ValueError(f"(alpha, beta)=({p.alpha}, {p.beta}) is not a unit pair")
    y1, y2 = _offsets(u.grid, center)
    r2 = y1 * y1 + y2 * y2
    if np.any(r2[support] < 1e-12):
        raise OriginInRegion("the region contains the disk centre")
    comb = p.alpha * T.values + p.beta * R.values
    vals = np.zeros(u.grid.shape)
    r2s = r2[support]
    vals[support] = comb[support] ** 2 / r2s * (1.0 + b(np.sqrt(r2s))) + A * u.values[support] ** 2
    return ScalarField(u.grid, vals, support=support)


def select_alpha_beta(
    M: ScalarField,
    T: ScalarField,
    R: ScalarField,
    grad: VectorField,
    region: np.ndarray,
    center=(0.0, 0.0),
) -> tuple[CombinationParams, tuple[int, int]]:
    """Unit pair reproducing ``|grad u(p)|`` at the maximiser ``p`` of ``M``
    over ``region``, where ``T`` and ``R`` form an orthogonal decomposition."""
    idx = argmax_node(M.values, region)
    y1, y2 = _offsets(M.grid, center)
    rp = math.hypot(y1[idx], y2[idx])
    gp = math.hypot(grad.v1[idx], grad.v2[idx])
    if gp < 1e-12 or rp == 0:
        return CombinationParams(1.0, 0.0), idx
    alpha = T.values[idx] / (rp * gp)
    beta = R.values[idx] / (rp * gp)
    norm = math.hypot(alpha, beta)
    return CombinationParams(alpha / norm, beta / norm), idx
