"""Closed-form solutions of ``(a u_i)_i = 0`` with power-law radial
coefficients, used as exact test functions for the derivative identities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AnalyticFamily:
    """``a = r^p`` and ``u = r^(s-1) (c . x)`` on an annulus (2D) or shell (3D).

    In dimension ``n`` the exponent solves ``s^2 + (n - 2 + p) s - (n - 1) = 0``,
    which for ``n = 2`` reads ``s^2 + p s - 1 = 0``.  The direction ``c`` is
    ``e_1`` in the plane; in 3D it is tilted off the axes so that no rotation
    generator annihilates ``u``.
    """

    dimension: int
    p: float
    s: float
    annulus: tuple[float, float]
    direction: tuple[float, ...] = ()

    @property
    def c(self) -> np.ndarray:
        if self.direction:
            return np.asarray(self.direction, dtype=float)
        c = np.zeros(self.dimension)
        c[0] = 1.0
        return c

    def _r(self, x):
        return np.sqrt(np.sum(x * x, axis=-1))

    def u(self, x):
        x = np.asarray(x, dtype=float)
        return self._r(x) ** (self.s - 1.0) * (x @ self.c)

    def grad_u(self, x):
        x = np.asarray(x, dtype=float)
        r = self._r(x)[..., None]
        s = self.s
        cx = (x @ self.c)[..., None]
        return (s - 1.0) * r ** (s - 3.0) * cx * x + r ** (s - 1.0) * self.c

    def hess_u(self, x):
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        r = self._r(x)[..., None, None]
        s = self.s
        c = self.c
        cx = (x @ c)[..., None, None]
        xx = x[..., :, None] * x[..., None, :]
        sym = x[..., :, None] * c[None, :] + c[:, None] * x[..., None, :]
        return (s - 1.0) * (s - 3.0) * r ** (s - 5.0) * xx * cx + (s - 1.0) * r ** (s - 3.0) * (np.eye(n) * cx + sym)

    def a(self, x):
        x = np.asarray(x, dtype=float)
        return self._r(x) ** self.p

    def grad_a(self, x):
        x = np.asarray(x, dtype=float)
        r = self._r(x)[..., None]
        return self.p * r ** (self.p - 2.0) * x

    def hess_a(self, x):
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        r = self._r(x)[..., None, None]
        xx = x[..., :, None] * x[..., None, :]
        return self.p * (self.p - 2.0) * r ** (self.p - 4.0) * xx + self.p * r ** (self.p - 2.0) * np.eye(n)


def _check_annulus(annulus):
    lo, hi = (float(v) for v in annulus)
    if not 0 < lo < hi:
        raise ValueError(f"annulus {annulus!r} must satisfy 0 < r_lo < r_hi")
    return (lo, hi)


def analytic_family_2d(p: float, annulus=(0.5, 1.5)) -> AnalyticFamily:
    s = 0.5 * (-p + math.sqrt(p * p + 4.0))
    return AnalyticFamily(2, float(p), s, _check_annulus(annulus))


def analytic_family_3d(p: float, shell=(0.5, 1.5), direction=(1.0, 0.5, 0.25)) -> AnalyticFamily:
    q = 1.0 + p
    s = 0.5 * (-q + math.sqrt(q * q + 8.0))
    return AnalyticFamily(3, float(p), s, _check_annulus(shell), tuple(float(v) for v in direction))
