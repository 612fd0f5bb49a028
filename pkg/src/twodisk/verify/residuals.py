"""Finite-difference residuals of the derivative identities satisfied by the
tangential and radial quantities, evaluated on closed-form families."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import UnresolvedAnnulus, UnresolvedShell
from .families import AnalyticFamily

DEFAULT_SPACINGS = (2.0**-7, 2.0**-8, 2.0**-9)
COMBINATION_PAIRS = ((1.0, 0.0), (0.0, 1.0), (0.6, 0.8))
_LATTICE = 2.0**-14


@dataclass
class ResidualReport:
    identity: str
    spacings: list[float]
    residuals: list[float]
    order: float = float("nan")
    family: str = ""
    fields: dict = field(default_factory=dict, repr=False)

    def as_row(self) -> dict:
        row = {"family": self.family, "identity": self.identity, "order": self.order}
        for i, (h, r) in enumerate(zip(self.spacings, self.residuals)):
            row[f"h{i}"] = h
            row[f"residual{i}"] = r
        return row


def fit_order(spacings, residuals) -> float:
    """Least-squares slope of log(residual) against log(h)."""
    h = np.asarray(spacings, dtype=float)
    r = np.asarray(residuals, dtype=float)
    if len(h) < 3 or np.any(r <= 0) or not np.all(np.isfinite(r)):
        return float("nan")
    return float(np.polyfit(np.log(h), np.log(r), 1)[0])


def sample_cloud(fam: AnalyticFamily, n: int, seed: int = 0, margin: float = 0.0) -> np.ndarray:
    """Random points in the annulus/shell, snapped to a dyadic lattice so that
    shifts by dyadic spacings are exact in floating point."""
    rng = np.random.default_rng(seed)
    lo, hi = fam.annulus
    lo, hi = lo + margin, hi - margin
    d = fam.dimension
    direction = rng.normal(size=(n, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = rng.uniform(lo, hi, size=n)
    x = np.round(direction * r[:, None] / _LATTICE) * _LATTICE
    rr = np.linalg.norm(x, axis=1)
    return x[(rr >= lo) & (rr <= hi)]


def _fd(f, x, h):
    """Value, centred gradient and centred Laplacian of ``f`` at ``x``."""
    n, d = x.shape
    f0 = f(x)
    grad = np.empty((n, d))
    lap = np.zeros(n)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        fp, fm = f(x + e), f(x - e)
        grad[:, i] = (fp - fm) / (2 * h)
        lap += (fp - 2 * f0 + fm) / (h * h)
    return f0, grad, lap


def _resolve(fam: AnalyticFamily, spacings, err):
    lo, hi = fam.annulus
    hmax = max(spacings)
    if lo - 2 * hmax <= 0 or hi - lo <= 8 * hmax:
        raise err(f"spacing {hmax!r} does not resolve {fam.annulus!r}")


def _tangential(fam, j=0, k=1):
    def T(x):
        g = fam.grad_u(x)
        return -x[:, k] * g[:, j] + x[:, j] * g[:, k]

    return T


def _radial(fam):
    def R(x):
        return fam.a(x) * np.sum(x * fam.grad_u(x), axis=1)

    return R


def _family_tag(fam: AnalyticFamily) -> str:
    return f"{fam.dimension}d:p={fam.p:g}"


def _reports(names, per_spacing, spacings, fam):
    out = []
    for name in names:
        res = [float(np.max(np.abs(level[name]))) for level in per_spacing]
        out.append(
            ResidualReport(
                identity=name,
                spacings=list(spacings),
                residuals=res,
                order=fit_order(spacings, res),
                family=_family_tag(fam),
                fields={"finest": per_spacing[-1][name]},
            )
        )
    return out


def lemma_residuals_2d(
    fam: AnalyticFamily, spacings=DEFAULT_SPACINGS, *, n_points: int = 2000, seed: int = 0
) -> list[ResidualReport]:
    """Residuals of the planar identities on a sample cloud.

    Reported identities: the tangential and radial equations, the two
    flux-pairing relations, and the equation for ``alpha T + beta R`` at each
    pair in ``COMBINATION_PAIRS`` (multiplied through by ``a`` so that the
    ``(1, 0)`` and ``(0, 1)`` cases coincide with the first two).
    """
    if fam.dimension != 2:
        raise ValueError("lemma_residuals_2d needs a planar family")
    _resolve(fam, spacings, UnresolvedAnnulus)
    x = sample_cloud(fam, n_points, seed, margin=2 * max(spacings))
    T, R = _tangential(fam), _radial(fam)
    per = []
    for h in spacings:
        a, ag, _ = _fd(fam.a, x, h)
        t, tg, tl = _fd(T, x, h)
        r, rg, rl = _fd(R, x, h)
        a1, a2 = ag[:, 0], ag[:, 1]
        level = {
            "tangential_equation": a * tl + a1 * tg[:, 0] + a2 * tg[:, 1],
            "radial_equation": a * rl - a1 * rg[:, 0] - a2 * rg[:, 1],
            "flux_pairing_radial": a1 * rg[:, 0] + a2 * rg[:, 1] - a * (a2 * tg[:, 0] - a1 * tg[:, 1]),
            "flux_pairing_tangential": a * (a1 * tg[:, 0] + a2 * tg[:, 1]) + a2 * rg[:, 0] - a1 * rg[:, 1],
        }
        for al, be in COMBINATION_PAIRS:
            # the stencils are linear, so differentiate T and R separately
            wg = al * tg + be * rg
            wl = al * tl + be * rl
            den = be * be * a * a + al * al
            c1 = (be * be * a * a - al * al) / den
            c2 = 2 * al * be / den
            rhs = c1 * (a1 * wg[:, 0] + a2 * wg[:, 1]) / a + c2 * (a2 * wg[:, 0] - a1 * wg[:, 1])
            level[f"combination[{al:g},{be:g}]"] = a * (wl - rhs)
        per.append(level)
    return _reports(list(per[0]), per, spacings, fam)


def _nd_level(fam, x, h):
    n = fam.dimension
    a, ag, _ = _fd(fam.a, x, h)
    ug = fam.grad_u(x)
    r, rg, rl = _fd(_radial(fam), x, h)
    rad = np.linalg.norm(x, axis=1)
    a_prime = np.sum(ag * x, axis=1) / rad
    tfd = {}
    for j, k in itertools.permutations(range(n), 2):
        tfd[(j, k)] = _fd(_tangential(fam, j, k), x, h)
    level = {}
    for j, k in itertools.permutations(range(n), 2):
        _, tg, tl = tfd[(j, k)]
        level[f"nd_tangential[{j + 1},{k + 1}]"] = a * tl + np.sum(ag * tg, axis=1)
        level[f"nd_flux_pairing[{j + 1},{k + 1}]"] = -ag[:, k] * rg[:, j] + ag[:, j] * rg[:, k] - a * np.sum(ag * tg, axis=1)
    level["nd_radial"] = a * rl - np.sum(ag * rg, axis=1) - (n - 2) * a * np.sum(ag * ug, axis=1)
    cross = np.zeros(len(x))
    for j, k in itertools.permutations(range(n), 2):
        tg = tfd[(j, k)][1]
        cross += ag[:, k] * tg[:, j] - ag[:, j] * tg[:, k]
    level["nd_flux_sum"] = np.sum(ag * rg, axis=1) + (n - 2) * a_prime * r / rad - 0.5 * a * cross
    return level


def identity_residuals_nd(
    fam: AnalyticFamily,
    spacings=DEFAULT_SPACINGS,
    *,
    n_points: int = 2000,
    seed: int = 0,
    include_reversed: bool = False,
) -> list[ResidualReport]:
    """Residuals of the higher-dimensional identities for every pair ``j < k``
    (and ``j > k`` when ``include_reversed``)."""
    if fam.dimension < 3:
        raise ValueError("identity_residuals_nd needs a family of dimension >= 3")
    _resolve(fam, spacings, UnresolvedShell)
    if n_points > 100_000:
        raise ValueError("sample clouds are capped at 1e5 points")
    x = sample_cloud(fam, n_points, seed, margin=2 * max(spacings))
    per = [_nd_level(fam, x, h) for h in spacings]
    names = []
    for name in per[0]:
        if "[" in name and not include_reversed:
            j, k = (int(v) for v in name[name.index("[") + 1 : -1].split(","))
            if j > k:
                continue
        names.append(name)
    return _reports(names, per, spacings, fam)


def specialisation_gap(reports: list[ResidualReport]) -> dict:
    """Pointwise distance between the combination residual at ``(1,0)``/``(0,1)``
    and the tangential/radial equation residuals at the finest spacing."""
    by = {r.identity: r.fields["finest"] for r in reports}
    return {
        "tangential": float(np.max(np.abs(by["combination[1,0]"] - by["tangential_equation"]))),
        "radial": float(np.max(np.abs(by["combination[0,1]"] - by["radial_equation"]))),
    }


