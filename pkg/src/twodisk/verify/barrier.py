"""Invariant checks for the sampled barrier profile."""
from __future__ import annotations

import numpy as np

from ..coefficient import SmoothCoefficient
from ..fields import BarrierProfile


def barrier_reference(coeff: SmoothCoefficient, K: float, radii, which_disk: str = "plus", n: int = 10_000) -> np.ndarray:
    """Barrier values by fixed composite Simpson quadrature with ``n``
    intervals on each smooth piece of ``[r, 1 + eps]``."""
    base = coeff.base
    kappa = base.kappa_plus if which_disk == "plus" else base.kappa_minus
    power = K if kappa >= 1 else -K
    eps = coeff.epsilon
    if n % 2:
        n += 1

    def simpson(lo, hi):
        if hi <= lo:
            return 0.0
        s = np.linspace(lo, hi, n + 1)
        f = coeff.radial(s, kappa)[0] ** power - 1.0
        return (hi - lo) / (3 * n) * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())

    out = []
    for r in np.asarray(radii, dtype=float):
        edge = 1.0 - eps
        if r < edge:
            out.append(simpson(r, edge) + simpson(edge, 1.0 + eps))
        else:
            out.append(simpson(r, 1.0 + eps))
    return np.array(out)


def barrier_invariants(profile: BarrierProfile, reference=None) -> dict:
    """Boolean checks over every sample of the profile, plus the largest
    disagreement with ``reference`` when given."""
    b = profile.values
    slope = profile.slopes
    bound_slope = profile.coefficient ** profile.exponent
    out = {
        "zero_at_outer_edge": bool(b[-1] == 0.0 and profile.radii[-1] == 1.0 + profile.epsilon),
        "nonnegative": bool(np.all(b >= 0.0)),
        "slope_nonpositive": bool(np.all(slope <= 0.0)),
        "nonincreasing": bool(np.all(np.diff(b) <= 0.0)),
        "slope_bound": bool(np.all(np.abs(slope) <= bound_slope)),
        "value_bound": bool(np.all(b <= profile.kappa ** profile.exponent)),
        "vanishes_outside": bool(np.all(profile(np.linspace(1.0 + profile.epsilon, 2.0, 101)) == 0.0)),
    }
    if reference is not None:
        out["max_reference_diff"] = float(np.max(np.abs(b - reference)))
    return out


def profile_rows(profile: BarrierProfile) -> list[dict]:
    return [
        {"radius": float(r), "b": float(v), "slope": float(s), "a": float(a)}
        for r, v, s, a in zip(profile.radii, profile.values, profile.slopes, profile.coefficient)
    ]
