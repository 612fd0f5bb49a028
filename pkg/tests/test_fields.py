import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from twodisk.coefficient import SharpCoefficient, SmoothCoefficient
from twodisk.errors import OriginInRegion, SharpModeUnsupported
from twodisk.fields import (
    CombinationParams,
    ComparisonConstants,
    adaptive_simpson,
    barrier_b,
    combination,
    quantity_M,
    quantity_N,
    radial_R,
    select_alpha_beta,
    tangential_T,
)
from twodisk.geometry import build_geometry, region_masks
from twodisk.solver import ScalarField, VectorField, build_grid

G = build_geometry(0.1)
GRID = build_grid((-2, 2, -2, 2), 0.125)
X1, X2 = GRID.mesh()
ONE = SharpCoefficient(build_geometry(0.1, box=(-2, 2, -2, 2), has_minus=False), 1.0)


def vec(v1, v2):
    return VectorField(GRID, np.broadcast_to(v1, GRID.shape).copy(), np.broadcast_to(v2, GRID.shape).copy())


def test_tangential_examples():
    assert np.array_equal(tangential_T(vec(1.0, 0.0)).values, -X2)
    assert np.array_equal(tangential_T(vec(0.0, 1.0)).values, X1)
    assert np.max(np.abs(tangential_T(vec(X1, X2)).values)) == 0.0


def test_radial_examples():
    assert np.array_equal(radial_R(vec(1.0, 0.0), ONE).values, X1)
    c = SharpCoefficient(build_geometry(0.1, box=(-2, 2, -2, 2), has_minus=False), 5.0)
    R = radial_R(vec(0.0, 1.0), c).values
    inside = np.hypot(X1, X2) <= 1  # closed-disk convention
    assert np.array_equal(R[inside], 5 * X2[inside])
    assert np.array_equal(R[~inside], X2[~inside])


def test_combination_examples():
    T, R = tangential_T(vec(1.0, 0.0)), radial_R(vec(1.0, 0.0), ONE)
    assert np.array_equal(combination(T, R, CombinationParams(1, 0)).values, T.values)
    assert np.array_equal(combination(T, R, CombinationParams(0, 1)).values, R.values)
    s = 1 / math.sqrt(2)
    assert np.allclose(combination(T, R, CombinationParams(s, s)).values, (X1 - X2) * s, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.2, 5))
def test_orthogonal_decomposition(g1, g2, kappa):
    c = SharpCoefficient(build_geometry(0.1, box=(-2, 2, -2, 2), has_minus=False), kappa)
    grad = vec(g1, g2)
    T = tangential_T(grad).values
    R = radial_R(grad, c).values
    a = c.values(X1, X2)
    lhs = T**2 + (R / a) ** 2
    rhs = (X1**2 + X2**2) * (g1**2 + g2**2)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_quantity_M_examples():
    zero = ScalarField(GRID, np.zeros(GRID.shape))
    assert np.all(quantity_M(zero, vec(0.0, 0.0), 7.0).values == 0)
    M = quantity_M(ScalarField(GRID, X1), vec(1.0, 0.0), 1.0)
    assert np.allclose(M.values, 1 + X1**2, rtol=0, atol=1e-15)
    rng = np.random.default_rng(0)
    M = quantity_M(ScalarField(GRID, rng.normal(size=GRID.shape)), vec(rng.normal(size=GRID.shape), 0.0), 3.0)
    assert M.values.min() >= 0


def test_comparison_constants():
    c = ComparisonConstants.from_kappas(5.0, 0.2, K=2, C_scale=4)
    assert c.A == pytest.approx(4 * 5**4)
    assert ComparisonConstants.from_kappas(1.0, 1.0).A == 4.0


@pytest.fixture(scope="module")
def smooth5():
    return SmoothCoefficient(SharpCoefficient(G, 5.0, 0.2), G.delta / 8)


def test_barrier_examples(smooth5):
    eps = smooth5.epsilon
    b = barrier_b(smooth5, 4.0)
    assert b.variant == "PowerK" and len(b.radii) == 512
    assert b(1 + eps) == 0.0 and b.values[-1] == 0.0
    assert b(1 + 2 * eps) == 0.0
    inner = float(b(1 - eps))
    assert 0 < inner <= 2 * eps * (5**4 - 1)
    ref, _ = quad(lambda s: smooth5.radial(s, 5.0)[0] ** 4 - 1, 1 - eps, 1 + eps, epsabs=1e-13, epsrel=1e-13)
    assert inner == pytest.approx(ref, abs=1e-8)


def test_barrier_minus_variant(smooth5):
    b = barrier_b(smooth5, 2.0, "minus")
    assert b.variant == "PowerNegK" and b.exponent == -2.0
    assert b.center == G.center_minus
    assert np.all(np.diff(b.values) <= 0) and b.values.min() >= 0


def test_barrier_sharp_unsupported():
    with pytest.raises(SharpModeUnsupported):
        barrier_b(SharpCoefficient(G, 5.0, 5.0), 4.0)


def test_adaptive_simpson():
    assert adaptive_simpson(math.sin, 0, math.pi, 1e-12) == pytest.approx(2.0, abs=1e-11)
    assert adaptive_simpson(lambda x: x**3, 0, 2, 1e-12) == pytest.approx(4.0, abs=1e-13)


def _quantity_n_setup(smooth5):
    grid = build_grid((-2, 2, -4.5, 1.5), 1 / 32)
    x1, x2 = grid.mesh()
    masks = region_masks(G, grid)
    rng = np.random.default_rng(3)
    grad = VectorField(grid, rng.normal(size=grid.shape), rng.normal(size=grid.shape))
    u = ScalarField(grid, rng.uniform(-1, 1, grid.shape))
    T = tangential_T(grad)
    R = radial_R(grad, smooth5)
    return grid, masks, grad, u, T, R


def test_N_below_M_on_E(smooth5):
    grid, masks, grad, u, T, R = _quantity_n_setup(smooth5)
    b = barrier_b(smooth5, 4.0)
    A = 10.0
    M = quantity_M(u, grad, A)
    for theta in np.linspace(0, 2 * np.pi, 13):
        p = CombinationParams(math.cos(theta), math.sin(theta))
        N = quantity_N(u, T, R, p, b, A, masks.w_plus)
        on_e = masks.e & masks.w_plus
        assert np.all(N.values[on_e] <= M.values[on_e] + 1e-12)


def test_N_zero_field_and_barrier_monotone(smooth5):
    grid, masks, grad, u, T, R = _quantity_n_setup(smooth5)
    b = barrier_b(smooth5, 4.0)
    p = CombinationParams(0.6, 0.8)
    zero = ScalarField(grid, np.zeros(grid.shape))
    Tz = ScalarField(grid, np.zeros(grid.shape))
    assert np.all(quantity_N(zero, Tz, Tz, p, b, 5.0, masks.w_plus).values == 0)
    with_b = quantity_N(u, T, R, p, b, 5.0, masks.w_plus).values
    flat = type(b)(b.kappa, b.epsilon, b.K, b.variant, b.radii, np.zeros_like(b.values), b.slopes, b.coefficient)
    without = quantity_N(u, T, R, p, flat, 5.0, masks.w_plus).values
    x1, x2 = grid.mesh()
    positive = masks.w_plus & (b(np.hypot(x1, x2)) > 0) & (combination(T, R, p).values != 0)
    assert positive.any()
    assert np.all(with_b[positive] > without[positive])


def test_N_rejects_origin(smooth5):
    grid, masks, grad, u, T, R = _quantity_n_setup(smooth5)
    b = barrier_b(smooth5, 4.0)
    x1, x2 = grid.mesh()
    with pytest.raises(OriginInRegion):
        quantity_N(u, T, R, CombinationParams(1, 0), b, 1.0, np.hypot(x1, x2) < 0.1)


def test_select_alpha_beta_reproduces_gradient(smooth5):
    grid, masks, grad, u, T, R = _quantity_n_setup(smooth5)
    M = quantity_M(u, grad, 1.0)
    p, idx = select_alpha_beta(M, T, R, grad, masks.e)
    assert p.is_unit
    x1, x2 = grid.mesh()
    comb = p.alpha * T.values[idx] + p.beta * R.values[idx]
    # E nodes have a = 1, so the pair recovers |x| |grad u| exactly
    assert comb == pytest.approx(math.hypot(x1[idx], x2[idx]) * math.hypot(grad.v1[idx], grad.v2[idx]), rel=1e-12)


def test_select_alpha_beta_degenerate(smooth5):
    grid, masks, grad, u, T, R = _quantity_n_setup(smooth5)
    zero = VectorField(grid, np.zeros(grid.shape), np.zeros(grid.shape))
    M = quantity_M(u, zero, 1.0)
    p, _ = select_alpha_beta(M, T, R, zero, masks.e)
    assert (p.alpha, p.beta) == (1.0, 0.0)


@pytest.mark.parametrize("kappa,K", [(0.2, 2.0), (0.2, 6.0), (5.0, 2.0), (5.0, 6.0)])
def test_barrier_between_samples_matches_quadrature(kappa, K):
    c = SmoothCoefficient(SharpCoefficient(G, kappa, kappa), G.delta / 8)
    b = barrier_b(c, K)
    eps = c.epsilon
    rng = np.random.default_rng(5)
    for r in rng.uniform(b.radii[0], b.radii[-1], 40):
        ref, _ = quad(
            lambda s: c.radial(s, kappa)[0] ** b.exponent - 1, r, 1 + eps, points=[1 - eps, 1], epsabs=1e-13, limit=200
        )
        assert float(b(r)) == pytest.approx(ref, abs=1e-8)
