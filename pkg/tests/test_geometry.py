import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from twodisk.errors import GapTooWide, MarginViolation, NonPositiveParameter, OutOfDomain
from twodisk.geometry import RegionLabel, build_geometry, classify, gap_segment_halfwidth, region_masks
from twodisk.solver import build_grid


def test_valid_geometry_center_minus():
    g = build_geometry(0.1, 0.25, (-4, 4, -7, 3))
    assert g.center_minus == pytest.approx((0.0, -2.2), abs=1e-15)
    assert g.center_plus == (0.0, 0.0)
    assert g.midline == pytest.approx(-1.1)


def test_margin_violation():
    with pytest.raises(MarginViolation):
        build_geometry(0.1, 0.25, (-1.2, 1.2, -7, 3))


def test_gap_too_wide():
    with pytest.raises(GapTooWide):
        build_geometry(0.3, 0.25)


@pytest.mark.parametrize("delta,mu", [(0.0, 0.25), (-0.1, 0.25), (0.1, 0.0), (0.1, -1.0)])
def test_non_positive(delta, mu):
    with pytest.raises(NonPositiveParameter):
        build_geometry(delta, mu)


def test_classify_examples():
    g = build_geometry(0.1)
    assert classify(g, (0, 0)) is RegionLabel.DiskPlus
    assert classify(g, (0, -1.1)) is RegionLabel.Exterior
    assert classify(g, (3, 2)) is RegionLabel.Exterior
    assert classify(g, (0, -2.2)) is RegionLabel.DiskMinus
    # closed-disk convention on the circle itself
    assert classify(g, (1.0, 0.0)) is RegionLabel.DiskPlus


def test_classify_out_of_domain():
    g = build_geometry(0.1)
    with pytest.raises(OutOfDomain):
        classify(g, (5, 0))


@settings(max_examples=200, deadline=None)
@given(st.floats(-4, 4), st.floats(-7, 3))
def test_classify_mirror_symmetric(x1, x2):
    g = build_geometry(0.1)
    assert classify(g, (x1, x2)) is classify(g, (-x1, x2))


def test_distance_to_circle_matches_formula():
    g = build_geometry(0.1)
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(-4, 4, 10**6), rng.uniform(-7, 3, 10**6)])
    ref = np.abs(np.sqrt(pts[:, 0] ** 2 + pts[:, 1] ** 2) - 1)
    # a few ulps at radii up to ~8
    assert np.max(np.abs(g.dist_to_circle(pts, "plus") - ref)) <= 8 * np.finfo(float).eps * 8


def _c1_bisection(delta, mu):
    mid = -1 - delta
    f = lambda x1: math.hypot(x1, mid) - 1 - mu
    return brentq(f, 0.0, 2.0, xtol=1e-14, rtol=1e-15)


# sqrt(1.25**2 - 1.05**2) = sqrt(0.46); 0.674537 would need (1+delta)**2 = 1.1075
@pytest.mark.parametrize("delta,expected", [(0.1, 0.593717), (0.05, 0.678233)])
def test_gap_halfwidth(delta, expected):
    g = build_geometry(delta, 0.25)
    c1 = gap_segment_halfwidth(g)
    assert c1 == pytest.approx(expected, abs=5e-7)
    assert abs(c1 - _c1_bisection(delta, 0.25)) <= 1e-10
    # the endpoint sits on the outer edge of the upper collar
    assert g.dist_to_circle((c1, -1 - delta), "plus") == pytest.approx(0.25, abs=1e-12)


def test_gap_halfwidth_degenerate():
    g = build_geometry(0.25, 0.25, has_minus=False)
    object.__setattr__(g, "has_minus", True)
    with pytest.raises(GapTooWide):
        gap_segment_halfwidth(g)


@pytest.fixture(scope="module")
def masks_and_grid():
    g = build_geometry(0.1, 0.25)
    grid = build_grid(g.box, 0.025)
    return g, grid, region_masks(g, grid)


def _node(grid, x1, x2):
    i = int(np.argmin(np.abs(grid.x1 - x1)))
    j = int(np.argmin(np.abs(grid.x2 - x2)))
    assert abs(grid.x1[i] - x1) < 1e-9 and abs(grid.x2[j] - x2) < 1e-9
    return i, j


def test_mask_examples(masks_and_grid):
    g, grid, m = masks_and_grid
    n = _node(grid, 0.0, -1.1 + 0.125)
    assert m.w_plus[n] and not m.e[n]
    n = _node(grid, 0.0, -1.1)
    assert m.s[n] and m.e[n] and m.w_plus[n] and m.w_minus[n] and m.interior[n]
    n = _node(grid, 0.0, 1.5)
    assert m.interior[n] and not m.w_plus[n]


def test_mask_inclusions(masks_and_grid):
    g, grid, m = masks_and_grid
    assert m.e.any()
    assert not np.any(m.e & ~(m.w_plus | m.w_minus))
    assert not np.any(m.e & ~m.interior)
    assert not np.any(m.s & ~m.e)
    assert m.c1 == pytest.approx(gap_segment_halfwidth(g))
