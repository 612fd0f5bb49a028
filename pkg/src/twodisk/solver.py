"""Node-centred finite-difference discretisation of ``(a u_i)_i = 0`` with
Dirichlet data, and its linear solve."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .coefficient import SharpCoefficient, SmoothCoefficient, face_coefficients
from .errors import IncommensurateSpacing, NoConvergence, UnresolvedCollar

logger = logging.getLogger(__name__)

BOUNDARY_FAMILIES = ("X1", "X2", "BilinearX1X2", "Constant", "FourierMode")


@dataclass(frozen=True)
class Grid:
    box: tuple[float, float, float, float]
    h: float
    nx: int
    ny: int

    @property
    def x1(self) -> np.ndarray:
        return np.linspace(self.box[0], self.box[1], self.nx)

    @property
    def x2(self) -> np.ndarray:
        return np.linspace(self.box[2], self.box[3], self.ny)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    def boundary_mask(self) -> np.ndarray:
        m = np.zeros(self.shape, dtype=bool)
        m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
        return m


def build_grid(box, h: float) -> Grid:
    box = tuple(float(v) for v in box)
    counts = []
    for lo, hi in ((box[0], box[1]), (box[2], box[3])):
        n = (hi - lo) / h
        if not h > 0 or abs(n - round(n)) > 1e-12 * max(n, 1.0) or round(n) < 1:
            raise IncommensurateSpacing(f"h={h!r} does not divide the edge [{lo}, {hi}]")
        counts.append(int(round(n)) + 1)
    return Grid(box=box, h=float(h), nx=counts[0], ny=counts[1])


@dataclass
class ScalarField:
    grid: Grid
    values: np.ndarray
    support: Optional[np.ndarray] = None  # nodes where the quantity is defined

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values have shape {self.values.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")


@dataclass
class VectorField:
    grid: Grid
    v1: np.ndarray
    v2: np.ndarray

    def norm(self) -> np.ndarray:
        return np.hypot(self.v1, self.v2)


@dataclass(frozen=True)
class BoundarySpec:
    family: str = "X1"
    k: int = 1
    normalized: bool = True

    def __post_init__(self):
        if self.family not in BOUNDARY_FAMILIES:
            raise ValueError(f"unknown boundary family {self.family!r}")

    def raw(self, x1, x2, grid: Grid) -> np.ndarray:
        if self.family == "X1":
            return np.array(x1, dtype=float)
        if self.family == "X2":
            return np.array(x2, dtype=float)
        if self.family == "BilinearX1X2":
            return x1 * x2
        if self.family == "Constant":
            return np.ones(np.broadcast(x1, x2).shape)
        c1 = 0.5 * (grid.box[0] + grid.box[1])
        c2 = 0.5 * (grid.box[2] + grid.box[3])
        return np.cos(self.k * np.arctan2(x2 - c2, x1 - c1))

    def nodal(self, grid: Grid) -> np.ndarray:
        """Boundary data extended to every node by the same formula."""
        X1, X2 = grid.mesh()
        phi = self.raw(X1, X2, grid)
        if self.normalized:
            scale = np.max(np.abs(phi[grid.boundary_mask()]))
            if scale == 0:
                raise ValueError("boundary data vanishes identically; cannot normalise")
            phi = phi / scale
        return phi


@dataclass
class SolveReport:
    iterations: int
    relative_residual: float
    sup_abs_u: float
    boundary_sup: float
    boundary_min: float
    boundary_max: float
    u_min: float
    u_max: float
    max_principle_ok: bool
    backend: str = "amg"


@dataclass
class LinearSystem:
    """Assembled flux operator.

    ``ax[i, j]`` couples nodes ``(i, j)`` and ``(i+1, j)``; ``ay[i, j]``
    couples ``(i, j)`` and ``(i, j+1)``.  ``fixed`` marks Dirichlet nodes
    (the box boundary plus any user-supplied interior nodes); ``matrix`` is
    the SPD block acting on the remaining free nodes.
    """

    grid: Grid
    coefficient: object
    ax: np.ndarray
    ay: np.ndarray
    fixed: np.ndarray
    matrix: sps.csr_matrix
    free_index: np.ndarray = field(repr=False)

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Net outward flux ``sum_faces a_f (u_node - u_neighbour)`` at every node."""
        out = np.zeros(self.grid.shape)
        dx = self.ax * (u[:-1, :] - u[1:, :])
        dy = self.ay * (u[:, :-1] - u[:, 1:])
        out[:-1, :] += dx
        out[1:, :] -= dx
        out[:, :-1] += dy
        out[:, 1:] -= dy
        return out

    def entry(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])


def assemble(grid: Grid, coeff, *, fixed: Optional[np.ndarray] = None, quadrature: int = 16) -> LinearSystem:
    """Assemble the 5-point flux system.

    ``fixed`` optionally adds interior Dirichlet nodes to the box boundary.
    In smooth mode the collar must be resolved: ``epsilon >= 4*h``.
    """
    if isinstance(coeff, SmoothCoefficient) and coeff.epsilon < 4 * grid.h * (1 - 1e-12):
        raise UnresolvedCollar(f"epsilon={coeff.epsilon!r} < 4h={4 * grid.h!r}")
    if not isinstance(coeff, (SharpCoefficient, SmoothCoefficient)):
        raise TypeError(f"unsupported coefficient {type(coeff).__name__}")
    ax, ay = face_coefficients(coeff, grid, quadrature)
    fixed_mask = grid.boundary_mask()
    if fixed is not None:
        fixed_mask = fixed_mask | fixed
    free = ~fixed_mask
    index = np.full(grid.shape, -1, dtype=np.int64)
    n_free = int(free.sum())
    index[free] = np.arange(n_free)

    diag = np.zeros(grid.shape)
    diag[:-1, :] += ax
    diag[1:, :] += ax
    diag[:, :-1] += ay
    diag[:, 1:] += ay
    rows = [index[free]]
    cols = [index[free]]
    vals = [diag[free]]
    for coef, lo, hi in (
        (ax, index[:-1, :], index[1:, :]),
        (ay, index[:, :-1], index[:, 1:]),
    ):
        both = (lo >= 0) & (hi >= 0)
        i, j, c = lo[both], hi[both], -coef[both]
        rows += [i, j]
        cols += [j, i]
        vals += [c, c]
    matrix = sps.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n_free, n_free)
    )
    matrix.sum_duplicates()
    return LinearSystem(grid, coeff, ax, ay, fixed_mask, matrix, index)


def _preconditioner(A, backend: str):
    if backend == "amg":
        import pyamg

        # pyamg draws spectral-radius start vectors from the global RNG
        state = np.random.get_state()
        np.random.seed(0)
        try:
            ml = pyamg.smoothed_aggregation_solver(A, symmetry="symmetric", max_coarse=500)
        finally:
            np.random.set_state(state)
        return ml.aspreconditioner(cycle="V")
    if backend == "jacobi":
        return sps.diags(1.0 / A.diagonal())
    raise ValueError(f"unknown backend {backend!r}")


def solve_dirichlet(
    system: LinearSystem,
    phi,
    tol: float = 1e-10,
    *,
    backend: str = "amg",
    max_iter: Optional[int] = None,
):
    """Solve for ``u`` with ``u = phi`` on the fixed nodes.

    ``phi`` is a :class:`BoundarySpec` or a nodal array whose values on the
    fixed nodes are used.  Returns ``(ScalarField, SolveReport)``.
    """
    grid = system.grid
    g = phi.nodal(grid) if isinstance(phi, BoundarySpec) else np.asarray(phi, dtype=float)
    fixed = system.fixed
    g0 = np.where(fixed, g, 0.0)
    free = ~fixed
    b = -system.apply(g0)[free]
    A = system.matrix
    if max_iter is None:
        max_iter = int(10 * math.sqrt(grid.size))
    bnorm = float(np.linalg.norm(b))
    iterations = 0
    if bnorm == 0.0:
        x = np.zeros(A.shape[0])
    elif backend == "direct":
        x = spla.spsolve(A.tocsc(), b)
    else:
        M = _preconditioner(A, backend)
        count = [0]

        def _tick(_xk):
            count[0] += 1

        x, info = spla.cg(A, b, rtol=tol, atol=0.0, maxiter=max_iter, M=M, callback=_tick)
        iterations = count[0]
        if info != 0:
            raise NoConvergence(f"CG stopped after {iterations} iterations (info={info})")
    residual = float(np.linalg.norm(b - A @ x)) / bnorm if bnorm > 0 else 0.0
    u = g0.copy()
    u[free] = x
    bvals = g[fixed]
    scale = max(float(np.max(np.abs(bvals))), 1.0)
    slack = 10 * tol * scale
    report = SolveReport(
        iterations=iterations,
        relative_residual=residual,
        sup_abs_u=float(np.max(np.abs(u))),
        boundary_sup=float(np.max(np.abs(bvals))),
        boundary_min=float(bvals.min()),
        boundary_max=float(bvals.max()),
        u_min=float(u.min()),
        u_max=float(u.max()),
        max_principle_ok=bool(
            np.max(np.abs(u)) <= np.max(np.abs(bvals)) + slack
            and u.min() >= bvals.min() - slack
            and u.max() <= bvals.max() + slack
        ),
        backend=backend,
    )
    logger.debug("solve: %s", report)
    return ScalarField(grid, u), report


def gradient(u: ScalarField) -> VectorField:
    """Centred differences inside, second-order one-sided on the boundary."""
    grid = u.grid
    if grid.nx < 3 or grid.ny < 3:
        raise ValueError("gradient needs at least 3 nodes per axis")
    g1 = np.gradient(u.values, grid.h, axis=0, edge_order=2)
    g2 = np.gradient(u.values, grid.h, axis=1, edge_order=2)
    return VectorField(grid, g1, g2)


def argmax_node(values: np.ndarray, mask: Optional[np.ndarray] = None) -> tuple[int, int]:
    """Index of the maximum, ties going to the lexicographically smallest node."""
    v = np.where(mask, values, -np.inf) if mask is not None else values
    flat = int(np.argmax(v))
    return np.unravel_index(flat, values.shape)
