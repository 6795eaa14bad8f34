"""Forward scattering: the 1-D Helmholtz problem with radiation conditions,
solved through its Lippmann-Schwinger integral equation, and synthesis of
(noisy) boundary data g0(k) = u(0, k) / u0(0, k)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
import scipy.linalg as la

from .numgrid import SpatialGrid, WavenumberGrid


class SolverError(RuntimeError):
    """Discretized integral equation is singular or badly conditioned."""

    def __init__(self, k, cond):
        super().__init__(f"Lippmann-Schwinger system ill-conditioned at k={k:g} (cond ~ {cond:.3e})")
        self.k = k
        self.cond = cond


def incident_field(x, k, x0=-1.0):
    """Free-space field exp(-ik|x-x0|) / (2ik) of a point source at x0."""
    if np.any(np.asarray(k) <= 0):
        raise ValueError("wavenumber must be positive")
    return np.exp(-1j * k * np.abs(np.asarray(x) - x0)) / (2j * k)


@dataclass(frozen=True)
class StepTarget:
    """Piecewise-constant inclusion of value ``contrast`` on
    (x_loc - d/2, x_loc + d/2) in a unit background."""

    x_loc: float
    d: float
    contrast: float = 7.0

    def __post_init__(self):
        lo, hi = self.x_loc - self.d / 2, self.x_loc + self.d / 2
        if not (0 <= lo < hi <= 1):
            raise ValueError(f"inclusion ({lo}, {hi}) must lie inside (0, 1)")
        if self.contrast <= 0:
            raise ValueError("contrast must be positive")

    @property
    def edges(self):
        return self.x_loc - self.d / 2, self.x_loc + self.d / 2

    def __call__(self, x):
        # points exactly on a jump get the mean of the one-sided limits,
        # which keeps trapezoidal quadrature second order
        x = np.asarray(x, dtype=float)
        lo, hi = self.edges
        tol = 1e-12
        c = np.where((x > lo + tol) & (x < hi - tol), self.contrast, 1.0)
        on_edge = (np.abs(x - lo) <= tol) | (np.abs(x - hi) <= tol)
        return np.where(on_edge, 0.5 * (1.0 + self.contrast), c)

    def on_grid(self, grid: SpatialGrid) -> "MediumProfile":
        x = grid.nodes
        lo, hi = self.edges
        tol = 1e-12
        values = np.where((x > lo + tol) & (x < hi - tol), self.contrast, 1.0)
        return MediumProfile(values, grid)


@dataclass(frozen=True)
class MediumProfile:
    """Real coefficient c(x_j) on a SpatialGrid; c = 1 outside [0, 1].

    Between nodes the profile is linearly interpolated.
    """

    values: np.ndarray
    grid: SpatialGrid = field(default_factory=SpatialGrid)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_x,):
            raise ValueError(f"expected {self.grid.n_x} values, got shape {v.shape}")
        if np.any(v <= 0):
            raise ValueError("coefficient must be positive")
        object.__setattr__(self, "values", v)

    @classmethod
    def background(cls, grid: SpatialGrid | None = None) -> "MediumProfile":
        grid = grid or SpatialGrid()
        return cls(np.ones(grid.n_x), grid)

    def __call__(self, x):
        return np.interp(x, self.grid.nodes, self.values, left=1.0, right=1.0)


Medium = Union[MediumProfile, StepTarget, Callable[[np.ndarray], np.ndarray]]


def solve_forward(c: Medium, k: float, grid: SpatialGrid | None = None,
                  quad_n: int = 2000, cond_max: float = 1e10) -> np.ndarray:
    """Total field u(x_j, k) on the spatial grid.

    Nystrom discretization of
        u(x) = u0(x) + k^2 int_0^1 G(x, xi) (c(xi) - 1) u(xi) dxi
    with the trapezoidal rule on ``quad_n`` panels and a dense direct solve.
    """
    grid = grid or SpatialGrid()
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    if quad_n < grid.n_x - 1:
        raise ValueError(f"quad_n={quad_n} coarser than the spatial grid")
    xq = np.linspace(0.0, 1.0, quad_n + 1)
    beta = np.asarray(c(xq), dtype=float) - 1.0
    u0 = incident_field(xq, k, grid.x0_source)
    if not np.any(beta):
        uq = u0
    else:
        wq = np.full(quad_n + 1, 1.0 / quad_n)
        wq[0] = wq[-1] = 0.5 / quad_n
        G = np.exp(-1j * k * np.abs(xq[:, None] - xq[None, :])) / (2j * k)
        A = np.eye(quad_n + 1, dtype=complex) - k**2 * G * (wq * beta)[None, :]
        anorm = np.abs(A).sum(axis=0).max()
        lu, piv = la.lu_factor(A, check_finite=False)
        rcond, _ = la.lapack.zgecon(lu, anorm, norm="1")
        if rcond <= 0 or 1.0 / rcond > cond_max:
            raise SolverError(k, np.inf if rcond <= 0 else 1.0 / rcond)
        uq = la.lu_solve((lu, piv), u0, check_finite=False)
    if quad_n % (grid.n_x - 1) == 0:
        return uq[:: quad_n // (grid.n_x - 1)].copy()
    return np.interp(grid.nodes, xq, uq.real) + 1j * np.interp(grid.nodes, xq, uq.imag)


@dataclass(frozen=True)
class ScatterData:
    """Boundary data g0(k_m) on a wavenumber grid."""

    g0: np.ndarray
    kgrid: WavenumberGrid = field(default_factory=WavenumberGrid)
    noise_level: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        g = np.asarray(self.g0, dtype=complex)
        if g.shape != (self.kgrid.n_k,):
            raise ValueError(f"expected {self.kgrid.n_k} samples, got shape {g.shape}")
        object.__setattr__(self, "g0", g)


def synthesize_data(c: Medium, kgrid: WavenumberGrid | None = None,
                    grid: SpatialGrid | None = None, quad_n: int = 2000) -> ScatterData:
    kgrid = kgrid or WavenumberGrid()
    grid = grid or SpatialGrid()
    g0 = np.empty(kgrid.n_k, dtype=complex)
    for m, k in enumerate(kgrid.nodes):
        u = solve_forward(c, k, grid, quad_n)
        g0[m] = u[0] / incident_field(0.0, k, grid.x0_source)
    return ScatterData(g0, kgrid)


def add_noise(data: ScatterData, level: float, seed: int = 0) -> ScatterData:
    """Multiplicative noise g0 * (1 + level * (s1 + i s2)), s1, s2 ~ U(-1, 1)."""
    if level < 0:
        raise ValueError("noise level must be non-negative")
    if level == 0:
        return ScatterData(data.g0.copy(), data.kgrid, data.noise_level, data.seed)
    rng = np.random.default_rng(seed)
    sigma = rng.uniform(-1.0, 1.0, data.g0.size) + 1j * rng.uniform(-1.0, 1.0, data.g0.size)
    return ScatterData(data.g0 * (1.0 + level * sigma), data.kgrid, level, seed)
