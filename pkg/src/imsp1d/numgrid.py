"""Uniform grids, trapezoidal quadrature, finite-difference stencils and the
discrete Sobolev norms shared by the rest of the package.

Fields on the (x, k) lattice are plain complex ``ndarray`` objects of shape
``(n_x, n_k)``; axis 0 is space, axis 1 is wavenumber.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class DimensionError(ValueError):
    """Array shape does not match the grid it is paired with."""


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid on [0, 1] plus the (exterior) source position."""

    n_x: int = 51
    x0_source: float = -1.0

    def __post_init__(self):
        if self.n_x < 5:
            raise ValueError(f"n_x must be >= 5, got {self.n_x}")
        if not self.x0_source < 0:
            raise ValueError(f"source must lie left of x=0, got {self.x0_source}")

    @classmethod
    def from_step(cls, h_x: float = 0.02, x0_source: float = -1.0) -> "SpatialGrid":
        return cls(n_x=int(round(1.0 / h_x)) + 1, x0_source=x0_source)

    @property
    def h_x(self) -> float:
        return 1.0 / (self.n_x - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_x)


@dataclass(frozen=True)
class WavenumberGrid:
    """Uniform wavenumber grid on [k_lo, k_hi]."""

    k_lo: float = 0.5
    k_hi: float = 1.5
    n_k: int = 11

    def __post_init__(self):
        if not 0 < self.k_lo < self.k_hi:
            raise ValueError(f"need 0 < k_lo < k_hi, got [{self.k_lo}, {self.k_hi}]")
        if self.n_k < 2:
            raise ValueError(f"n_k must be >= 2, got {self.n_k}")

    @classmethod
    def from_step(cls, k_lo: float = 0.5, k_hi: float = 1.5, h_k: float = 0.1) -> "WavenumberGrid":
        return cls(k_lo=k_lo, k_hi=k_hi, n_k=int(round((k_hi - k_lo) / h_k)) + 1)

    @property
    def h_k(self) -> float:
        return (self.k_hi - self.k_lo) / (self.n_k - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.k_lo, self.k_hi, self.n_k)


def trapz_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def trapz_k(f, kgrid: WavenumberGrid):
    """Trapezoidal rule over the wavenumber grid (along the last axis)."""
    f = np.asarray(f)
    if f.shape[-1] != kgrid.n_k:
        raise DimensionError(f"expected {kgrid.n_k} k-samples, got {f.shape[-1]}")
    return f @ trapz_weights(kgrid.n_k, kgrid.h_k)


def tail_integral_matrix(kgrid: WavenumberGrid) -> np.ndarray:
    """Matrix T such that ``(f @ T)[:, m]`` is the trapezoidal integral of f
    from k_m to k_hi."""
    n, h = kgrid.n_k, kgrid.h_k
    T = np.zeros((n, n))
    for m in range(n - 1):
        T[m:, m] = h
        T[m, m] = T[-1, m] = 0.5 * h
    return T


def tail_integral_k(f, kgrid: WavenumberGrid, m: int) -> np.ndarray:
    """Trapezoidal integral of ``f(x, .)`` over [k_m, k_hi] for every x."""
    f = np.asarray(f)
    if f.shape[-1] != kgrid.n_k:
        raise DimensionError(f"expected {kgrid.n_k} k-samples, got {f.shape[-1]}")
    if not 0 <= m < kgrid.n_k:
        raise IndexError(f"k-index {m} outside 0..{kgrid.n_k - 1}")
    seg = f[..., m:]
    if seg.shape[-1] == 1:
        return np.zeros(f.shape[:-1], dtype=f.dtype)
    return kgrid.h_k * (seg.sum(axis=-1) - 0.5 * (seg[..., 0] + seg[..., -1]))


def diff_matrix(n: int, h: float, order: int) -> np.ndarray:
    """Dense finite-difference matrix on n uniform nodes.

    order 1: central differences, one-sided second-order closures.
    order 2: 3-point second difference, one-sided 4-point second-order closures.
    order 3: composition D1 @ D2 (exact on cubics everywhere).
    """
    if n < 5:
        raise DimensionError(f"need at least 5 nodes for differencing, got {n}")
    D = np.zeros((n, n))
    if order == 1:
        i = np.arange(1, n - 1)
        D[i, i - 1] = -0.5
        D[i, i + 1] = 0.5
        D[0, :3] = [-1.5, 2.0, -0.5]
        D[-1, -3:] = [0.5, -2.0, 1.5]
        return D / h
    if order == 2:
        i = np.arange(1, n - 1)
        D[i, i - 1] = 1.0
        D[i, i] = -2.0
        D[i, i + 1] = 1.0
        D[0, :4] = [2.0, -5.0, 4.0, -1.0]
        D[-1, -4:] = [-1.0, 4.0, -5.0, 2.0]
        return D / h**2
    if order == 3:
        return diff_matrix(n, h, 1) @ diff_matrix(n, h, 2)
    raise ValueError(f"unsupported derivative order {order}")


def d_x(f, h: float, order: int = 1) -> np.ndarray:
    """Finite-difference derivative along axis 0."""
    f = np.asarray(f)
    if f.shape[0] < 5:
        raise DimensionError(f"need at least 5 samples, got {f.shape[0]}")
    return diff_matrix(f.shape[0], h, order) @ f


def _h2_density(f, h: float) -> np.ndarray:
    return np.abs(f) ** 2 + np.abs(d_x(f, h, 1)) ** 2 + np.abs(d_x(f, h, 2)) ** 2


def h2_norm_sq(f, grid: SpatialGrid) -> float:
    """Discrete ||f||^2 + ||f'||^2 + ||f''||^2 on [0, 1] (real+imag parts summed)."""
    f = np.asarray(f)
    if f.shape[0] != grid.n_x:
        raise DimensionError(f"expected {grid.n_x} x-samples, got {f.shape[0]}")
    return float(trapz_weights(grid.n_x, grid.h_x) @ _h2_density(f, grid.h_x))


def h2_gram(grid: SpatialGrid) -> np.ndarray:
    """Gram matrix G with h2_norm_sq(f) == Re(f^H G f)."""
    h = grid.h_x
    W = np.diag(trapz_weights(grid.n_x, h))
    D1 = diff_matrix(grid.n_x, h, 1)
    D2 = diff_matrix(grid.n_x, h, 2)
    return W + D1.T @ W @ D1 + D2.T @ W @ D2


def H_norm(f, grid: SpatialGrid, kgrid: WavenumberGrid) -> float:
    """Norm of the space H: sqrt of the k-integral of per-slice H^2 norms."""
    f = np.asarray(f)
    if f.shape != (grid.n_x, kgrid.n_k):
        raise DimensionError(f"expected shape {(grid.n_x, kgrid.n_k)}, got {f.shape}")
    per_k = trapz_weights(grid.n_x, grid.h_x) @ _h2_density(f, grid.h_x)
    return float(np.sqrt(trapz_k(per_k, kgrid)))
