"""Tail function V(x) = v(x, k_hi) by quasi-reversibility.

Minimizes  1/2 (||V''||^2 + alpha ||V||_{H^3}^2)  over grid functions with
V(0) = a, V'(0) = b, V'(1) = 0, where the derivative conditions refer to the
one-sided stencils of :func:`imsp1d.numgrid.diff_matrix`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataprep import PreparedData
from .numgrid import SpatialGrid, WavenumberGrid, diff_matrix, trapz_weights

ALPHA_FLOOR = 1e-12


@dataclass(frozen=True)
class TailFunction:
    V: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    alpha: float


def choose_alpha(delta: float) -> float:
    """Regularization rule alpha = delta^2, floored."""
    if delta < 0:
        raise ValueError("noise level must be non-negative")
    return max(delta**2, ALPHA_FLOOR)


def tail_boundary_values(g0_hi: complex, k_hi: float):
    """(V(0), V'(0)) from the data at the top wavenumber.

    V'(0) = v'(0, k) = w'(0, k) / (k^2 w(0, k)) with w'(0, k) = 2ik(g0 - 1).
    """
    # principal branch, matching the anchor of dataprep.unwrap_log
    return np.log(g0_hi) / k_hi**2, 2j / k_hi * (1.0 - 1.0 / g0_hi)


def affine_parametrization(n: int, h: float, a, b):
    """V = E @ z + f  with free unknowns z = V[2:n-1].

    Eliminated nodes: V[0] = a; V[1] from the one-sided V'(0) = b stencil;
    V[n-1] from the one-sided V'(1) = 0 stencil.
    """
    nf = n - 3
    E = np.zeros((n, nf))
    E[2:n - 1, :] = np.eye(nf)
    # (-3 V0 + 4 V1 - V2) / 2h = b
    E[1, 0] = 0.25
    # (V[n-3] - 4 V[n-2] + 3 V[n-1]) / 2h = 0
    E[n - 1, nf - 1] = 4.0 / 3.0
    E[n - 1, nf - 2] = -1.0 / 3.0
    f = np.zeros(n, dtype=complex)
    f[0] = a
    f[1] = (3 * a + 2 * h * b) / 4.0
    return E, f


def solve_qrm(a, b, grid: SpatialGrid, alpha: float) -> np.ndarray:
    """Constrained minimizer of the quasi-reversibility functional."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n, h = grid.n_x, grid.h_x
    sw = np.sqrt(trapz_weights(n, h))[:, None]
    D = [np.eye(n)] + [diff_matrix(n, h, order) for order in (1, 2, 3)]
    # rows: V'' residual, then sqrt(alpha) * (V, V', V'', V''')
    A = np.vstack([sw * D[2]] + [np.sqrt(alpha) * sw * Dj for Dj in D])
    E, f = affine_parametrization(n, h, a, b)
    AE = A @ E
    # real matrix, so real and imaginary parts decouple
    z = np.column_stack([np.linalg.lstsq(AE, -(A @ f).real, rcond=None)[0],
                         np.linalg.lstsq(AE, -(A @ f).imag, rcond=None)[0]])
    z = z[:, 0] + 1j * z[:, 1]
    assert np.all(np.isfinite(z)), "singular quasi-reversibility system"
    return E @ z + f


def qrm_functional(V, grid: SpatialGrid, alpha: float) -> float:
    n, h = grid.n_x, grid.h_x
    w = trapz_weights(n, h)
    norms = [float(w @ np.abs(np.asarray(V) if o == 0 else diff_matrix(n, h, o) @ V) ** 2)
             for o in range(4)]
    return 0.5 * (norms[2] + alpha * sum(norms))


def qrm_tail(prepared: PreparedData, grid: SpatialGrid, kgrid: WavenumberGrid,
             alpha: float) -> TailFunction:
    a, b = tail_boundary_values(prepared.g0[-1], kgrid.k_hi)
    V = solve_qrm(a, b, grid, alpha)
    h = grid.h_x
    return TailFunction(V, diff_matrix(grid.n_x, h, 1) @ V, diff_matrix(grid.n_x, h, 2) @ V, alpha)
