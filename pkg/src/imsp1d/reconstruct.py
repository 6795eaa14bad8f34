"""Back-substitution from the minimizer to the coefficient, followed by
smoothing, truncation and contrast estimates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functional import BoundaryLift
from .numgrid import SpatialGrid, WavenumberGrid, diff_matrix, tail_integral_k
from .tail import TailFunction

ABOVE = "above-unity"
BELOW = "below-unity"
MODES = (ABOVE, BELOW)


class AmbiguousModeError(ValueError):
    pass


@dataclass(frozen=True)
class ReconstructionResult:
    c_tilde: np.ndarray
    c_comp: np.ndarray
    mode: str
    P_tilde: float
    c_bckgr_range: tuple
    c_est_range: tuple


def recover_v_at_klo(p, lift: BoundaryLift, tail: TailFunction, kgrid: WavenumberGrid) -> np.ndarray:
    """v(x, k_lo) = -int_{k_lo}^{k_hi} q dk + V with q = p + m."""
    q = np.asarray(p) + lift.m
    return -tail_integral_k(q, kgrid, 0) + tail.V


def coefficient_from_v(v, k_lo: float, grid: SpatialGrid, mode: str = ABOVE) -> np.ndarray:
    """|-v'' - k^2 (v')^2 + 2ik v'| plus one (above) or subtracted from one (below)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    v1 = diff_matrix(grid.n_x, grid.h_x, 1) @ v
    v2 = diff_matrix(grid.n_x, grid.h_x, 2) @ v
    beta = np.abs(-v2 - k_lo**2 * v1**2 + 2j * k_lo * v1)
    return 1.0 + beta if mode == ABOVE else 1.0 - beta


def smooth(c, window: int = 3) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if window == 3:
        out = np.empty_like(c)
        out[1:-1] = (c[:-2] + c[1:-1] + c[2:]) / 3.0
        out[0] = (c[0] + c[1]) / 2.0
        out[-1] = (c[-2] + c[-1]) / 2.0
        return out
    if window == 2:
        out = c.copy()
        out[:-1] = 0.5 * (c[:-1] + c[1:])
        return out
    raise ValueError("window must be 2 or 3")


def postprocess(c_tilde, mode: str = ABOVE, window: int = 3, keep_fraction: float = 0.8) -> np.ndarray:
    c_tilde = np.asarray(c_tilde, dtype=float)
    if mode == ABOVE:
        c_hat = smooth(c_tilde, window)
        return np.where(c_hat >= keep_fraction * c_hat.max(), c_hat, 1.0)
    if mode == BELOW:
        return np.where((c_tilde > 0.1) & (c_tilde < 1.0), c_tilde, 1.0)
    raise ValueError(f"mode must be one of {MODES}")


def estimate_contrast(c_comp, mode: str = ABOVE, c_bckgr_range=(1.0, 1.0)):
    """Target/background contrast P and the dielectric estimate c_bckgr * P."""
    c_comp = np.asarray(c_comp, dtype=float)
    if np.any(c_comp > 1) and np.any(c_comp < 1):
        raise AmbiguousModeError("profile has values both above and below 1")
    if mode == ABOVE:
        P = float(c_comp.max())
    elif mode == BELOW:
        P = float(c_comp.min())
    else:
        raise ValueError(f"mode must be one of {MODES}")
    lo, hi = c_bckgr_range
    return P, (lo * P, hi * P)


def reconstruct(p, lift, tail, grid: SpatialGrid, kgrid: WavenumberGrid, mode: str = ABOVE,
                c_bckgr_range=(1.0, 1.0), window: int = 3) -> ReconstructionResult:
    v = recover_v_at_klo(p, lift, tail, kgrid)
    c_tilde = coefficient_from_v(v, kgrid.k_lo, grid, mode)
    c_comp = postprocess(c_tilde, mode, window)
    P, est = estimate_contrast(c_comp, mode, c_bckgr_range)
    return ReconstructionResult(c_tilde, c_comp, mode, P, tuple(c_bckgr_range), est)
