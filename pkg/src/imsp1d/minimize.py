"""Gradient and gradient-projection descent for the Carleman functional."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .functional import (CarlemanParams, H_inner, enforce_constraints, eval_J, project_ball,
                         riesz_H, value_and_nodal_grad)
from .numgrid import SpatialGrid, WavenumberGrid, trapz_weights

DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class MinimizerConfig:
    gamma: float = 1e-5
    max_iter: int = 5000
    lam: float = 3.0
    R: Optional[float] = None  # None: no ball, plain gradient method
    grad_tol: float = 1e-9
    log_every: int = 1
    armijo: bool = False

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")


@dataclass
class MinimizeTrace:
    iters: list = field(default_factory=list)
    J: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)   # H-norm of the H-gradient
    grad_l2: list = field(default_factory=list)     # discrete L2 norm of the nodal gradient
    p_norm: list = field(default_factory=list)
    p: Optional[np.ndarray] = None
    stopped_early: bool = False

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.iters, self.J, self.grad_norm, self.grad_l2, self.p_norm])


class DivergenceError(RuntimeError):
    def __init__(self, msg, trace: MinimizeTrace):
        super().__init__(msg)
        self.trace = trace


def _l2(G, params: CarlemanParams) -> float:
    wx = trapz_weights(params.grid.n_x, params.grid.h_x)
    wk = trapz_weights(params.kgrid.n_k, params.kgrid.h_k)
    return float(np.sqrt(wx @ np.abs(G) ** 2 @ wk))


def run(p_init, lift, tail, config: MinimizerConfig, grid: SpatialGrid | None = None,
        kgrid: WavenumberGrid | None = None, params: CarlemanParams | None = None,
        callback=None) -> MinimizeTrace:
    """Iterate p <- Q(p - gamma J'(p)); Q is the ball projection when R is set.

    J'(p) is the gradient represented in H. Stops after ``max_iter`` steps
    or once its H-norm drops below ``grad_tol``. ``callback(it, p)`` sees
    every iterate.
    """
    if params is None:
        params = CarlemanParams(config.lam, config.R, grid or SpatialGrid(), kgrid or WavenumberGrid())
    n_x, n_k = params.grid.n_x, params.kgrid.n_k
    p = np.zeros((n_x, n_k), complex) if p_init is None else enforce_constraints(p_init, params)
    p = project_ball(p, params)
    trace = MinimizeTrace()
    J0 = None
    gamma = config.gamma
    for it in range(config.max_iter + 1):
        J, G = value_and_nodal_grad(p, lift, tail, params)
        g = riesz_H(G, params)
        gnorm = np.sqrt(max(H_inner(g, g, params), 0.0))
        if J0 is None:
            J0 = J
        bad = not (np.isfinite(J) and np.isfinite(gnorm)) or J > DIVERGENCE_FACTOR * max(J0, 1e-300)
        last = it == config.max_iter or gnorm < config.grad_tol or bad
        if it % config.log_every == 0 or last:
            trace.iters.append(it)
            trace.J.append(J)
            trace.grad_norm.append(gnorm)
            trace.grad_l2.append(_l2(G, params))
            trace.p_norm.append(np.sqrt(max(H_inner(p, p, params), 0.0)))
        trace.p = p
        if callback is not None:
            callback(it, p)
        if bad:
            raise DivergenceError(f"divergence at iteration {it}: J={J:.3e}", trace)
        if gnorm < config.grad_tol:
            trace.stopped_early = True
            break
        if it == config.max_iter:
            break
        step = gamma
        p_new = project_ball(p - step * g, params)
        if config.armijo:
            while eval_J(p_new, lift, tail, params) > J - 1e-4 * step * gnorm**2 and step > 1e-16:
                step *= 0.5
                p_new = project_ball(p - step * g, params)
        p = p_new
    return trace


def run_projected(p_init, lift, tail, config: MinimizerConfig, grid=None, kgrid=None,
                  params=None, callback=None) -> MinimizeTrace:
    """:func:`run` with the ball projection required every step."""
    if config.R is None:
        raise ValueError("run_projected needs a finite ball radius R")
    if params is not None and params.R != config.R:
        raise ValueError("params.R differs from config.R")
    return run(p_init, lift, tail, config, grid, kgrid, params, callback)
