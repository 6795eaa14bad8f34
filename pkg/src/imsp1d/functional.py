"""Carleman-weighted cost functional for the integro-differential equation
satisfied by q = dv/dk, written for p = q - m with homogeneous boundary
conditions.

Discretization: x-derivatives of p by :func:`numgrid.diff_matrix`,
x-derivatives of the polynomial lift analytically, k-integrals by the
trapezoidal rule. The gradient is the exact derivative of this discrete
functional (reverse accumulation), optionally mapped to its Riesz
representer in the discrete space H.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.linalg as la

from .numgrid import (DimensionError, SpatialGrid, WavenumberGrid, diff_matrix,
                      h2_gram, tail_integral_matrix, trapz_weights)
from .tail import TailFunction, affine_parametrization


@dataclass(frozen=True)
class BoundaryLift:
    m: np.ndarray
    m1: np.ndarray
    m2: np.ndarray


def build_lift(p0, p1, grid: SpatialGrid) -> BoundaryLift:
    """m = (x^2-1)^2 p0(k) + x (x^2-1)^2 p1(k) and its x-derivatives."""
    x = grid.nodes[:, None]
    p0 = np.asarray(p0, dtype=complex)[None, :]
    p1 = np.asarray(p1, dtype=complex)[None, :]
    s = x**2 - 1
    m = s**2 * p0 + x * s**2 * p1
    m1 = 4 * x * s * p0 + (s**2 + 4 * x**2 * s) * p1
    m2 = (12 * x**2 - 4) * p0 + (20 * x**3 - 12 * x) * p1
    return BoundaryLift(m, m1, m2)


@dataclass(frozen=True, eq=False)
class CarlemanParams:
    """Weight exponent, ball radius and the grid-dependent operators."""

    lam: float = 3.0
    R: Optional[float] = None
    grid: SpatialGrid = SpatialGrid()
    kgrid: WavenumberGrid = WavenumberGrid()

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.R is not None and self.R <= 0:
            raise ValueError("ball radius must be positive")

    @cached_property
    def carleman_weight(self) -> np.ndarray:
        """exp(2 lam) exp(-2 lam x_j)."""
        return np.exp(2 * self.lam * (1 - self.grid.nodes))

    @cached_property
    def weights(self) -> np.ndarray:
        """Carleman weight times the 2-D trapezoidal weights, shape (n_x, n_k)."""
        wx = trapz_weights(self.grid.n_x, self.grid.h_x)
        wk = trapz_weights(self.kgrid.n_k, self.kgrid.h_k)
        return (self.carleman_weight * wx)[:, None] * wk[None, :]

    @cached_property
    def D1(self):
        return diff_matrix(self.grid.n_x, self.grid.h_x, 1)

    @cached_property
    def D2(self):
        return diff_matrix(self.grid.n_x, self.grid.h_x, 2)

    @cached_property
    def T(self):
        return tail_integral_matrix(self.kgrid)

    @cached_property
    def E(self):
        """Maps free node values p[2:n-1] to a field satisfying the constraints."""
        return affine_parametrization(self.grid.n_x, self.grid.h_x, 0.0, 0.0)[0]

    @cached_property
    def gram_free_cho(self):
        return la.cho_factor(self.E.T @ h2_gram(self.grid) @ self.E)


def _check(p, params: CarlemanParams):
    if p.shape != (params.grid.n_x, params.kgrid.n_k):
        raise DimensionError(f"expected shape {(params.grid.n_x, params.kgrid.n_k)}, got {p.shape}")


def enforce_constraints(p, params: CarlemanParams) -> np.ndarray:
    """Recompute the eliminated nodes so that p(0) = p'(0) = p'(1) = 0."""
    p = np.asarray(p, dtype=complex)
    _check(p, params)
    return params.E @ p[2:-1]


def satisfies_constraints(p, params: CarlemanParams, atol: float = 1e-12) -> bool:
    d = params.D1 @ p
    scale = max(1.0, float(np.abs(p).max(initial=0.0)))
    return bool(np.all(np.abs(p[0]) <= atol * scale) and np.all(np.abs(d[0]) <= atol * scale / params.grid.h_x)
                and np.all(np.abs(d[-1]) <= atol * scale / params.grid.h_x))


def _forward_parts(p, lift: BoundaryLift, tail: TailFunction, params: CarlemanParams):
    k = params.kgrid.nodes[None, :]
    Q1 = params.D1 @ p + lift.m1
    Q2 = params.D2 @ p + lift.m2
    I = Q1 @ params.T
    S = -I + tail.V1[:, None]
    L = Q2 - 2j * k * Q1 + 2 * k**2 * Q1 * S - 2j * S + 2 * k * S**2
    return L, Q1, S


def apply_L(p, lift: BoundaryLift, tail: TailFunction, params: CarlemanParams) -> np.ndarray:
    """Residual of the integro-differential equation at every lattice node."""
    p = np.asarray(p, dtype=complex)
    _check(p, params)
    return _forward_parts(p, lift, tail, params)[0]


def eval_J(p, lift, tail, params: CarlemanParams) -> float:
    L = apply_L(p, lift, tail, params)
    return float(np.sum(params.weights * (L.real**2 + L.imag**2)))


def value_and_nodal_grad(p, lift, tail, params: CarlemanParams):
    """J(p) and the gradient w.r.t. (Re, Im) of the free nodes p[2:n-1].

    The gradient is packed as complex ``dJ/dRe + i dJ/dIm`` and returned on
    the full lattice with zeros at the eliminated nodes 0, 1, n-1.
    """
    p = np.asarray(p, dtype=complex)
    _check(p, params)
    k = params.kgrid.nodes[None, :]
    L, Q1, S = _forward_parts(p, lift, tail, params)
    J = float(np.sum(params.weights * (L.real**2 + L.imag**2)))
    R = params.weights * L
    A = -2j * k + 2 * k**2 * S
    B = 2 * k**2 * Q1 - 2j + 4 * k * S
    RQ1 = np.conj(A) * R - (np.conj(B) * R) @ params.T.T
    Gp = 2 * (params.D2.T @ R + params.D1.T @ RQ1)
    G = np.zeros_like(Gp)
    G[2:-1] = params.E.T @ Gp
    return J, G


def nodal_grad_J(p, lift, tail, params: CarlemanParams) -> np.ndarray:
    return value_and_nodal_grad(p, lift, tail, params)[1]


def riesz_H(G, params: CarlemanParams) -> np.ndarray:
    """Representer g in H of the functional h -> Re sum(conj(G) h) on free nodes."""
    wk = trapz_weights(params.kgrid.n_k, params.kgrid.h_k)
    z = la.cho_solve(params.gram_free_cho, G[2:-1]) / wk[None, :]
    return params.E @ z


def value_and_grad(p, lift, tail, params: CarlemanParams):
    J, G = value_and_nodal_grad(p, lift, tail, params)
    return J, riesz_H(G, params)


def grad_J(p, lift, tail, params: CarlemanParams) -> np.ndarray:
    """Frechet derivative of the discrete J as an element of H.

    Satisfies <grad_J(p), h>_H == d/de J(p + e h) at e = 0 for every
    admissible h, and itself obeys the boundary constraints.
    """
    return value_and_grad(p, lift, tail, params)[1]


def H_inner(f, g, params: CarlemanParams) -> float:
    G = h2_gram(params.grid)
    wk = trapz_weights(params.kgrid.n_k, params.kgrid.h_k)
    return float(np.real(np.einsum("ik,ij,jk->k", np.conj(f), G, g)) @ wk)


def project_ball(p, params: CarlemanParams) -> np.ndarray:
    """Radial projection onto the closed ball of radius R in H."""
    p = np.asarray(p, dtype=complex)
    if params.R is None:
        return p
    norm = np.sqrt(max(H_inner(p, p, params), 0.0))
    if norm <= params.R:
        return p
    return p * (params.R / norm)
