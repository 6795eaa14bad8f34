"""Empirical checks of the Carleman estimate, the convexity gap and the
Lipschitz bound of the gradient, plus the error-vs-noise sweep.

The constants in these inequalities are existential; every check reports
extremal observed ratios instead.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .forward import ScatterData, StepTarget, add_noise
from .functional import (BoundaryLift, CarlemanParams, H_inner, enforce_constraints, eval_J,
                         value_and_grad, value_and_nodal_grad)
from .minimize import MinimizerConfig
from .numgrid import SpatialGrid, WavenumberGrid, trapz_weights
from .tail import TailFunction


class HypothesisViolation(ValueError):
    pass


@dataclass
class InequalityReport:
    name: str
    n_samples: int
    lambdas: list
    min_ratio: float
    median_ratio: float
    max_ratio: float
    passed: Optional[bool]
    per_lambda: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


# smooth test functions ------------------------------------------------------

N_MODES = 4


def _smooth_factor(x, coef):
    """sum_j a_j cos(j pi x) + b_j sin(j pi x) + (c0 + c1 x + c2 x^2), with derivatives."""
    a, b, c = coef
    j = np.arange(a.size)[:, None] * np.pi
    cos, sin = np.cos(j * x), np.sin(j * x)
    g = a @ cos + b @ sin + c[0] + c[1] * x + c[2] * x**2
    g1 = a @ (-j * sin) + b @ (j * cos) + c[1] + 2 * c[2] * x
    g2 = a @ (-j**2 * cos) + b @ (-j**2 * sin) + 2 * c[2]
    return g, g1, g2


def _random_coef(rng, complex_=True):
    def draw(n):
        z = rng.normal(size=n)
        if complex_:
            z = z + 1j * rng.normal(size=n)
        return z
    return draw(N_MODES), draw(N_MODES), draw(3)


def carleman_sample(rng, x):
    """Random smooth u = x^2 g(x) (so u(0) = u'(0) = 0) with u', u''."""
    g, g1, g2 = _smooth_factor(x, _random_coef(rng))
    u = x**2 * g
    u1 = 2 * x * g + x**2 * g1
    u2 = 2 * g + 4 * x * g1 + x**2 * g2
    return u, u1, u2


def carleman_ratio(u, u1, u2, x, lam):
    """int|u''|^2 w / (int|u''|^2 w + lam int|u'|^2 w + lam^3 int|u|^2 w), w = exp(-2 lam x)."""
    w = trapz_weights(x.size, x[1] - x[0]) * np.exp(-2 * lam * x)
    A = w @ np.abs(u2) ** 2
    B = w @ np.abs(u1) ** 2
    C = w @ np.abs(u) ** 2
    return float(A / (A + lam * B + lam**3 * C))


def check_carleman(lambda_list, n_samples: int = 200, seed: int = 0, n_fine: int = 2001) -> InequalityReport:
    lambda_list = [float(l) for l in lambda_list]
    if any(l <= 1 for l in lambda_list):
        raise HypothesisViolation("the Carleman estimate is stated for lambda > 1")
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 1.0, n_fine)
    samples = []
    while len(samples) < n_samples:
        u, u1, u2 = carleman_sample(rng, x)
        if np.max(np.abs(u)) > 1e-8:
            samples.append((u, u1, u2))
    ratios = np.array([[carleman_ratio(*s, x, lam) for s in samples] for lam in lambda_list])
    per_lambda = {str(l): float(r.min()) for l, r in zip(lambda_list, ratios)}
    common = float(ratios.min())
    return InequalityReport("carleman", n_samples, lambda_list, common, float(np.median(ratios)),
                            float(ratios.max()), bool(common > 0 and np.all(ratios <= 1.0 + 1e-12)),
                            per_lambda, extra={"common_lower_bound": common})


def random_field(rng, grid: SpatialGrid, kgrid: WavenumberGrid, params: CarlemanParams, norm: float):
    """Smooth field x^2 (x-1)^2 * trig/poly(x) * poly(k), admissible, with H-norm ``norm``."""
    x = grid.nodes
    kh = (2 * kgrid.nodes - kgrid.k_lo - kgrid.k_hi) / (kgrid.k_hi - kgrid.k_lo)
    mask = x**2 * (x - 1) ** 2
    f = np.zeros((grid.n_x, kgrid.n_k), complex)
    for leg in (np.ones_like(kh), kh, 1.5 * kh**2 - 0.5):
        g = _smooth_factor(x, _random_coef(rng))[0]
        f += np.outer(mask * g, leg)
    f = enforce_constraints(f, params)
    return f * (norm / np.sqrt(H_inner(f, f, params)))


def _ball_pair(rng, grid, kgrid, params, R):
    """Two independent admissible fields inside the closed ball of radius R."""
    p = random_field(rng, grid, kgrid, params, R * rng.uniform())
    q = random_field(rng, grid, kgrid, params, R * rng.uniform())
    return p, q


def check_convexity_gap(lift: BoundaryLift, tail: TailFunction, lam: float, R: float,
                        n_samples: int = 100, seed: int = 0, grid: SpatialGrid | None = None,
                        kgrid: WavenumberGrid | None = None) -> InequalityReport:
    """Ratio (J(p+h) - J(p) - J'(p)h) / ||h||_H^2 over pairs p, p+h in the ball.

    At lam = 0 the report carries no pass flag (no convexity is claimed).
    """
    grid = grid or SpatialGrid()
    kgrid = kgrid or WavenumberGrid()
    if R <= 0 or lam < 0:
        raise ValueError("need R > 0 and lambda >= 0")
    params = CarlemanParams(lam, R, grid, kgrid)
    rng = np.random.default_rng(seed)
    ratios, gaps, witnesses = [], [], []
    while len(ratios) < n_samples:
        p, q = _ball_pair(rng, grid, kgrid, params, R)
        h = q - p
        hn2 = H_inner(h, h, params)
        if hn2 < 1e-20:
            continue
        J0, G = value_and_nodal_grad(p, lift, tail, params)
        gap = eval_J(q, lift, tail, params) - J0 - float(np.real(np.sum(np.conj(G) * h)))
        gaps.append(gap)
        ratios.append(gap / hn2)
        if gap < 0:
            witnesses.append({"gap": gap, "p_norm": float(np.sqrt(H_inner(p, p, params))),
                              "h_norm": float(np.sqrt(hn2))})
    ratios = np.array(ratios)
    passed = None if lam == 0 else bool(np.all(np.array(gaps) >= 0) and ratios.min() > 0)
    return InequalityReport("convexity", n_samples, [lam], float(ratios.min()), float(np.median(ratios)),
                            float(ratios.max()), passed, {str(lam): float(ratios.min())}, witnesses[:10],
                            {"R": R, "min_gap": float(min(gaps))})


def lipschitz_ratios(lift, tail, params: CarlemanParams, n_samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n_samples:
        p1, p2 = _ball_pair(rng, params.grid, params.kgrid, params, params.R)
        d = p1 - p2
        dn = np.sqrt(H_inner(d, d, params))
        if dn < 1e-10:
            continue
        g1 = value_and_grad(p1, lift, tail, params)[1]
        g2 = value_and_grad(p2, lift, tail, params)[1]
        dg = g1 - g2
        out.append(np.sqrt(H_inner(dg, dg, params)) / dn)
    return np.array(out)


def check_lipschitz(lift: BoundaryLift, tail: TailFunction, lam: float, R: float,
                    n_samples: int = 100, seed: int = 0, grid: SpatialGrid | None = None,
                    kgrid: WavenumberGrid | None = None, stability: float = 0.2) -> InequalityReport:
    """max ||J'(p1) - J'(p2)||_H / ||p1 - p2||_H; passes if finite and within
    ``stability`` of the maximum over twice as many samples."""
    params = CarlemanParams(lam, R, grid or SpatialGrid(), kgrid or WavenumberGrid())
    doubled = lipschitz_ratios(lift, tail, params, 2 * n_samples, seed)
    ratios = doubled[:n_samples]
    m1, m2 = ratios.max(), doubled.max()
    passed = bool(np.isfinite(m2) and abs(m2 - m1) <= stability * m1)
    return InequalityReport("lipschitz", n_samples, [lam], float(ratios.min()), float(np.median(ratios)),
                            float(m1), passed, {str(lam): float(m1)},
                            extra={"R": R, "max_ratio_doubled": float(m2)})


def noise_sweep(delta_list, clean: ScatterData, target: StepTarget, grid: SpatialGrid,
                minimizer: MinimizerConfig | None = None, n_seeds: int = 5, seed0: int = 0):
    """Median L2 error of c_comp against the true step for each noise level.

    Returns (rows, passed); failed runs are recorded with error ``nan``.
    """
    from .minimize import DivergenceError
    from .pipeline import invert, l2_error

    c_true = target.on_grid(grid).values
    rows = []
    for i, delta in enumerate(delta_list):
        if not 0 <= delta <= 0.1:
            raise ValueError("noise levels must lie in [0, 0.1]")
        errors = []
        for s in range(n_seeds):
            data = add_noise(clean, delta, seed0 + 1000 * i + s)
            try:
                inv = invert(data, grid, minimizer)
                errors.append(l2_error(inv.result.c_comp, c_true, grid))
            except (DivergenceError, ValueError, np.linalg.LinAlgError):
                errors.append(float("nan"))
        rows.append({"delta": float(delta), "errors": errors, "median": float(np.nanmedian(errors))})
    medians = [r["median"] for r in rows]
    passed = bool(all(b >= a for a, b in zip(medians, medians[1:])))
    return rows, passed
