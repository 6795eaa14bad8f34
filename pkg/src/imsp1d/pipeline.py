"""End-to-end inversion: data -> tail -> Carleman minimization -> coefficient."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataprep import PreparedData, prepare
from .forward import ScatterData, StepTarget, add_noise, synthesize_data
from .functional import BoundaryLift, CarlemanParams, build_lift
from .minimize import MinimizerConfig, MinimizeTrace, run
from .numgrid import SpatialGrid, trapz_weights
from .reconstruct import ABOVE, ReconstructionResult, reconstruct
from .tail import TailFunction, choose_alpha, qrm_tail


@dataclass
class Inversion:
    prepared: PreparedData
    tail: TailFunction
    lift: BoundaryLift
    trace: MinimizeTrace
    result: ReconstructionResult


def invert(data: ScatterData, grid: SpatialGrid, minimizer: MinimizerConfig | None = None,
           alpha: float | None = None, mode: str = ABOVE, c_bckgr_range=(1.0, 1.0),
           window: int = 3) -> Inversion:
    """Run the full algorithm from boundary data g0(k).

    ``alpha`` defaults to the rule alpha = delta^2 with delta the data's
    recorded noise level. A :class:`minimize.DivergenceError` propagates.
    """
    minimizer = minimizer or MinimizerConfig()
    kgrid = data.kgrid
    prepared = prepare(data)
    alpha = choose_alpha(data.noise_level) if alpha is None else alpha
    tail = qrm_tail(prepared, grid, kgrid, alpha)
    lift = build_lift(prepared.p0, prepared.p1, grid)
    params = CarlemanParams(minimizer.lam, minimizer.R, grid, kgrid)
    trace = run(None, lift, tail, minimizer, params=params)
    result = reconstruct(trace.p, lift, tail, grid, kgrid, mode, c_bckgr_range, window)
    return Inversion(prepared, tail, lift, trace, result)


def l2_error(c_comp, c_true, grid: SpatialGrid) -> float:
    w = trapz_weights(grid.n_x, grid.h_x)
    return float(np.sqrt(w @ (np.asarray(c_comp) - np.asarray(c_true)) ** 2))


def error_metrics(result: ReconstructionResult, target: StepTarget, grid: SpatialGrid) -> dict:
    c_true = target.on_grid(grid).values
    j = int(np.argmax(result.c_comp))
    return {
        "l2_error": l2_error(result.c_comp, c_true, grid),
        "peak_x": float(grid.nodes[j]),
        "peak_value": float(result.c_comp[j]),
        "peak_location_error": float(abs(grid.nodes[j] - target.x_loc)),
        "peak_value_error": float(abs(result.c_comp[j] - target.contrast)),
    }


def simulate(target: StepTarget, grid: SpatialGrid, kgrid, quad_n: int = 2000,
             noise: float = 0.0, seed: int = 0):
    clean = synthesize_data(target, kgrid, grid, quad_n)
    return clean, add_noise(clean, noise, seed)
