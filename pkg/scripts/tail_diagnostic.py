"""Compare the QRM tail with the exact v(x, k_hi) and invert with each.

The exact tail is computed from the forward solution, so it needs the true
medium; it serves only to separate tail error from minimizer error.
"""
import argparse

import numpy as np

from imsp1d import SpatialGrid, StepTarget, WavenumberGrid, add_noise, solve_forward, synthesize_data
from imsp1d.dataprep import prepare
from imsp1d.forward import incident_field
from imsp1d.functional import CarlemanParams, build_lift
from imsp1d.minimize import MinimizerConfig, run
from imsp1d.numgrid import diff_matrix
from imsp1d.reconstruct import reconstruct
from imsp1d.tail import TailFunction, choose_alpha, qrm_tail


def exact_tail(target, grid, k):
    """v(x, k) = log(u / u0) / k^2, principal branch at x = 0, continued in x."""
    w = solve_forward(target, k, grid) / incident_field(grid.nodes, k, grid.x0_source)
    ph = np.unwrap(np.angle(w))
    ph += np.angle(w[0]) - ph[0]
    V = (np.log(np.abs(w)) + 1j * ph) / k**2
    D1, D2 = diff_matrix(grid.n_x, grid.h_x, 1), diff_matrix(grid.n_x, grid.h_x, 2)
    return TailFunction(V, D1 @ V, D2 @ V, 0.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-loc", type=float, default=0.3)
    ap.add_argument("--contrast", type=float, default=7.0)
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid, kgrid = SpatialGrid(), WavenumberGrid()
    target = StepTarget(args.x_loc, 0.1, args.contrast)
    data = add_noise(synthesize_data(target, kgrid, grid), args.noise, args.seed)
    pr = prepare(data)
    lift = build_lift(pr.p0, pr.p1, grid)
    tails = {"qrm": qrm_tail(pr, grid, kgrid, choose_alpha(args.noise)),
             "exact": exact_tail(target, grid, kgrid.k_hi)}
    err = np.max(np.abs(tails["qrm"].V - tails["exact"].V)) / np.max(np.abs(tails["exact"].V))
    print(f"relative max-norm error of the QRM tail: {err:.3f}")
    params = CarlemanParams(3.0, None, grid, kgrid)
    for name, tail in tails.items():
        tr = run(None, lift, tail, MinimizerConfig(), params=params)
        res = reconstruct(tr.p, lift, tail, grid, kgrid)
        j = int(np.argmax(res.c_comp))
        print(f"{name:5s} tail: peak {res.P_tilde:.3f} at x = {grid.nodes[j]:.2f}")


if __name__ == "__main__":
    main()
