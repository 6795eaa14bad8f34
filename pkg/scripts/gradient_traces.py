"""Gradient-norm traces of the descent at several lambda."""
import argparse
from pathlib import Path

import numpy as np

from imsp1d import SpatialGrid, StepTarget, WavenumberGrid, add_noise, synthesize_data
from imsp1d.dataprep import prepare
from imsp1d.functional import CarlemanParams, build_lift
from imsp1d.minimize import DivergenceError, MinimizerConfig, run
from imsp1d.tail import choose_alpha, qrm_tail


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambdas", type=float, nargs="+", default=[0.0, 3.0])
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--iters", type=int, default=5000)
    ap.add_argument("--gamma", type=float, default=1e-5)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    grid, kgrid = SpatialGrid(), WavenumberGrid()
    data = add_noise(synthesize_data(StepTarget(0.3, 0.1, 7.0), kgrid, grid), args.noise, args.seed)
    pr = prepare(data)
    lift = build_lift(pr.p0, pr.p1, grid)
    tail = qrm_tail(pr, grid, kgrid, choose_alpha(args.noise))
    args.out.mkdir(parents=True, exist_ok=True)
    for lam in args.lambdas:
        cfg = MinimizerConfig(gamma=args.gamma, max_iter=args.iters, lam=lam)
        try:
            tr, status = run(None, lift, tail, cfg, params=CarlemanParams(lam, None, grid, kgrid)), "ok"
        except DivergenceError as exc:
            tr, status = exc.trace, "diverged"
        np.savetxt(args.out / f"trace_lambda{lam:g}.csv", tr.as_array(), delimiter=",", fmt="%.17g",
                   header="iter,J,grad_norm,grad_l2,p_norm", comments="")
        print(f"lambda={lam:g} ({status}): |J'| {tr.grad_norm[0]:.4g} -> {tr.grad_norm[-1]:.4g} "
              f"after {tr.iters[-1]} iterations")


if __name__ == "__main__":
    main()
