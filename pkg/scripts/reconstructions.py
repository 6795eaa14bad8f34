"""Reconstructed c(x) for a batch of step targets."""
import argparse
import json
from pathlib import Path

import numpy as np

from imsp1d import SpatialGrid, StepTarget, WavenumberGrid, add_noise, synthesize_data
from imsp1d.minimize import MinimizerConfig
from imsp1d.pipeline import error_metrics, invert


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-locs", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])
    ap.add_argument("--contrasts", type=float, nargs="+", default=[7.0])
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lam", type=float, default=3.0)
    ap.add_argument("--iters", type=int, default=5000)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    grid, kgrid = SpatialGrid(), WavenumberGrid()
    cfg = MinimizerConfig(max_iter=args.iters, lam=args.lam)
    args.out.mkdir(parents=True, exist_ok=True)
    rows = []
    for contrast in args.contrasts:
        for x_loc in args.x_locs:
            target = StepTarget(x_loc, 0.1, contrast)
            data = add_noise(synthesize_data(target, kgrid, grid), args.noise, args.seed)
            res = invert(data, grid, cfg).result
            np.savetxt(args.out / f"recon_x{x_loc:g}_c{contrast:g}.csv",
                       np.column_stack([grid.nodes, res.c_tilde, res.c_comp, target.on_grid(grid).values]),
                       delimiter=",", fmt="%.17g", header="x,c_tilde,c_comp,c_true", comments="")
            m = dict(x_loc=x_loc, contrast=contrast, **error_metrics(res, target, grid))
            rows.append(m)
            print(f"x_loc={x_loc:g} contrast={contrast:g}: peak {m['peak_value']:.3f} at x={m['peak_x']:.2f}, "
                  f"L2 error {m['l2_error']:.3f}")
    (args.out / "recon_metrics.json").write_text(json.dumps(rows, indent=2) + "\n")


if __name__ == "__main__":
    main()
