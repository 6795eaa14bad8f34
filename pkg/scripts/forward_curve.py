"""|u(0, k)| of the step target over k in [0.2, 3.2]."""
import argparse
from pathlib import Path

import numpy as np

from imsp1d import SpatialGrid, StepTarget, solve_forward


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-loc", type=float, default=0.3)
    ap.add_argument("--contrast", type=float, default=7.0)
    ap.add_argument("--n-k", type=int, default=61)
    ap.add_argument("--quad-n", type=int, default=2000)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    target = StepTarget(args.x_loc, 0.1, args.contrast)
    grid = SpatialGrid()
    ks = np.linspace(0.2, 3.2, args.n_k)
    u = np.array([solve_forward(target, k, grid, args.quad_n)[0] for k in ks])
    args.out.mkdir(parents=True, exist_ok=True)
    np.savetxt(args.out / "u0_curve.csv", np.column_stack([ks, np.abs(u), u.real, u.imag]),
               delimiter=",", fmt="%.17g", header="k,abs_u0,re_u0,im_u0", comments="")
    lo, hi = np.abs(u)[ks <= 1.0].max(), np.abs(u)[(ks >= 2.0) & (ks <= 3.0)].max()
    print(f"max |u(0,k)| on [0.2,1]: {lo:.4f}   on [2,3]: {hi:.4f}   ratio {hi / lo:.3f}")


if __name__ == "__main__":
    main()
