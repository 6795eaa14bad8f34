"""Command-line entry point: ``imsp1d {simulate,reconstruct,verify,pipeline}``.

Exit codes: 0 success / pass, 1 check failed, 2 invalid config, 3 numerical
divergence, 4 I/O or data-format error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig, dump_config, load_config
from .dataprep import CoverageError, DataFormatError, DegenerateDataError, ingest_external, write_data
from .forward import ScatterData, SolverError, StepTarget, add_noise, solve_forward, synthesize_data
from .minimize import DivergenceError
from .numgrid import WavenumberGrid
from .pipeline import error_metrics, invert
from .reconstruct import AmbiguousModeError
from .tail import choose_alpha
from . import verify

log = logging.getLogger("imsp1d")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 1, 2, 3, 4

# wavenumbers of the |u(0, k)| curve written by ``simulate``
CURVE_K = WavenumberGrid(0.2, 3.2, 31)


# output helpers ---------------------------------------------------------------

def _header(cfg: ExperimentConfig) -> str:
    return f"resolved config (seed = {cfg.noise.seed})\n" + dump_config(cfg).rstrip("\n")


def write_csv(path: Path, columns: dict, cfg: ExperimentConfig):
    """Columns of floats (complex split into re/im by the caller), 17 digits."""
    names = list(columns)
    table = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    with open(path, "w", encoding="utf-8") as fh:
        for line in _header(cfg).splitlines():
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for row in table:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_json(path: Path, payload: dict, cfg: ExperimentConfig):
    payload = dict(payload, seed=cfg.noise.seed, config=dump_config(cfg))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(type(obj).__name__)


def _target(cfg: ExperimentConfig) -> StepTarget:
    return StepTarget(cfg.target.x_loc, cfg.target.d, cfg.target.contrast)


def _simulate(cfg: ExperimentConfig, target=None):
    grid, kgrid = cfg.grid.spatial(), cfg.grid.wavenumbers()
    clean = synthesize_data(target or _target(cfg), kgrid, grid, cfg.grid.quad_n)
    return clean, add_noise(clean, cfg.noise.level, cfg.noise.seed)


def _alpha(cfg: ExperimentConfig) -> float:
    return choose_alpha(cfg.noise.level) if cfg.tail.alpha is None else cfg.tail.alpha


def _write_trace(path: Path, trace, cfg):
    write_csv(path, {"iter": trace.iters, "J": trace.J, "grad_norm": trace.grad_norm,
                     "grad_l2": trace.grad_l2, "p_norm": trace.p_norm}, cfg)


# subcommands ---------------------------------------------------------------------

def cmd_simulate(cfg: ExperimentConfig, out: Path, curve: bool = True) -> int:
    clean, noisy = _simulate(cfg)
    k = clean.kgrid.nodes
    write_csv(out / "data.csv", {"k": k, "re_g0": clean.g0.real, "im_g0": clean.g0.imag,
                                 "re_g0_noisy": noisy.g0.real, "im_g0_noisy": noisy.g0.imag}, cfg)
    write_data(out / "g0_noisy.csv", noisy, "g0", cfg.grid.x0_source, header=_header(cfg))
    if curve:
        grid, target = cfg.grid.spatial(), _target(cfg)
        ks = CURVE_K.nodes
        u = np.array([solve_forward(target, kk, grid, cfg.grid.quad_n)[0] for kk in ks])
        write_csv(out / "u0_curve.csv", {"k": ks, "abs_u0": np.abs(u), "re_u0": u.real, "im_u0": u.imag}, cfg)
    log.info("wrote simulated data to %s", out)
    return EXIT_OK


def load_data(cfg: ExperimentConfig, data_path=None) -> ScatterData:
    path = data_path or cfg.data.path
    if path is None:
        return _simulate(cfg)[1]
    data = ingest_external(path, cfg.grid.wavenumbers(), cfg.data.calibration, cfg.grid.x0_source)
    return dataclasses.replace(data, noise_level=cfg.noise.level)


def cmd_reconstruct(cfg: ExperimentConfig, out: Path, data_path=None) -> int:
    data = load_data(cfg, data_path)
    grid = cfg.grid.spatial()
    t0 = time.perf_counter()
    try:
        inv = invert(data, grid, cfg.minimizer, _alpha(cfg), cfg.reconstruct.mode,
                     cfg.reconstruct.c_bckgr, cfg.reconstruct.window)
    except DivergenceError as exc:
        _write_trace(out / "trace.csv", exc.trace, cfg)
        write_json(out / "summary.json", {"status": "diverged", "message": str(exc),
                                          "runtime_s": time.perf_counter() - t0}, cfg)
        log.error("%s", exc)
        return EXIT_DIVERGED
    res = inv.result
    _write_trace(out / "trace.csv", inv.trace, cfg)
    write_csv(out / "c_comp.csv", {"x": grid.nodes, "c_tilde": res.c_tilde, "c_comp": res.c_comp}, cfg)
    j = int(np.argmax(res.c_comp) if res.mode == "above-unity" else np.argmin(res.c_comp))
    write_json(out / "summary.json", {
        "status": "ok", "mode": res.mode, "P_tilde": res.P_tilde,
        "c_bckgr_range": list(res.c_bckgr_range), "c_est_range": list(res.c_est_range),
        "peak_x": float(grid.nodes[j]), "iterations": inv.trace.iters[-1],
        "final_J": inv.trace.J[-1], "final_grad_norm": inv.trace.grad_norm[-1],
        "runtime_s": time.perf_counter() - t0}, cfg)
    log.info("P_tilde = %.4g at x = %.3g", res.P_tilde, grid.nodes[j])
    return EXIT_OK


def _step_problem(cfg: ExperimentConfig):
    from .dataprep import prepare
    from .functional import build_lift
    from .tail import qrm_tail
    noisy = _simulate(cfg)[1]
    grid, kgrid = cfg.grid.spatial(), cfg.grid.wavenumbers()
    pr = prepare(noisy)
    return build_lift(pr.p0, pr.p1, grid), qrm_tail(pr, grid, kgrid, _alpha(cfg)), grid, kgrid


def cmd_verify(cfg: ExperimentConfig, out: Path, kind: str, lam=None) -> int:
    v = cfg.verify
    seed = cfg.noise.seed
    lam = v.lam if lam is None else lam
    if kind == "carleman":
        report = verify.check_carleman(v.lambdas, v.carleman_samples, seed).to_dict()
    elif kind in ("convexity", "lipschitz"):
        lift, tail, grid, kgrid = _step_problem(cfg)
        check = verify.check_convexity_gap if kind == "convexity" else verify.check_lipschitz
        report = check(lift, tail, lam, v.R, v.n_samples, seed, grid, kgrid).to_dict()
    elif kind == "noise-sweep":
        clean = _simulate(cfg)[0]
        rows, passed = verify.noise_sweep(v.deltas, clean, _target(cfg), cfg.grid.spatial(),
                                          cfg.minimizer, v.n_seeds, seed)
        report = {"name": "noise-sweep", "rows": rows, "passed": passed}
    else:
        raise ValueError(f"unknown check {kind!r}")
    write_json(out / f"report_{kind}.json", report, cfg)
    passed = report["passed"]
    log.info("%s: passed=%s", kind, passed)
    return EXIT_OK if passed is None or passed else EXIT_FAIL


def cmd_pipeline(cfg: ExperimentConfig, out: Path) -> int:
    grid = cfg.grid.spatial()
    rows, status = [], EXIT_OK
    for contrast in cfg.pipeline.contrasts:
        for x_loc in cfg.pipeline.x_locs:
            target = StepTarget(x_loc, cfg.target.d, contrast)
            sub = out / f"x{x_loc:g}_c{contrast:g}"
            sub.mkdir(parents=True, exist_ok=True)
            noisy = _simulate(cfg, target)[1]
            row = {"x_loc": x_loc, "contrast": contrast}
            try:
                inv = invert(noisy, grid, cfg.minimizer, _alpha(cfg), cfg.reconstruct.mode,
                             cfg.reconstruct.c_bckgr, cfg.reconstruct.window)
            except DivergenceError as exc:
                _write_trace(sub / "trace.csv", exc.trace, cfg)
                row.update(status="diverged")
                status = EXIT_DIVERGED
            else:
                _write_trace(sub / "trace.csv", inv.trace, cfg)
                c_true = target.on_grid(grid).values
                write_csv(sub / "c_comp.csv", {"x": grid.nodes, "c_tilde": inv.result.c_tilde,
                                               "c_comp": inv.result.c_comp, "c_true": c_true}, cfg)
                row.update(status="ok", **error_metrics(inv.result, target, grid))
            rows.append(row)
            log.info("x_loc=%g contrast=%g: %s", x_loc, contrast, row)
    write_json(out / "metrics.json", {"rows": rows}, cfg)
    ok = [r for r in rows if r["status"] == "ok"]
    if ok:
        keys = ["x_loc", "contrast", "l2_error", "peak_x", "peak_value", "peak_location_error", "peak_value_error"]
        write_csv(out / "metrics.csv", {k: [r[k] for r in ok] for k in keys}, cfg)
    return status


# argument parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value config file")
    common.add_argument("--out", type=Path, help="output directory (overrides [output] dir)")
    common.add_argument("--seed", type=int, help="noise / sampling seed (overrides config)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="imsp1d", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", parents=[common], help="synthesize g0(k) for the configured target")
    p.add_argument("--no-curve", action="store_true", help="skip the |u(0,k)| curve")
    p = sub.add_parser("reconstruct", parents=[common], help="invert data for c(x)")
    p.add_argument("--data", type=Path, help="external data file (k, re, im, kind)")
    p = sub.add_parser("verify", parents=[common], help="empirical inequality checks")
    p.add_argument("kind", choices=["carleman", "convexity", "lipschitz", "noise-sweep"])
    p.add_argument("--lambda", dest="lam", type=float, help="lambda for convexity / lipschitz")
    sub.add_parser("pipeline", parents=[common], help="simulate, invert and score a batch of targets")
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig().validate()
    if args.seed is not None:
        cfg.noise = dataclasses.replace(cfg.noise, seed=args.seed)
    if args.out is not None:
        cfg.out = str(args.out)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            return cmd_simulate(cfg, out, not args.no_curve)
        if args.command == "reconstruct":
            return cmd_reconstruct(cfg, out, args.data)
        if args.command == "verify":
            return cmd_verify(cfg, out, args.kind, args.lam)
        return cmd_pipeline(cfg, out)
    except (DataFormatError, CoverageError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SolverError, DegenerateDataError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (AmbiguousModeError, verify.HypothesisViolation, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
