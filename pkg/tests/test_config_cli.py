import json

import numpy as np
import pytest

from imsp1d.cli import EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO, EXIT_OK, main
from imsp1d.config import ConfigError, ExperimentConfig, dump_config, load_config, parse_config

FAST_SECTIONS = {
    "grid": {"quad_n": "200"},
    "minimizer": {"max_iter": "40", "log_every": "10"},
    "verify": {"n_samples": "8", "carleman_samples": "20", "deltas": "0, 0.05", "n_seeds": "2"},
}


def config_text(**overrides):
    """FAST_SECTIONS merged with ``section={key: value}`` overrides."""
    sections = {k: dict(v) for k, v in FAST_SECTIONS.items()}
    for name, kv in overrides.items():
        sections.setdefault(name, {}).update(kv)
    return "".join(f"[{name}]\n" + "".join(f"{k} = {v}\n" for k, v in kv.items())
                   for name, kv in sections.items())


FAST = config_text()


def read_csv(path):
    """Numeric table after the comment header and the column-name row."""
    rows = [line for line in open(path, encoding="utf-8").read().splitlines() if not line.startswith("#")]
    return np.array([[float(v) for v in row.split(",")] for row in rows[1:]], ndmin=2)


def run(tmp_path, *argv, config=FAST, name="cfg.ini"):
    cfg = tmp_path / name
    cfg.write_text(config)
    return main([*argv, "--config", str(cfg), "--out", str(tmp_path / "out")])


# config ---------------------------------------------------------------------------

def test_default_experiment_setup():
    cfg = ExperimentConfig().validate()
    g, m = cfg.grid, cfg.minimizer
    assert (g.h_x, g.k_lo, g.k_hi, g.h_k, g.x0_source) == (0.02, 0.5, 1.5, 0.1, -1.0)
    assert (m.lam, m.gamma, m.max_iter, cfg.noise.level) == (3.0, 1e-5, 5000, 0.05)
    assert cfg.grid.spatial().n_x == 51 and cfg.grid.wavenumbers().n_k == 11


def test_dump_parse_round_trip():
    cfg = parse_config(FAST + "[carleman]\nlambda = 2.5\nR = 7\n[reconstruct]\nc_bckgr = 3, 5\n")
    again = parse_config(dump_config(cfg))
    assert again == cfg
    assert cfg.minimizer.lam == 2.5 and cfg.minimizer.R == 7.0 and cfg.reconstruct.c_bckgr == (3.0, 5.0)


def test_unbounded_radius_spelling():
    assert parse_config("[minimizer]\nR = unbounded\n").minimizer.R is None


@pytest.mark.parametrize("text,path", [
    ("[grid]\nh_x = abc\n", "grid.h_x"),
    ("[grid]\nnope = 1\n", "grid.nope"),
    ("[noise]\nlevel = -0.1\n", "noise.level"),
    ("[reconstruct]\nmode = sideways\n", "reconstruct.mode"),
    ("[reconstruct]\nc_bckgr = 5, 3\n", "reconstruct.c_bckgr"),
    ("[tail]\nalpha = 0\n", "tail.alpha"),
    ("[bogus]\nx = 1\n", "bogus"),
])
def test_config_errors_name_the_field(text, path):
    with pytest.raises(ConfigError, match=path.replace(".", r"\.")):
        parse_config(text)


def test_load_config_file(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[noise]\nseed = 9  # trailing comment\n")
    assert load_config(p).noise.seed == 9


# cli --------------------------------------------------------------------------------

def test_simulate_outputs(tmp_path):
    assert run(tmp_path, "simulate", "--seed", "5") == EXIT_OK
    out = tmp_path / "out"
    data = read_csv(out / "data.csv")
    assert data.shape == (11, 5)
    for name in ("data.csv", "g0_noisy.csv", "u0_curve.csv"):
        text = (out / name).read_text()
        assert "seed = 5" in text and "[minimizer]" in text and "quad_n = 200" in text


def test_simulate_background_noise_bound(tmp_path):
    assert run(tmp_path, "simulate", "--no-curve", config=config_text(target={"contrast": "1"})) == EXIT_OK
    d = read_csv(tmp_path / "out" / "data.csv")
    assert np.allclose(d[:, 1], 1, atol=1e-8) and np.allclose(d[:, 2], 0, atol=1e-8)
    assert np.all(np.abs(d[:, 3] + 1j * d[:, 4] - 1) <= 0.05 * np.sqrt(2))
    assert not (tmp_path / "out" / "u0_curve.csv").exists()


def test_simulate_deterministic(tmp_path):
    names = ("data.csv", "g0_noisy.csv", "u0_curve.csv")
    assert run(tmp_path, "simulate", "--seed", "3") == EXIT_OK
    first = [(tmp_path / "out" / n).read_bytes() for n in names]
    assert run(tmp_path, "simulate", "--seed", "3") == EXIT_OK
    assert first == [(tmp_path / "out" / n).read_bytes() for n in names]


def test_csv_floats_round_trip(tmp_path):
    assert run(tmp_path, "simulate", "--no-curve") == EXIT_OK
    from imsp1d.dataprep import ingest_external
    from imsp1d.numgrid import WavenumberGrid
    d = read_csv(tmp_path / "out" / "data.csv")
    ing = ingest_external(tmp_path / "out" / "g0_noisy.csv", WavenumberGrid())
    assert np.array_equal(ing.g0, d[:, 3] + 1j * d[:, 4])


def test_reconstruct_outputs(tmp_path):
    assert run(tmp_path, "reconstruct") == EXIT_OK
    out = tmp_path / "out"
    trace = read_csv(out / "trace.csv")
    assert list(trace[:, 0]) == [0, 10, 20, 30, 40]
    c = read_csv(out / "c_comp.csv")
    assert c.shape == (51, 3) and np.all(c[:, 2] >= 1)
    s = json.loads((out / "summary.json").read_text())
    assert s["status"] == "ok" and s["P_tilde"] == pytest.approx(c[:, 2].max())
    assert "seed" in s and "[grid]" in s["config"]


def test_reconstruct_from_external_data(tmp_path):
    assert run(tmp_path, "simulate", "--no-curve") == EXIT_OK
    data = tmp_path / "out" / "g0_noisy.csv"
    cfg = tmp_path / "cfg.ini"
    rc = main(["reconstruct", "--config", str(cfg), "--data", str(data), "--out", str(tmp_path / "ext")])
    assert rc == EXIT_OK
    internal = tmp_path / "int"
    assert main(["reconstruct", "--config", str(cfg), "--out", str(internal)]) == EXIT_OK
    a = read_csv(tmp_path / "ext" / "c_comp.csv")
    b = read_csv(internal / "c_comp.csv")
    assert np.array_equal(a, b)


def test_reconstruct_divergence_exit_code(tmp_path):
    cfg = config_text(minimizer={"gamma": "1.0", "max_iter": "200"})
    assert run(tmp_path, "reconstruct", config=cfg) == EXIT_DIVERGED
    assert read_csv(tmp_path / "out" / "trace.csv").shape[0] >= 2
    assert json.loads((tmp_path / "out" / "summary.json").read_text())["status"] == "diverged"


def test_missing_data_file_is_io_error(tmp_path):
    assert run(tmp_path, "reconstruct", "--data", str(tmp_path / "missing.csv")) == EXIT_IO


def test_bad_config_exit_code(tmp_path):
    assert run(tmp_path, "simulate", config="[grid]\nh_x = -1\n") == EXIT_CONFIG
    assert main(["simulate", "--config", str(tmp_path / "nope.ini")]) == EXIT_IO


def test_verify_reports(tmp_path):
    out = tmp_path / "out"
    assert run(tmp_path, "verify", "carleman") == EXIT_OK
    rep = json.loads((out / "report_carleman.json").read_text())
    assert rep["passed"] is True and rep["n_samples"] == 20
    assert run(tmp_path, "verify", "convexity") == EXIT_OK
    assert json.loads((out / "report_convexity.json").read_text())["passed"] is True
    assert run(tmp_path, "verify", "convexity", "--lambda", "0") == EXIT_OK
    assert json.loads((out / "report_convexity.json").read_text())["passed"] is None


def test_verify_lambda_below_one_rejected(tmp_path):
    cfg = config_text(verify={"lambdas": "0.5"})
    assert run(tmp_path, "verify", "carleman", config=cfg) == EXIT_CONFIG


def test_pipeline_batch(tmp_path):
    cfg = config_text(pipeline={"x_locs": "0.1, 0.2, 0.3, 0.4"})
    assert run(tmp_path, "pipeline", config=cfg) == EXIT_OK
    m = json.loads((tmp_path / "out" / "metrics.json").read_text())
    assert len(m["rows"]) == 4 and all(r["status"] == "ok" for r in m["rows"])
    assert read_csv(tmp_path / "out" / "metrics.csv").shape == (4, 7)
    assert (tmp_path / "out" / "x0.4_c7" / "c_comp.csv").exists()
