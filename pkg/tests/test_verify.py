import json
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from imsp1d import pipeline
from imsp1d.forward import StepTarget
from imsp1d.functional import CarlemanParams, H_inner, satisfies_constraints
from imsp1d.verify import (HypothesisViolation, carleman_ratio, carleman_sample, check_carleman,
                           check_convexity_gap, check_lipschitz, noise_sweep, random_field)

from conftest import GRID, KGRID

# run-as-oracle fixtures on the noiseless x_loc=0.3 step data
CARLEMAN_COMMON = 0.8546818036275355
CONVEXITY_MIN = {0: 29.677772885386233, 1: 25.847341260062553}
LIPSCHITZ_MAX = 396.10275801548056


def test_carleman_ratio_quadrature_oracle():
    # u = x^2, lambda = 2: weights exp(-4x)
    lam = 2.0
    A = quad(lambda x: 4 * np.exp(-4 * x), 0, 1)[0]
    B = quad(lambda x: 4 * x**2 * np.exp(-4 * x), 0, 1)[0]
    C = quad(lambda x: x**4 * np.exp(-4 * x), 0, 1)[0]
    x = np.linspace(0, 1, 20001)
    got = carleman_ratio(x**2, 2 * x, np.full_like(x, 2.0), x, lam)
    assert got == pytest.approx(A / (A + lam * B + lam**3 * C), rel=1e-7)


@given(seed=st.integers(0, 2**31), lam=st.floats(1.01, 8))
def test_carleman_ratio_in_unit_interval(seed, lam):
    x = np.linspace(0, 1, 401)
    u, u1, u2 = carleman_sample(np.random.default_rng(seed), x)
    assert u[0] == 0 and u1[0] == 0
    r = carleman_ratio(u, u1, u2, x, lam)
    assert 0 < r <= 1


def test_carleman_sample_derivatives():
    x = np.linspace(0, 1, 4001)
    u, u1, u2 = carleman_sample(np.random.default_rng(4), x)
    assert np.allclose(np.gradient(u, x)[2:-2], u1[2:-2], atol=1e-4 * np.abs(u1).max())
    assert np.allclose(np.gradient(u1, x)[2:-2], u2[2:-2], atol=1e-4 * np.abs(u2).max())


def test_check_carleman_fixture():
    rep = check_carleman([2, 3, 5], n_samples=200, seed=0)
    assert rep.passed
    assert rep.min_ratio == pytest.approx(CARLEMAN_COMMON, rel=1e-9)
    assert 0 < rep.min_ratio <= rep.max_ratio <= 1
    assert set(rep.per_lambda) == {"2.0", "3.0", "5.0"}


def test_check_carleman_requires_lambda_above_one():
    for bad in ([1.0], [2.0, 0.5]):
        with pytest.raises(HypothesisViolation):
            check_carleman(bad, n_samples=3)


def test_carleman_deterministic():
    a = check_carleman([3], n_samples=20, seed=7).to_dict()
    b = check_carleman([3], n_samples=20, seed=7).to_dict()
    assert json.dumps(a) == json.dumps(b)


def test_random_field_admissible():
    params = CarlemanParams(3.0, 10.0, GRID, KGRID)
    f = random_field(np.random.default_rng(0), GRID, KGRID, params, 2.5)
    assert satisfies_constraints(f, params)
    assert np.sqrt(H_inner(f, f, params)) == pytest.approx(2.5, rel=1e-12)


@pytest.mark.parametrize("seed", [0, 1])
def test_convexity_gap_lambda3(step_problem, seed):
    _, lift, tail = step_problem
    rep = check_convexity_gap(lift, tail, 3.0, 10.0, 100, seed, GRID, KGRID)
    assert rep.passed and rep.extra["min_gap"] >= 0 and not rep.witnesses
    assert rep.min_ratio == pytest.approx(CONVEXITY_MIN[seed], rel=1e-8)


def test_convexity_fixture_stable_across_seeds():
    a, b = CONVEXITY_MIN.values()
    assert abs(a - b) <= 0.2 * max(a, b)


def test_convexity_gap_noisy_data(noisy_problem):
    _, lift, tail = noisy_problem
    assert check_convexity_gap(lift, tail, 3.0, 10.0, 30, 0, GRID, KGRID).passed


def test_convexity_lambda_zero_report_only(step_problem):
    _, lift, tail = step_problem
    rep = check_convexity_gap(lift, tail, 0.0, 10.0, 20, 0, GRID, KGRID)
    assert rep.passed is None
    assert np.isfinite(rep.min_ratio)


def test_convexity_rejects_bad_args(step_problem):
    _, lift, tail = step_problem
    with pytest.raises(ValueError):
        check_convexity_gap(lift, tail, 3.0, 0.0, 5)


def test_lipschitz_fixture(step_problem):
    _, lift, tail = step_problem
    rep = check_lipschitz(lift, tail, 3.0, 10.0, 100, 0, GRID, KGRID)
    assert rep.passed
    assert rep.max_ratio == pytest.approx(LIPSCHITZ_MAX, rel=1e-8)


def test_lipschitz_lambda_doubling_envelope(step_problem):
    _, lift, tail = step_problem
    m3 = check_lipschitz(lift, tail, 3.0, 10.0, 30, 0, GRID, KGRID).max_ratio
    m6 = check_lipschitz(lift, tail, 6.0, 10.0, 30, 0, GRID, KGRID).max_ratio
    assert m6 / m3 <= np.exp(6) * 1.5


def _fake_inversion(monkeypatch, errors):
    """Replace the inversion by a feed of L2 errors in call order."""
    calls = []
    feed = iter(errors)

    def fake_invert(data, grid, minimizer=None):
        calls.append((data.noise_level, data.seed))
        err = next(feed)
        if err is None:
            raise ValueError("boom")
        return SimpleNamespace(result=SimpleNamespace(c_comp=err))

    monkeypatch.setattr(pipeline, "invert", fake_invert)
    monkeypatch.setattr(pipeline, "l2_error", lambda c, t, g: float(c))
    return calls


def test_noise_sweep_median_semantics(monkeypatch, clean_step):
    # seed 2 is non-monotone across levels, the medians are monotone
    calls = _fake_inversion(monkeypatch, [1.0, 1.0, 5.0, 2.0, 2.0, 0.5])
    rows, passed = noise_sweep([0.0, 0.05], clean_step, StepTarget(0.3, 0.1, 7.0), GRID, n_seeds=3)
    assert passed and [r["median"] for r in rows] == [1.0, 2.0]
    assert [c[1] for c in calls[3:]] == [1000, 1001, 1002]


def test_noise_sweep_detects_decrease_and_records_failures(monkeypatch, clean_step):
    _fake_inversion(monkeypatch, [3.0, None, 1.0, 1.0])
    rows, passed = noise_sweep([0.0, 0.05], clean_step, StepTarget(0.3, 0.1, 7.0), GRID, n_seeds=2)
    assert not passed
    assert np.isnan(rows[0]["errors"][1]) and rows[0]["median"] == 3.0


def test_noise_sweep_rejects_levels(clean_step):
    with pytest.raises(ValueError):
        noise_sweep([0.2], clean_step, StepTarget(0.3, 0.1, 7.0), GRID)
