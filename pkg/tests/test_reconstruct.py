import numpy as np
import pytest
from hypothesis import given, strategies as st

from imsp1d.functional import CarlemanParams, build_lift, enforce_constraints
from imsp1d.reconstruct import (ABOVE, BELOW, AmbiguousModeError, coefficient_from_v, estimate_contrast,
                                postprocess, reconstruct, recover_v_at_klo, smooth)
from imsp1d.tail import TailFunction

from conftest import GRID, KGRID
from reference_values import DIELECTRIC_ROWS

ZERO_LIFT = build_lift(np.zeros(11), np.zeros(11), GRID)


def tail_of(V):
    V = np.asarray(V, dtype=complex)
    return TailFunction(V, np.zeros_like(V), np.zeros_like(V), 1.0)


def test_recover_v_examples():
    V = np.linspace(0, 1, 51) * (1 - 2j)
    assert np.array_equal(recover_v_at_klo(np.zeros((51, 11)), ZERO_LIFT, tail_of(V), KGRID), V)
    gam = 0.4 + 0.1j
    v = recover_v_at_klo(np.full((51, 11), gam), ZERO_LIFT, tail_of(np.zeros(51)), KGRID)
    assert np.allclose(v, -gam)


def test_recover_v_exact_chain(exact_fields):
    v, q = exact_fields
    got = recover_v_at_klo(q, ZERO_LIFT, tail_of(v[:, -1]), KGRID)
    # trapezoid in k at h_k = 0.1
    assert np.max(np.abs(got - v[:, 0])) < 1e-2 * np.max(np.abs(v[:, 0]))


def test_coefficient_examples():
    x = GRID.nodes
    assert np.allclose(coefficient_from_v(np.zeros(51), 0.5, GRID), 1.0)
    assert np.allclose(coefficient_from_v(2j * x, 0.5, GRID), 2.0)
    assert np.allclose(coefficient_from_v(np.zeros(51), 0.5, GRID, BELOW), 1.0)
    with pytest.raises(ValueError):
        coefficient_from_v(np.zeros(51), 0.5, GRID, "sideways")


@given(seed=st.integers(0, 2**31))
def test_coefficient_sides_of_unity(seed):
    v = np.random.default_rng(seed).normal(size=(51, 2)) @ [1, 1j]
    assert np.all(coefficient_from_v(v, 0.5, GRID, ABOVE) >= 1)
    assert np.all(coefficient_from_v(v, 0.5, GRID, BELOW) <= 1)


def test_smooth_windows():
    c = np.zeros(7)
    c[3] = 3.0
    assert np.allclose(smooth(c, 3), [0, 0, 1, 1, 1, 0, 0])
    assert np.allclose(smooth(c, 2), [0, 0, 1.5, 1.5, 0, 0, 0])
    with pytest.raises(ValueError):
        smooth(c, 4)


def test_postprocess_examples():
    assert np.array_equal(postprocess(np.ones(51)), np.ones(51))
    c = np.ones(51)
    c[20] = 7.0
    out = postprocess(c)
    assert np.array_equal(np.nonzero(out > 1)[0], [19, 20, 21])
    assert np.all(out[:19] == 1) and np.all(out[22:] == 1)
    below = np.ones(51)
    below[10:20] = 0.71
    below[30] = 0.05  # under the 0.1 cutoff, dropped
    out = postprocess(below, BELOW)
    assert np.all(out[10:20] == 0.71) and out[30] == 1.0
    assert estimate_contrast(out, BELOW)[0] == 0.71


def test_postprocess_idempotent_on_plateau():
    c = np.ones(51)
    c[10:25] = 4.0
    once = postprocess(c)
    plateau = np.ones(51)
    plateau[once > 1] = once.max()
    kept = np.nonzero(plateau > 1)[0]
    twice = postprocess(plateau)
    # interior of the plateau is a fixed point; the three-point mean lowers
    # each edge node to (1 + 2P)/3 < 0.8 P, so the edges are dropped
    assert np.array_equal(twice[kept[1:-1]], plateau[kept[1:-1]])
    assert np.array_equal(np.nonzero(twice > 1)[0], kept[1:-1])


def test_estimate_contrast_examples():
    assert estimate_contrast(np.ones(51)) == (1.0, (1.0, 1.0))
    assert estimate_contrast(np.ones(51), ABOVE, (3, 5)) == (1.0, (3.0, 5.0))
    mixed = np.ones(51)
    mixed[3], mixed[9] = 2.0, 0.5
    with pytest.raises(AmbiguousModeError):
        estimate_contrast(mixed)


@pytest.mark.parametrize("name,P,bg,est", DIELECTRIC_ROWS)
def test_dielectric_estimate_arithmetic(name, P, bg, est):
    mode = BELOW if P < 1 else ABOVE
    c = np.ones(51)
    c[20:25] = P
    P_got, (lo, hi) = estimate_contrast(postprocess(c, mode) if mode == BELOW else c, mode, bg)
    assert P_got == P
    assert round(lo, 2) == est[0] and round(hi, 2) == est[1]
    assert abs(lo - est[0]) < 1e-12 and abs(hi - est[1]) < 1e-12


def test_reconstruct_from_exact_minimizer(exact_fields, step_problem):
    """With the exact tail and the exact p, the step is recovered."""
    from imsp1d.numgrid import diff_matrix
    v, q = exact_fields
    _, lift, _ = step_problem
    V = v[:, -1]
    tail = TailFunction(V, diff_matrix(51, GRID.h_x, 1) @ V, diff_matrix(51, GRID.h_x, 2) @ V, 0.0)
    p = enforce_constraints(q - lift.m, CarlemanParams(3.0, None, GRID, KGRID))
    r = reconstruct(p, lift, tail, GRID, KGRID)
    j = int(np.argmax(r.c_comp))
    assert abs(GRID.nodes[j] - 0.3) <= 0.05
    assert r.P_tilde == pytest.approx(7.0, rel=0.05)
    assert np.all(r.c_comp >= 1) and r.P_tilde == r.c_comp.max()
