import os
import sys
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from imsp1d.dataprep import prepare  # noqa: E402
from imsp1d.forward import StepTarget, add_noise, synthesize_data  # noqa: E402
from imsp1d.functional import build_lift  # noqa: E402
from imsp1d.numgrid import SpatialGrid, WavenumberGrid  # noqa: E402
from imsp1d.tail import choose_alpha, qrm_tail  # noqa: E402

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")

GRID = SpatialGrid()
KGRID = WavenumberGrid()


@lru_cache(maxsize=None)
def step_data(x_loc=0.3, contrast=7.0, quad_n=2000):
    """Noiseless g0 for a width-0.1 step on the default grids (cached per session)."""
    return synthesize_data(StepTarget(x_loc, 0.1, contrast), KGRID, GRID, quad_n)


def problem(data):
    """(prepared, lift, tail) for the given data, alpha from its noise level."""
    pr = prepare(data)
    return pr, build_lift(pr.p0, pr.p1, GRID), qrm_tail(pr, GRID, KGRID, choose_alpha(data.noise_level))


@pytest.fixture(scope="session")
def grid():
    return GRID


@pytest.fixture(scope="session")
def kgrid():
    return KGRID


@pytest.fixture(scope="session")
def clean_step():
    return step_data()


@pytest.fixture(scope="session")
def noisy_step(clean_step):
    return add_noise(clean_step, 0.05, 1)


@pytest.fixture(scope="session")
def step_problem(clean_step):
    return problem(clean_step)


@pytest.fixture(scope="session")
def noisy_problem(noisy_step):
    return problem(noisy_step)


@pytest.fixture(scope="session")
def exact_fields():
    """Exact (v, q) for the x_loc=0.3 step from the forward model."""
    from oracles import exact_chain
    return exact_chain(StepTarget(0.3, 0.1, 7.0), GRID, KGRID, quad_n=500)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
