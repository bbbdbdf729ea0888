import numpy as np
import pytest

from roughwz import _accel
from roughwz.gsim import UncertaintyInterval, sample_scenario
from roughwz.path_core import TimeGrid

BACKENDS = ["numba", "numpy"] if _accel.HAVE_NUMBA else ["numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param == "numba")
    return request.param


@pytest.fixture
def g_interval():
    return UncertaintyInterval(0.5, 1.0)


@pytest.fixture
def unit_interval():
    return UncertaintyInterval(1.0, 1.0)


@pytest.fixture
def sample_256(g_interval):
    return sample_scenario("bang_bang_random", g_interval, TimeGrid(256), 7)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
