import numpy as np
import pytest

from latentfuse import _accel


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    if request.param == "numba" and not _accel.NUMBA_AVAILABLE:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param == "numba")
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_stochastic(rng, n):
    w = rng.random((n, n))
    return w / w.sum(axis=0)
