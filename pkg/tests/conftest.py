import numpy as np
import pytest

from phononblockade import kernels
from phononblockade.model import SystemParams


@pytest.fixture
def baseline():
    return SystemParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


@pytest.fixture(params=kernels.AVAILABLE)
def backend(request):
    """Run a test once per available kernel backend."""
    previous = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


def random_hermitian(rng, d, scale=1.0):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (x + x.conj().T) / 2


def random_density(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real
