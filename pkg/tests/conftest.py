import numpy as np
import pytest

from texpat.kernels import get_backend


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope='session', autouse=True)
def _warm_backend():
    # Compile the jitted kernels once so timed tests measure steady state.
    get_backend().warmup()
