import numpy as np
import pytest

from geodaug import _kernels


@pytest.fixture(scope="session", autouse=True)
def compile_kernels():
    # JIT-compile the numba kernels once so individual tests measure solve
    # time, not compilation.
    _kernels.warmup()


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
