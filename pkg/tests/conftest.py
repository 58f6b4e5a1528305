import numpy as np
import pytest


def random_hermitian(rng, n, scale=1.0):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (A + A.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
