import numpy as np
import pytest

from hurstbench import FgnModel, GeneratorSpec, generate_fgn


@pytest.fixture(scope="session")
def fgn_series():
    """Factory for seeded fGn series, cached across tests."""
    cache = {}

    def make(h: float, n: int, seed: int, sigma2: float = 1.0):
        key = (h, n, seed, sigma2)
        if key not in cache:
            cache[key] = generate_fgn(GeneratorSpec(FgnModel(h, sigma2), n, seed))
        return cache[key]

    return make


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
