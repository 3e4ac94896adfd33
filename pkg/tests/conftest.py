import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)


def random_unit(rng, n=None):
    """Uniform random unit quaternion(s)."""
    v = rng.standard_normal(4 if n is None else (n, 4))
    return v / np.linalg.norm(v, axis=-1, keepdims=n is not None)
