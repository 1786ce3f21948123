import numpy as np
import pytest


def random_pd(rng, p, *, ridge=0.1):
    """Random well-conditioned symmetric positive definite matrix."""
    a = rng.standard_normal((p, 2 * p))
    return a @ a.T / (2 * p) + ridge * np.eye(p)


def random_factor(rng, p, *, scale=0.5):
    """Random dense lower-triangular factor with diagonal in [0.5, 1.5]."""
    t = np.tril(rng.standard_normal((p, p)) * scale, k=-1)
    t[np.diag_indices(p)] = rng.uniform(0.5, 1.5, p)
    return t


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
