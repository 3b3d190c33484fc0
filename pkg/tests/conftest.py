import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_sym(rng, d, scale=1.0):
    X = rng.standard_normal((d, d)) * scale
    return 0.5 * (X + X.T)


def random_spd(rng, d, log_range=(-1.0, 1.0)):
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return (Q * np.exp(rng.uniform(*log_range, size=d))) @ Q.T
