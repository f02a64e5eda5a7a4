import numpy as np
import pytest

from jellium2d.model import total_energy


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def finite_difference_gradient(params, config, h=1e-6):
    """Central-difference oracle for the energy gradient."""
    config = np.asarray(config, dtype=float)
    grad = np.zeros_like(config)
    for i in range(config.shape[0]):
        for d in range(2):
            up = config.copy()
            dn = config.copy()
            up[i, d] += h
            dn[i, d] -= h
            grad[i, d] = (total_energy(params, up) - total_energy(params, dn)) / (2 * h)
    return grad
