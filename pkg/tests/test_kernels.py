import numpy as np
import pytest

from jellium2d import _kernels
from jellium2d._kernels import pairwise_numpy

compiled = pytest.importorskip("jellium2d._kernels._pairwise")


def test_implementation_selected():
    assert _kernels.IMPLEMENTATION in ("cython", "numpy")


@pytest.mark.parametrize("n", [1, 2, 5, 37, 200])
def test_energy_agreement(n, rng):
    pos = np.ascontiguousarray(rng.normal(scale=1.5, size=(n, 2)))
    alpha, R = float(n) + 1.5, 1.2
    e_c = compiled.total_energy(pos, alpha, R)
    e_n = pairwise_numpy.total_energy(pos, alpha, R)
    assert e_c == pytest.approx(e_n, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5, 37, 200])
def test_gradient_agreement(n, rng):
    pos = np.ascontiguousarray(rng.normal(scale=1.5, size=(n, 2)))
    alpha, R = float(n) + 1.5, 1.2
    e_c, g_c = compiled.energy_and_gradient(pos, alpha, R)
    e_n, g_n = pairwise_numpy.energy_and_gradient(pos, alpha, R)
    assert e_c == pytest.approx(e_n, rel=1e-12, abs=1e-12)
    np.testing.assert_allclose(g_c, g_n, rtol=1e-11, atol=1e-12)


def test_coincident_points_both_implementations():
    pos = np.ascontiguousarray([[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]])
    for mod in (compiled, pairwise_numpy):
        assert mod.total_energy(pos, 4.0, 1.0) == np.inf
        e, g = mod.energy_and_gradient(pos, 4.0, 1.0)
        assert e == np.inf
        assert np.all(g == 0.0)