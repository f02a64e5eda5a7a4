import math

import numpy as np
import pytest
from scipy.special import lambertw

from jellium2d.edge_laws import (
    EpsilonKappa,
    HeavyTailLawL,
    cdf_gumbel,
    cdf_L,
    cdf_spherical_F,
    crossover_to_gumbel_distance,
    ginibre_scalings,
    log_cdf_L,
    quantile_gumbel,
    quantile_L,
    quantile_spherical_F,
    solve_epsilon_kappa,
)
from jellium2d.errors import CnNotPositiveError, POutOfRangeError

QPOCH_HALF = 0.2887880950866025  # prod_{k>=1} (1 - 2^-k), frozen from a
                                 # 200-term direct product


def test_cdf_L_support_and_known_value():
    law = HeavyTailLawL(kappa=1.0, R=1.0)
    assert cdf_L(law, 1.0) == 0.0
    assert cdf_L(law, 0.5) == 0.0
    assert cdf_L(law, math.sqrt(2.0)) == pytest.approx(QPOCH_HALF, abs=2e-12)
    assert 1.0 - cdf_L(law, 1e9) < 1e-12


def test_cdf_L_truncation_stability():
    law = HeavyTailLawL(kappa=0.7, R=1.0)
    for t in (1.05, 1.3, 2.0, 10.0):
        base = log_cdf_L(law, t)
        doubled = log_cdf_L(law, t, extra_terms=2000)
        assert abs(base - doubled) < law.truncation_tol


def test_cdf_L_scale_equivariance():
    # R and t enter only through R/t; dyadic values make it exact
    for kappa in (0.5, 1.0, 3.0):
        for R, t in [(2.0, 4.0), (0.5, 2.0), (4.0, 5.0)]:
            a = cdf_L(HeavyTailLawL(kappa=kappa, R=R), t)
            b = cdf_L(HeavyTailLawL(kappa=kappa, R=1.0), t / R)
            assert a == b


def test_cdf_L_monotone_and_vectorized():
    law = HeavyTailLawL(kappa=2.0, R=1.5)
    grid = np.linspace(1.0, 20.0, 500)
    vals = cdf_L(law, grid)
    assert vals.shape == grid.shape
    assert np.all(np.diff(vals) >= 0.0)


def test_quantile_L_roundtrip(rng):
    law = HeavyTailLawL(kappa=1.0, R=1.0)
    assert quantile_L(law, QPOCH_HALF) == pytest.approx(math.sqrt(2.0), abs=1e-9)
    for p in rng.uniform(1e-4, 1.0 - 1e-4, size=100):
        t = quantile_L(law, float(p))
        assert cdf_L(law, t) == pytest.approx(p, abs=1e-9)
    # t -> R from above as p -> 0 (log F ~ -pi^2/12 / (t - R): slow approach)
    seq = [quantile_L(law, p) for p in (1e-3, 1e-6, 1e-9, 1e-12)]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert 1.0 < seq[-1] < 1.05
    with pytest.raises(POutOfRangeError):
        quantile_L(law, 0.0)
    with pytest.raises(POutOfRangeError):
        quantile_L(law, 1.0)


def test_gumbel_values_and_roundtrip():
    assert cdf_gumbel(0.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert cdf_gumbel(-50.0) == 0.0
    assert cdf_gumbel(50.0) == pytest.approx(1.0, abs=1e-15)
    median = -math.log(math.log(2.0))
    assert median == pytest.approx(0.36651292058166435, rel=1e-12)
    assert cdf_gumbel(median) == pytest.approx(0.5, rel=1e-14)
    ps = np.linspace(1e-6, 1 - 1e-6, 101)
    assert np.max(np.abs(cdf_gumbel(quantile_gumbel(ps)) - ps)) < 1e-9


def test_spherical_F_support_tail_and_factors():
    assert cdf_spherical_F(0.0) == 0.0
    assert cdf_spherical_F(-3.0) == 0.0
    t = 50.0
    assert t ** 2 * (1.0 - cdf_spherical_F(t)) == pytest.approx(1.0, rel=0.02)
    # factors e^{-m} sum_{j<k} m^j/j! lie in (0, 1] and increase with k
    from scipy.special import gammaincc

    m = 1.0 / 1.7 ** 2
    factors = gammaincc(np.arange(1, 40, dtype=float), m)
    assert np.all((factors > 0.0) & (factors <= 1.0))
    assert np.all(np.diff(factors) >= 0.0)  # saturates at exactly 1.0 in doubles
    assert np.all(np.diff(factors[:6]) > 0.0)


def test_spherical_F_quantile_roundtrip(rng):
    for p in rng.uniform(0.05, 0.99, size=20):
        t = quantile_spherical_F(float(p))
        assert cdf_spherical_F(t) == pytest.approx(p, abs=1e-9)


def test_spherical_F_monotone_bounded_on_grid():
    grid = np.linspace(0.0, 40.0, 800)
    vals = cdf_spherical_F(grid)
    assert vals.shape == grid.shape
    assert np.all(np.diff(vals) >= 0.0)
    assert np.all((vals >= 0.0) & (vals <= 1.0))


def test_ginibre_scalings():
    sc = ginibre_scalings(1000)
    assert sc.c_n == pytest.approx(1.2045887447406605, rel=1e-12)
    assert sc.a_n == pytest.approx(69.41437155922858, rel=1e-12)
    with pytest.raises(CnNotPositiveError):
        ginibre_scalings(100)


def test_ginibre_b_matches_jellium_scalings_at_unit_edge():
    from jellium2d.model import GasParams, edge_scalings

    jel = edge_scalings(GasParams(n=1000, beta=2.0, alpha=1000.0, R=1.0))
    gin = ginibre_scalings(1000)
    assert jel.C_n == pytest.approx(1.0, rel=1e-14)
    assert jel.b_n == pytest.approx(gin.b_n, rel=1e-14)


def test_epsilon_kappa():
    sol = solve_epsilon_kappa(1.0)
    assert sol.epsilon == pytest.approx(0.5671432904097838, abs=1e-9)
    kappas = np.logspace(-2, 4, 40)
    eps = [solve_epsilon_kappa(float(k)).epsilon for k in kappas]
    assert all(b < a for a, b in zip(eps, eps[1:]))
    for k, e in zip(kappas, eps):
        assert abs(e * math.exp(k * e) - 1.0) < 1e-12
        assert e == pytest.approx(float(lambertw(k).real) / k, rel=1e-10)
    with pytest.raises(ValueError):
        EpsilonKappa(kappa=1.0, epsilon=0.5)


def test_bridge_distance_monotone_trend():
    distances = [crossover_to_gumbel_distance(k) for k in (1.0, 5.0, 20.0, 100.0)]
    assert all(b < a for a, b in zip(distances, distances[1:]))
    assert distances[0] > 0.0
    assert distances[0] == pytest.approx(0.2615642, abs=2e-4)
