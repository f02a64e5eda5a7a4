"""Closed-form limit laws for the modulus of the farthest particle.

Three laws appear at the edge: the heavy-tailed infinite-product law L
(neutral-limit regime, support [R, oo)), the Gumbel law (charge surplus
lambda > 1), and the spherical ensemble's law F.  The product laws are
evaluated in log space so factors close to 1 or to 0 stay accurate, and
the bridge connecting L to Gumbel as kappa -> oo is exposed as an exact
sup-distance computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import CnNotPositiveError, POutOfRangeError
from .model import c_n_value, min_n_for_edge_scalings

_LOG_FLOOR = -800.0  # below this the CDF is an exact double-precision zero
_CHUNK = 1 << 20


@dataclass(frozen=True)
class HeavyTailLawL:
    """Law with CDF prod_{k>=0} (1 - (R/t)^{2(k+kappa)}) on [R, oo)."""

    kappa: float
    R: float = 1.0
    truncation_tol: float = 1e-12

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not self.R > 0:
            raise ValueError("R must be positive")
        if not 0 < self.truncation_tol < 1:
            raise ValueError("truncation_tol must lie in (0, 1)")


def _log_cdf_L_scalar(kappa, R, t, tol, extra_terms=0):
    if not t > R:
        return -np.inf
    s = (R / t) ** 2
    ls = math.log(s)  # < 0
    # smallest K with s^{K+kappa}/(1-s) < tol: terms k = 0..K-1 included
    K = max(1, int(math.ceil(math.log(tol * (1.0 - s)) / ls - kappa))) + extra_terms
    acc = 0.0
    k0 = 0
    while k0 < K:
        k1 = min(k0 + _CHUNK, K)
        kk = np.arange(k0, k1, dtype=float)
        acc += float(np.log1p(-np.exp((kk + kappa) * ls)).sum())
        if acc < _LOG_FLOOR:
            return -np.inf
        k0 = k1
    return acc


def log_cdf_L(law: HeavyTailLawL, t, extra_terms=0):
    """log CDF of L; -inf where the CDF vanishes (t <= R or underflow)."""
    ts = np.asarray(t, dtype=float)
    out = np.array([_log_cdf_L_scalar(law.kappa, law.R, float(v),
                                      law.truncation_tol, extra_terms)
                    for v in np.atleast_1d(ts)])
    return float(out[0]) if ts.ndim == 0 else out.reshape(ts.shape)


def cdf_L(law: HeavyTailLawL, t):
    """CDF of the heavy-tailed edge law; 0 for t <= R."""
    lf = log_cdf_L(law, t)
    if np.isscalar(lf):
        return 0.0 if lf == -np.inf else math.exp(lf)
    with np.errstate(invalid="ignore"):
        return np.where(np.isneginf(lf), 0.0, np.exp(lf))


def quantile_L(law: HeavyTailLawL, p: float) -> float:
    """Inverse CDF of L by bracketed root-finding (tolerance ~1e-12 in t)."""
    if not 0.0 < p < 1.0:
        raise POutOfRangeError(f"p must be in (0, 1), got {p}")
    lo = law.R * (1.0 + 1e-15)
    hi = law.R * 2.0
    for _ in range(2000):
        if cdf_L(law, hi) >= p:
            break
        lo = hi
        hi *= 2.0
    else:  # pragma: no cover - p < 1 guarantees termination
        raise RuntimeError("failed to bracket the quantile")
    return optimize.brentq(lambda t: cdf_L(law, t) - p, lo, hi,
                           xtol=1e-13 * law.R, rtol=4 * np.finfo(float).eps)


def cdf_gumbel(t):
    """Standard Gumbel CDF exp(-exp(-t))."""
    ts = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):  # exp overflow at t << 0 gives exact 0
        out = np.exp(-np.exp(-ts))
    return float(out) if ts.ndim == 0 else out


def quantile_gumbel(p):
    """Inverse Gumbel CDF -log(-log p)."""
    ps = np.asarray(p, dtype=float)
    if np.any((ps <= 0) | (ps >= 1)):
        raise POutOfRangeError("p must be in (0, 1)")
    out = -np.log(-np.log(ps))
    return float(out) if ps.ndim == 0 else out


def _log_cdf_spherical_scalar(t, tol):
    if t <= 0.0:
        return -np.inf
    m = t ** -2
    acc = 0.0
    k0 = 1
    while True:
        kk = np.arange(k0, k0 + 1024, dtype=float)
        upper = special.gammaincc(kk, m)  # e^{-m} sum_{j<k} m^j/j!
        lower = 1.0 - upper
        if np.any(upper == 0.0):  # a factor underflowed: CDF is zero
            return -np.inf
        acc += float(np.sum(np.log(upper)))
        if acc < _LOG_FLOOR:
            return -np.inf
        # factors increase to 1; once past the Poisson bulk the deficit
        # 1 - factor decays super-geometrically, so first-term cutoff is safe
        if kk[-1] > m and lower[-1] < tol:
            return acc
        k0 += 1024


def cdf_spherical_F(t, truncation_tol=1e-12):
    """Forrester-Krishnapur spherical edge law; 1 - F ~ t^{-2} as t -> oo."""
    ts = np.asarray(t, dtype=float)
    lf = np.array([_log_cdf_spherical_scalar(float(v), truncation_tol)
                   for v in np.atleast_1d(ts)])
    out = np.where(np.isneginf(lf), 0.0, np.exp(lf))
    return float(out[0]) if ts.ndim == 0 else out.reshape(ts.shape)


def quantile_spherical_F(p: float, truncation_tol=1e-12) -> float:
    """Inverse of the spherical edge CDF by bracketed root-finding."""
    if not 0.0 < p < 1.0:
        raise POutOfRangeError(f"p must be in (0, 1), got {p}")
    lo, hi = 1e-3, 2.0
    while cdf_spherical_F(lo, truncation_tol) > p:
        lo *= 0.5
    while cdf_spherical_F(hi, truncation_tol) < p:
        hi *= 2.0
    return optimize.brentq(
        lambda t: cdf_spherical_F(t, truncation_tol) - p, lo, hi,
        xtol=1e-13, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class GinibreScalings:
    """Ginibre-normalized edge scalings (edge at 1, no C_n division)."""

    a_n: float
    b_n: float
    c_n: float


def ginibre_scalings(n: int) -> GinibreScalings:
    """a_n = 2 sqrt(n c_n), b_n = 1 + sqrt(c_n/n)/2 for the Ginibre edge."""
    c = c_n_value(n) if n >= 2 else -math.inf
    if c <= 0.0:
        raise CnNotPositiveError(n, c, min_n_for_edge_scalings())
    return GinibreScalings(a_n=2.0 * math.sqrt(n * c),
                           b_n=1.0 + 0.5 * math.sqrt(c / n),
                           c_n=c)


@dataclass(frozen=True)
class EpsilonKappa:
    """The unique solution of epsilon * exp(kappa * epsilon) = 1."""

    kappa: float
    epsilon: float

    def __post_init__(self):
        resid = abs(self.epsilon * math.exp(self.kappa * self.epsilon) - 1.0)
        if resid > 1e-12:
            raise ValueError(f"epsilon residual {resid:.3g} exceeds 1e-12")


def solve_epsilon_kappa(kappa: float) -> EpsilonKappa:
    """Solve epsilon e^{kappa epsilon} = 1 on (0, 1] (log form for stability)."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    root = optimize.brentq(lambda e: math.log(e) + kappa * e, 1e-300, 1.0,
                           xtol=1e-300, rtol=4 * np.finfo(float).eps)
    return EpsilonKappa(kappa=float(kappa), epsilon=float(root))


def default_bridge_grid():
    """Evaluation grid covering the bulk of both bridge distributions."""
    return np.arange(-10.0, 30.0, 0.005)


def crossover_to_gumbel_distance(kappa: float, grid=None) -> float:
    """sup_t | P(2 kappa (xi_kappa - 1 - eps/2) <= t) - Gumbel(t) |.

    xi_kappa follows L with R = 1; the centered, rescaled variable tends
    to the Gumbel law as kappa -> oo (no rate available, so callers check
    the monotone trend of this distance rather than a rate).
    """
    eps = solve_epsilon_kappa(kappa).epsilon
    law = HeavyTailLawL(kappa=kappa, R=1.0)
    ts = default_bridge_grid() if grid is None else np.asarray(grid, dtype=float)
    xi_points = 1.0 + 0.5 * eps + ts / (2.0 * kappa)
    vals = cdf_L(law, xi_points)
    return float(np.max(np.abs(vals - cdf_gumbel(ts))))
