"""Ensemble parameters, background potential, energies, and edge scalings.

Single source of truth for the formulas every other module consumes.
The background is the uniform probability measure on the disc of radius
R carrying total charge alpha; its logarithmic potential U is quadratic
inside the disc and logarithmic outside, and the external potential felt
by each of the n unit charges is V = -(alpha/n) * U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import _kernels
from .errors import (
    CnNotPositiveError,
    CoincidentPointsError,
    NOverLimitError,
    NotIntegrableError,
)


@dataclass(frozen=True)
class GasParams:
    """The tuple (n, beta, alpha, R) defining one jellium ensemble."""

    n: int
    beta: float
    alpha: float
    R: float

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R!r}")

    @property
    def lam(self) -> float:
        """Charge ratio lambda = alpha / n."""
        return self.alpha / self.n

    @property
    def kappa_n(self) -> float:
        """Excess background charge kappa_n = alpha - n."""
        return self.alpha - self.n

    def integrability_margin(self) -> float:
        """beta*(alpha - n + 1) - 2; the gas is well defined iff > 0."""
        return self.beta * (self.alpha - self.n + 1.0) - 2.0

    def is_integrable(self) -> bool:
        """True iff the partition function is finite (strict inequality)."""
        return self.integrability_margin() > 0.0

    def to_dict(self) -> dict:
        return {"n": int(self.n), "beta": float(self.beta),
                "alpha": float(self.alpha), "R": float(self.R)}

    @classmethod
    def from_dict(cls, d) -> "GasParams":
        return cls(n=int(d["n"]), beta=float(d["beta"]),
                   alpha=float(d["alpha"]), R=float(d["R"]))


@dataclass(frozen=True)
class IntegrabilityReport:
    integrable: bool
    margin: float


@dataclass(frozen=True)
class EdgeScalings:
    """Gumbel-edge normalization for the jellium maximum modulus."""

    a_n: float
    b_n: float
    c_n: float
    C_n: float

    def __post_init__(self):
        if not self.c_n > 0:
            raise ValueError("EdgeScalings requires c_n > 0")
        if not (self.a_n > 0 and self.b_n > 0 and self.C_n > 0):
            raise ValueError("EdgeScalings requires positive a_n, b_n, C_n")


@dataclass(frozen=True)
class PartitionEstimate:
    value: float
    error: float


def _radii(x):
    """|x| for a single planar point or an (..., 2) array of points."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("planar points must have a trailing dimension of 2")
    return np.hypot(arr[..., 0], arr[..., 1])


def background_potential_U_radial(params: GasParams, r):
    """U at radius r: (1 - r^2/R^2)/2 - log R inside, -log r outside."""
    r = np.asarray(r, dtype=float)
    R = params.R
    inside = 0.5 * (1.0 - (r / R) ** 2) - math.log(R)
    with np.errstate(divide="ignore"):
        outside = -np.log(r)
    return np.where(r <= R, inside, outside)


def background_potential_U(params: GasParams, x):
    """Logarithmic potential of the uniform background disc at point x."""
    out = background_potential_U_radial(params, _radii(x))
    return float(out) if np.isscalar(out) or out.ndim == 0 else out


def external_potential_V_radial(params: GasParams, r):
    """V at radius r; equals -(alpha/n) * U up to the shared normalization."""
    r = np.asarray(r, dtype=float)
    R = params.R
    lam = params.lam
    inside = 0.5 * lam * ((r / R) ** 2 - 1.0 + 2.0 * math.log(R))
    with np.errstate(divide="ignore"):
        outside = lam * np.log(np.where(r > 0, r, 1.0))
        outside = np.where(r > 0, outside, -np.inf)
    return np.where(r <= R, inside, outside)


def external_potential_V(params: GasParams, x):
    """Confining potential V(x) = -(alpha/n) U(x) felt by each particle."""
    out = external_potential_V_radial(params, _radii(x))
    return float(out) if np.isscalar(out) or out.ndim == 0 else out


def _as_config(params: GasParams, config):
    pos = np.ascontiguousarray(config, dtype=np.float64)
    if pos.ndim != 2 or pos.shape[1] != 2:
        raise ValueError("config must be an (n, 2) array of planar points")
    if pos.shape[0] != params.n:
        raise ValueError(f"config has {pos.shape[0]} points, expected n={params.n}")
    return pos


def total_energy(params: GasParams, config) -> float:
    """E_n = sum_{i<j} -log|x_i-x_j| + n sum_i V(x_i).

    Coincident particles are signalled with +inf rather than an
    exception so that MCMC proposals remain rejectable.
    """
    pos = _as_config(params, config)
    return _kernels.total_energy(pos, params.alpha, params.R)


def energy_gradient(params: GasParams, config):
    """Gradient of E_n per particle, shape (n, 2)."""
    pos = _as_config(params, config)
    energy, grad = _kernels.energy_and_gradient(pos, params.alpha, params.R)
    if not math.isfinite(energy):
        raise CoincidentPointsError("two particles coincide; gradient undefined")
    return grad


def check_integrability(params: GasParams) -> IntegrabilityReport:
    """Strict Boltzmann-Gibbs integrability gate beta*(alpha-n+1) > 2."""
    margin = params.integrability_margin()
    return IntegrabilityReport(integrable=margin > 0.0, margin=margin)


def _boltzmann_radial_weight(params: GasParams, r):
    """exp(-beta * n * V(r)) for a single particle at radius r."""
    return np.exp(-params.beta * params.n * external_potential_V_radial(params, r))


def partition_function_smalln(params: GasParams, epsabs=1e-12, epsrel=1e-10,
                              limit=300) -> PartitionEstimate:
    """Z_n by adaptive radial/angular quadrature, n in {1, 2} only.

    The reported error is the outer quadrature's estimate and ignores
    the (tighter) inner tolerances, so treat it as an order of magnitude.
    """
    report = check_integrability(params)
    if not report.integrable:
        raise NotIntegrableError(report.margin)
    if params.n > 2:
        raise NOverLimitError(f"partition quadrature supports n <= 2, got n={params.n}")
    R = params.R

    if params.n == 1:
        def f(r):
            return float(_boltzmann_radial_weight(params, r)) * r

        v1, e1 = integrate.quad(f, 0.0, 5 * R, points=[R],
                                epsabs=epsabs, epsrel=epsrel, limit=limit)
        v2, e2 = integrate.quad(f, 5 * R, np.inf,
                                epsabs=epsabs, epsrel=epsrel, limit=limit)
        return PartitionEstimate(2 * math.pi * (v1 + v2),
                                 2 * math.pi * (e1 + e2))

    beta = params.beta

    def pair_theta(r1, r2):
        def g(th):
            d2 = r1 * r1 + r2 * r2 - 2 * r1 * r2 * math.cos(th)
            if d2 <= 0.0:
                return 0.0
            return d2 ** (0.5 * beta)

        val, _ = integrate.quad(g, 0.0, math.pi,
                                epsabs=epsabs * 0.1, epsrel=epsrel * 0.1,
                                limit=limit)
        return 2.0 * val

    def inner(r1):
        w1 = float(_boltzmann_radial_weight(params, r1)) * r1

        def h(r2):
            return w1 * float(_boltzmann_radial_weight(params, r2)) * r2 \
                * pair_theta(r1, r2)

        v1, _ = integrate.quad(h, 0.0, 5 * R, points=[R],
                               epsabs=epsabs, epsrel=epsrel, limit=limit)
        v2, _ = integrate.quad(h, 5 * R, np.inf,
                               epsabs=epsabs, epsrel=epsrel, limit=limit)
        return v1 + v2

    v1, e1 = integrate.quad(inner, 0.0, 5 * R, points=[R],
                            epsabs=epsabs, epsrel=epsrel, limit=limit)
    v2, e2 = integrate.quad(inner, 5 * R, np.inf,
                            epsabs=epsabs, epsrel=epsrel, limit=limit)
    return PartitionEstimate(2 * math.pi * (v1 + v2), 2 * math.pi * (e1 + e2))


def c_n_value(n) -> float:
    """c_n = log n - 2 log log n - log(2 pi); n >= 2."""
    if n < 2:
        raise ValueError("c_n is defined for n >= 2")
    ln = math.log(n)
    return ln - 2.0 * math.log(ln) - math.log(2.0 * math.pi)


@lru_cache(maxsize=1)
def min_n_for_edge_scalings() -> int:
    """Smallest n with c_n > 0, found once by scanning."""
    n = 2
    while c_n_value(n) <= 0.0:
        n += 1
    return n


def edge_scalings(params: GasParams) -> EdgeScalings:
    """Centering/scale (a_n, b_n) for the Gumbel edge fluctuation."""
    n = params.n
    c = c_n_value(n) if n >= 2 else -math.inf
    if c <= 0.0:
        raise CnNotPositiveError(n, c, min_n_for_edge_scalings())
    C = math.sqrt(n / params.alpha) * params.R
    a = math.sqrt(n * c) / C
    b = C * (1.0 + 0.5 * math.sqrt(c / n))
    return EdgeScalings(a_n=a, b_n=b, c_n=c, C_n=C)
