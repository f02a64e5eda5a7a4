"""Canonical cross-validation experiments at their frozen scales.

Each function runs one of the sampler-vs-oracle comparisons with pinned
parameters, seeds handled by the caller, and the acceptance threshold
baked into the returned report.  The CLI ``validate`` command and the
acceptance test suite both call these, so the experiment definitions
cannot drift apart.
"""

from __future__ import annotations

import math

import numpy as np

from . import exact_radii, mcmc, stats
from .model import GasParams, edge_scalings
from .seeding import stream

EDGE_L_PARAMS = GasParams(n=200, beta=2.0, alpha=201.0, R=1.0)
EDGE_L_TRIALS = 2000
EDGE_L_THRESHOLD = 0.05

EDGE_GUMBEL_PARAMS = GasParams(n=5000, beta=2.0, alpha=20000.0, R=2.0)
EDGE_GUMBEL_TRIALS = 2000
EDGE_GUMBEL_EXACT_THRESHOLD = 0.03
EDGE_GUMBEL_GUMBEL_THRESHOLD = 0.15

BULK_PARAMS = GasParams(n=500, beta=2.0, alpha=2000.0, R=2.0)
BULK_SCHEDULE = dict(steps=30_000, burn_in_fraction=0.9, thinning=3,
                     dt_init=0.5)
BULK_THRESHOLD = 0.05

CROSS_PARAMS = GasParams(n=8, beta=2.0, alpha=32.0, R=2.0)
CROSS_SAMPLES = 10_000
CROSS_THRESHOLD = 0.05


def run_edge_L(seed: int, trials: int = EDGE_L_TRIALS, workers: int = 1,
               compute_w1: bool = True) -> stats.EcdfReport:
    """Exact-sampler maxima against the heavy-tailed limit law L(kappa=1, R=1)."""
    params = EDGE_L_PARAMS
    batch = exact_radii.sample_max_batch(params, trials, seed, workers=workers)
    law = stats.LimitLawSpec(kind="L", kappa=params.kappa_n, R=params.R)
    return stats.ks_against_law(batch.maxima, law, EDGE_L_THRESHOLD,
                                params=params, seed=seed, compute_w1=compute_w1)


def run_edge_gumbel(seed: int, trials: int = EDGE_GUMBEL_TRIALS,
                    workers: int = 1):
    """Exact-sampler maxima against (i) the finite-n CDF, (ii) the Gumbel law.

    The finite-n comparison is tight (pure sampling noise); the Gumbel
    one is loose because the convergence is logarithmically slow.
    """
    params = EDGE_GUMBEL_PARAMS
    batch = exact_radii.sample_max_batch(params, trials, seed, workers=workers)

    exact_law = stats.LimitLawSpec(kind="finite_n_exact", params=params)
    report_exact = stats.ks_against_law(
        batch.maxima, exact_law, EDGE_GUMBEL_EXACT_THRESHOLD,
        params=params, seed=seed, compute_w1=False)

    sc = edge_scalings(params)
    rescaled = sc.a_n * (batch.maxima - sc.b_n)
    report_gumbel = stats.ks_against_law(
        rescaled, stats.LimitLawSpec(kind="gumbel"),
        EDGE_GUMBEL_GUMBEL_THRESHOLD, params=params, seed=seed)
    return report_exact, report_gumbel


def run_bulk(seed: int, steps: int = BULK_SCHEDULE["steps"]) -> stats.EcdfReport:
    """MALA radial bulk against the equilibrium law min(1, lambda r^2/R^2)."""
    params = BULK_PARAMS
    schedule = mcmc.Schedule(**{**BULK_SCHEDULE, "steps": steps})
    result = mcmc.run_chain(params, schedule, seed)
    moduli = np.concatenate([s.moduli for s in result.samples])
    report = stats.radial_bulk_report(moduli, params, BULK_THRESHOLD, seed=seed)
    report.extra.update({"mcmc": {k: v for k, v in result.diagnostics.items()
                                  if k != "energy_trace"}})
    return report


def run_cross_sampler(seed: int, n_samples: int = CROSS_SAMPLES) -> stats.EcdfReport:
    """Two-sample KS between exact-sampler moduli and MCMC moduli (beta = 2)."""
    params = CROSS_PARAMS
    n_trials = math.ceil(n_samples / params.n)
    exact = np.concatenate([
        exact_radii.sample_radii(params, stream(seed, t),
                                 seed=seed, trial_id=t).moduli
        for t in range(n_trials)])[:n_samples]

    keep_configs = math.ceil(n_samples / params.n)
    thinning = 20
    burn = 4000
    steps = burn + keep_configs * thinning
    schedule = mcmc.Schedule(steps=steps, burn_in_fraction=burn / steps,
                             thinning=thinning, dt_init=0.5)
    result = mcmc.run_chain(params, schedule, seed + 1)
    mcmc_moduli = np.concatenate([s.moduli for s in result.samples])[:n_samples]
    report = stats.ks_two_sample(exact, mcmc_moduli, CROSS_THRESHOLD,
                                 params=params, seed=seed)
    report.extra.update({"mcmc": {k: v for k, v in result.diagnostics.items()
                                  if k != "energy_trace"}})
    return report
