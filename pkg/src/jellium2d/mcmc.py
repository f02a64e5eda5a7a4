"""Metropolis-adjusted Langevin sampling of the full planar Gibbs measure.

Targets exp(-beta * E_n) for any integrable (n, beta, alpha, R).  The
proposal is the Euler discretization of the Langevin diffusion,

    x' = x - dt * beta * grad E_n(x) + sqrt(2 dt) * xi,

corrected by the exact Metropolis-Hastings ratio, so the invariant
measure is the target itself regardless of dt.  Step size adapts only
during burn-in (adaptation during sampling would break invariance) and a
``leapfrog_steps >= 2`` schedule switches the same harness to Hamiltonian
updates (MALA is the one-step special case).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NotIntegrableError
from .exact_radii import RadialSample
from .model import GasParams
from .seeding import stream


@dataclass
class Schedule:
    """Chain schedule; defaults mirror the reference simulation protocol
    (dt = 0.5, long run, only the final fraction retained)."""

    steps: int
    burn_in_fraction: float = 0.9
    thinning: int = 1
    dt_init: float = 0.5
    target_acceptance: float = 0.574
    leapfrog_steps: int = 1
    adapt_interval: int = 50
    adapt_gain: float = 1.0
    init_mode: str = "equilibrium_radial"
    validate_energy_every: int = 1000

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if self.leapfrog_steps < 1:
            raise ValueError("leapfrog_steps must be >= 1")
        if self.init_mode not in ("uniform_disc", "equilibrium_radial"):
            raise ValueError(f"unknown init mode {self.init_mode!r}")

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "burn_in_fraction": self.burn_in_fraction,
            "thinning": self.thinning,
            "dt_init": self.dt_init,
            "target_acceptance": self.target_acceptance,
            "leapfrog_steps": self.leapfrog_steps,
            "adapt_interval": self.adapt_interval,
            "adapt_gain": self.adapt_gain,
            "init_mode": self.init_mode,
        }


@dataclass
class ChainState:
    """Mutable state of one chain; never share an instance across threads."""

    positions: np.ndarray
    energy: float
    grad: np.ndarray
    step_size: float
    rng: np.random.Generator
    accepted: int = 0
    proposed: int = 0
    overflow_rejections: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0


def initialize_config(params: GasParams, mode: str, rng) -> np.ndarray:
    """Scatter n points uniformly on D_R or on D_{R/sqrt(lambda)}."""
    if isinstance(rng, (int, np.integer)):
        rng = stream(rng, 0)
    if mode == "uniform_disc":
        radius = params.R
    elif mode == "equilibrium_radial":
        radius = params.R / math.sqrt(max(params.lam, 1.0))
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    r = radius * np.sqrt(rng.random(params.n))
    theta = 2.0 * math.pi * rng.random(params.n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def new_chain_state(params: GasParams, positions, dt: float, rng) -> ChainState:
    """ChainState with a freshly computed energy/gradient cache."""
    pos = np.ascontiguousarray(positions, dtype=np.float64)
    energy, grad = _kernels.energy_and_gradient(pos, params.alpha, params.R)
    if not math.isfinite(energy):
        raise ValueError("initial configuration has infinite energy")
    return ChainState(positions=pos, energy=energy, grad=grad,
                      step_size=float(dt), rng=rng)


def proposal_log_density(x, y, grad_x, dt: float, beta: float) -> float:
    """log q(x -> y) for the Langevin proposal (up to a shared constant)."""
    drift = x - dt * beta * grad_x
    return -float(np.sum((y - drift) ** 2)) / (4.0 * dt)


def log_acceptance_ratio(params: GasParams, x, y, dt: float) -> float:
    """log of the MH ratio for the Langevin proposal x -> y."""
    beta = params.beta
    ex, gx = _kernels.energy_and_gradient(
        np.ascontiguousarray(x, dtype=np.float64), params.alpha, params.R)
    ey, gy = _kernels.energy_and_gradient(
        np.ascontiguousarray(y, dtype=np.float64), params.alpha, params.R)
    if not math.isfinite(ey):
        return -math.inf
    return (-beta * (ey - ex)
            + proposal_log_density(y, x, gy, dt, beta)
            - proposal_log_density(x, y, gx, dt, beta))


def mala_step(state: ChainState, params: GasParams) -> ChainState:
    """One Metropolis-adjusted Langevin step; mutates and returns state."""
    if not params.is_integrable():
        raise NotIntegrableError(params.integrability_margin())
    beta = params.beta
    dt = state.step_size
    x, gx, ex = state.positions, state.grad, state.energy

    xi = state.rng.standard_normal(x.shape)
    y = x - dt * beta * gx + math.sqrt(2.0 * dt) * xi
    ey, gy = _kernels.energy_and_gradient(
        np.ascontiguousarray(y), params.alpha, params.R)

    state.proposed += 1
    if math.isnan(ey):
        state.overflow_rejections += 1
        return state
    if math.isinf(ey):
        return state  # target density zero (coincident points): reject
    if not np.all(np.isfinite(gy)):
        state.overflow_rejections += 1
        return state

    log_ratio = (-beta * (ey - ex)
                 + proposal_log_density(y, x, gy, dt, beta)
                 - proposal_log_density(x, y, gx, dt, beta))
    if not math.isfinite(log_ratio):
        state.overflow_rejections += 1
        return state
    if log_ratio >= 0.0 or math.log(state.rng.random()) < log_ratio:
        state.positions, state.energy, state.grad = y, ey, gy
        state.accepted += 1
    return state


def hmc_step(state: ChainState, params: GasParams, leapfrog_steps: int) -> ChainState:
    """Hamiltonian update with L leapfrog steps (L = 1 is exactly MALA)."""
    if not params.is_integrable():
        raise NotIntegrableError(params.integrability_margin())
    beta = params.beta
    eps = math.sqrt(2.0 * state.step_size)
    x, gx, ex = state.positions, state.grad, state.energy

    p0 = state.rng.standard_normal(x.shape)
    p = p0 - 0.5 * eps * beta * gx
    y, gy, ey = x, gx, ex
    ok = True
    for step in range(leapfrog_steps):
        y = y + eps * p
        ey, gy = _kernels.energy_and_gradient(
            np.ascontiguousarray(y), params.alpha, params.R)
        if not (math.isfinite(ey) and np.all(np.isfinite(gy))):
            ok = False
            break
        if step < leapfrog_steps - 1:
            p = p - eps * beta * gy
    state.proposed += 1
    if not ok:
        if math.isnan(ey):
            state.overflow_rejections += 1
        return state
    p = p - 0.5 * eps * beta * gy
    d_h = (beta * (ey - ex)
           + 0.5 * float(np.sum(p * p)) - 0.5 * float(np.sum(p0 * p0)))
    if d_h <= 0.0 or math.log(state.rng.random()) < -d_h:
        state.positions, state.energy, state.grad = y, ey, gy
        state.accepted += 1
    return state


@dataclass
class ChainResult:
    """Thinned post-burn-in output of one chain plus diagnostics."""

    samples: list
    configs: np.ndarray
    diagnostics: dict
    state: ChainState = field(repr=False, default=None)


def run_chain(params: GasParams, schedule: Schedule, seed: int,
              chain_id: int = 0) -> ChainResult:
    """Run one chain: adapt dt during burn-in, then sample frozen.

    Deterministic for fixed (params, schedule, seed, chain_id); the
    cached energy is re-validated against a from-scratch evaluation every
    ``validate_energy_every`` steps.
    """
    if not params.is_integrable():
        raise NotIntegrableError(params.integrability_margin())
    rng = stream(seed, chain_id)
    positions = initialize_config(params, schedule.init_mode, rng)
    state = new_chain_state(params, positions, schedule.dt_init, rng)

    burn_steps = int(schedule.steps * schedule.burn_in_fraction)
    step_fn = (mala_step if schedule.leapfrog_steps == 1
               else lambda s, p: hmc_step(s, p, schedule.leapfrog_steps))

    samples = []
    configs = []
    energy_trace = []
    trace_stride = max(1, schedule.steps // 512)
    block_accepted = 0
    block_start = 0

    for step in range(schedule.steps):
        before = state.accepted
        step_fn(state, params)
        block_accepted += state.accepted - before

        if step < burn_steps:
            block_len = step + 1 - block_start
            if block_len >= schedule.adapt_interval:
                rate = block_accepted / block_len
                state.step_size *= math.exp(
                    schedule.adapt_gain * (rate - schedule.target_acceptance))
                state.step_size = min(max(state.step_size, 1e-12), 1e6)
                block_accepted = 0
                block_start = step + 1
        else:
            if (step - burn_steps) % schedule.thinning == 0:
                moduli = np.hypot(state.positions[:, 0], state.positions[:, 1])
                samples.append(RadialSample(moduli=moduli, params=params,
                                            seed=seed, trial_id=len(samples)))
                configs.append(state.positions.copy())

        if step % trace_stride == 0:
            energy_trace.append(state.energy)
        if (step + 1) % schedule.validate_energy_every == 0:
            fresh = _kernels.total_energy(
                np.ascontiguousarray(state.positions), params.alpha, params.R)
            if abs(fresh - state.energy) > 1e-9 * max(1.0, abs(fresh)):
                raise RuntimeError(
                    f"energy cache drifted: {state.energy!r} vs {fresh!r}")

    diagnostics = {
        "acceptance_rate": state.acceptance_rate,
        "accepted": state.accepted,
        "proposed": state.proposed,
        "overflow_rejections": state.overflow_rejections,
        "dt_final": state.step_size,
        "burn_in_steps": burn_steps,
        "kept_configs": len(configs),
        "energy_trace": energy_trace,
        "kernel": _kernels.IMPLEMENTATION,
        "chain_id": chain_id,
        "seed": int(seed),
    }
    cfg = np.array(configs) if configs else np.empty((0, params.n, 2))
    return ChainResult(samples=samples, configs=cfg,
                       diagnostics=diagnostics, state=state)


def figure2_schedule(steps: int = 1_000_000, thinning=None) -> Schedule:
    """Reproduction preset: dt starts at 0.5, final 10% retained."""
    if thinning is None:
        thinning = max(1, int(steps * 0.1) // 1000)
    return Schedule(steps=steps, burn_in_fraction=0.9, thinning=thinning,
                    dt_init=0.5)
