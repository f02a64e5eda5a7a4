"""Pure-NumPy fallback for the pair-interaction kernels.

Mirrors ``_pairwise.pyx`` exactly (same contracts, same +inf signalling)
so the two implementations can be swapped at import and benchmarked
against each other.
"""

import numpy as np


def _confinement_terms(pos, R):
    r2 = np.einsum("ij,ij->i", pos, pos)
    inside = r2 <= R * R
    w = np.where(inside, 0.5 * (r2 / (R * R) - 1.0) + np.log(R),
                 0.5 * np.log(np.maximum(r2, np.finfo(float).tiny)))
    return r2, inside, w


def total_energy(pos, alpha, R):
    """Total energy of a configuration; +inf if two points coincide."""
    pos = np.asarray(pos, dtype=np.float64)
    n = pos.shape[0]
    _, _, w = _confinement_terms(pos, R)
    e = alpha * float(w.sum())
    if n > 1:
        diff = pos[:, None, :] - pos[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        iu = np.triu_indices(n, k=1)
        pair_d2 = d2[iu]
        if np.any(pair_d2 == 0.0):
            return np.inf
        e -= 0.5 * float(np.log(pair_d2).sum())
    return e


def energy_and_gradient(pos, alpha, R):
    """Energy and per-particle gradient; (+inf, zeros) on coincidence."""
    pos = np.asarray(pos, dtype=np.float64)
    n = pos.shape[0]
    grad = np.zeros((n, 2), dtype=np.float64)
    r2, inside, w = _confinement_terms(pos, R)
    e = alpha * float(w.sum())
    denom = np.where(inside, R * R, np.maximum(r2, np.finfo(float).tiny))
    grad += alpha * pos / denom[:, None]

    if n > 1:
        diff = pos[:, None, :] - pos[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        off = ~np.eye(n, dtype=bool)
        if np.any(d2[off] == 0.0):
            return np.inf, np.zeros((n, 2), dtype=np.float64)
        iu = np.triu_indices(n, k=1)
        e -= 0.5 * float(np.log(d2[iu]).sum())
        np.fill_diagonal(d2, 1.0)
        grad -= np.einsum("ijk,ij->ik", diff, off / d2)
    return e, grad
