# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled O(n^2) pair-interaction kernels for the planar jellium energy.

E(x_1..x_n) = sum_{i<j} -log|x_i - x_j| + alpha * sum_i W(x_i)

with the disc confinement W(x) = (|x|^2/R^2 - 1)/2 + log R for |x| <= R
and W(x) = log|x| outside.  Coincident particles yield +inf energy.
"""

from libc.math cimport INFINITY, log

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline double _confinement(double r2, double R, double R2) nogil:
    if r2 <= R2:
        return 0.5 * (r2 / R2 - 1.0) + log(R)
    return 0.5 * log(r2)


def total_energy(double[:, ::1] pos, double alpha, double R):
    """Total energy of a configuration; +inf if two points coincide."""
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t i, j
    cdef double e_pair = 0.0, e_conf = 0.0
    cdef double dx, dy, d2, r2
    cdef double R2 = R * R
    with nogil:
        for i in range(n):
            r2 = pos[i, 0] * pos[i, 0] + pos[i, 1] * pos[i, 1]
            e_conf += _confinement(r2, R, R2)
            for j in range(i + 1, n):
                dx = pos[i, 0] - pos[j, 0]
                dy = pos[i, 1] - pos[j, 1]
                d2 = dx * dx + dy * dy
                if d2 == 0.0:
                    e_pair = INFINITY
                    break
                e_pair -= 0.5 * log(d2)
            if e_pair == INFINITY:
                break
    if e_pair == INFINITY:
        return INFINITY
    return e_pair + alpha * e_conf


def energy_and_gradient(double[:, ::1] pos, double alpha, double R):
    """Energy together with its gradient per particle, shape (n, 2).

    Returns (+inf, zeros) when two points coincide; the gradient is
    meaningless in that case and callers must treat it as a rejection.
    """
    cdef Py_ssize_t n = pos.shape[0]
    cdef cnp.ndarray[double, ndim=2] grad_arr = np.zeros((n, 2), dtype=np.float64)
    cdef double[:, ::1] grad = grad_arr
    cdef Py_ssize_t i, j
    cdef double e_pair = 0.0, e_conf = 0.0
    cdef double dx, dy, d2, inv, r2, gx, gy
    cdef double R2 = R * R
    with nogil:
        for i in range(n):
            r2 = pos[i, 0] * pos[i, 0] + pos[i, 1] * pos[i, 1]
            e_conf += _confinement(r2, R, R2)
            if r2 <= R2:
                grad[i, 0] += alpha * pos[i, 0] / R2
                grad[i, 1] += alpha * pos[i, 1] / R2
            elif r2 > 0.0:
                grad[i, 0] += alpha * pos[i, 0] / r2
                grad[i, 1] += alpha * pos[i, 1] / r2
            for j in range(i + 1, n):
                dx = pos[i, 0] - pos[j, 0]
                dy = pos[i, 1] - pos[j, 1]
                d2 = dx * dx + dy * dy
                if d2 == 0.0:
                    e_pair = INFINITY
                    break
                e_pair -= 0.5 * log(d2)
                inv = 1.0 / d2
                gx = dx * inv
                gy = dy * inv
                grad[i, 0] -= gx
                grad[i, 1] -= gy
                grad[j, 0] += gx
                grad[j, 1] += gy
            if e_pair == INFINITY:
                break
    if e_pair == INFINITY:
        grad_arr[:] = 0.0
        return INFINITY, grad_arr
    return e_pair + alpha * e_conf, grad_arr
