# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled flow stepping kernel.

Tight C loop for the explicit projected-Euler scheme: per step it forms
first/second differences with odd-reflection ghosts, tracks the Simpson
energy (flagging ten consecutive increases as instability), applies the
bending gradient, and projects pointwise onto the obstacle.  Semantics
match the pure-numpy fallback in _kernels_py.
"""

from libc.math cimport sqrt
from libc.stdlib cimport free, malloc

import numpy as np

BACKEND = "cython"


def flow_steps(double[::1] u, double[::1] psi, double h, double dt,
               long nsteps, double slack):
    """Advance u in place by nsteps steps; see _kernels_py.flow_steps."""
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    cdef long k, done = 0
    cdef int rises = 0, unstable = 0
    cdef double inv_h = 1.0 / h
    cdef double inv_h2 = inv_h * inv_h
    cdef double inv_2h = 0.5 * inv_h
    cdef double e_prev = 1e300, energy = 0.0, max_rise = 0.0
    cdef double dui, d2i, q, qs, acc, rise, coeff
    cdef double *w = <double *> malloc(3 * n * sizeof(double))
    cdef double *b
    cdef double *gw
    if w == NULL:
        raise MemoryError()
    b = w + n
    gw = b + n
    try:
        for k in range(nsteps):
            acc = 0.0
            for i in range(1, n - 1):
                dui = (u[i + 1] - u[i - 1]) * inv_2h
                d2i = (u[i + 1] + u[i - 1] - 2.0 * u[i]) * inv_h2
                q = 1.0 + dui * dui
                qs = q * q * sqrt(q)          # q^(5/2)
                w[i] = 2.0 * d2i / qs
                b[i] = 5.0 * d2i * d2i * dui / (q * qs)
                coeff = d2i * d2i / qs
                if i % 2 == 1:
                    acc += 4.0 * coeff
                else:
                    acc += 2.0 * coeff
            # odd reflection: u'' = 0 at both ends, so w = b = 0 there
            w[0] = 0.0
            w[n - 1] = 0.0
            b[0] = 0.0
            b[n - 1] = 0.0
            energy = acc * h / 3.0
            rise = energy - e_prev
            if rise > slack:
                rises += 1
                if rise > max_rise:
                    max_rise = rise
                if rises >= 10:
                    unstable = 1
                    break
            else:
                rises = 0
            e_prev = energy

            for i in range(1, n - 1):
                gw[i] = (w[i + 1] + w[i - 1] - 2.0 * w[i]) * inv_h2 \
                    + (b[i + 1] - b[i - 1]) * inv_2h
            for i in range(1, n - 1):
                dui = u[i] - dt * gw[i]
                u[i] = dui if dui > psi[i] else psi[i]
            u[0] = 0.0
            u[n - 1] = 0.0
            done += 1
    finally:
        free(w)
    return done, energy, max_rise, bool(unstable)
