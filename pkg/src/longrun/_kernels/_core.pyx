# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see fallback.py for the reference semantics."""

from libc.math cimport exp, log1p, INFINITY

import numpy as np


cdef inline double _logaddexp(double a, double b) nogil:
    cdef double hi, lo
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    if a >= b:
        hi = a
        lo = b
    else:
        hi = b
        lo = a
    return hi + log1p(exp(lo - hi))


def log_canonical_vector(int n, double beta):
    out = np.full(n, -np.inf)
    cdef double[::1] L = out
    cdef double c = 2.0 * beta / (<double> n * <double> n)
    cdef Py_ssize_t i, k, kmax
    L[0] = 0.0
    with nogil:
        for i in range(n - 1, 0, -1):
            kmax = n - i
            # descending k so L[k-1] is still the pre-site value
            for k in range(kmax, 0, -1):
                L[k] = _logaddexp(L[k], L[k - 1] + c * i * (k - 1))
    return out


def gbm_trapezoid_chunk(double[::1] w, double[::1] g, double[::1] acc,
                        double[:, ::1] increments, double sigma,
                        double t0, double dt):
    cdef Py_ssize_t npaths = increments.shape[0]
    cdef Py_ssize_t nsteps = increments.shape[1]
    cdef Py_ssize_t p, j
    cdef double half = 0.5 * dt
    cdef double drift = 0.5 * sigma * sigma
    cdef double wp, gp, ap, gn
    with nogil:
        for p in range(npaths):
            wp = w[p]
            gp = g[p]
            ap = acc[p]
            for j in range(nsteps):
                wp += increments[p, j]
                gn = exp(sigma * wp - drift * (t0 + (j + 1) * dt))
                ap += half * (gp + gn)
                gp = gn
            w[p] = wp
            g[p] = gp
            acc[p] = ap


def euler_linear_sde_chunk(double[::1] x, double[:, ::1] dw,
                           double sigma, double dt):
    cdef Py_ssize_t npaths = dw.shape[0]
    cdef Py_ssize_t nsteps = dw.shape[1]
    cdef Py_ssize_t p, j
    cdef double xp
    with nogil:
        for p in range(npaths):
            xp = x[p]
            for j in range(nsteps):
                xp = xp * (1.0 + sigma * dw[p, j]) + dt
            x[p] = xp
