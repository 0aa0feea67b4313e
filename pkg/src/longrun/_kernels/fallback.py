"""Numpy reference implementations of the hot loops.

These are the semantics the compiled extension must reproduce.  Everything
here is vectorized over whole chunks, so the fallback is slow only by a
modest constant factor.
"""

import numpy as np


def log_canonical_vector(n, beta):
    """log of the canonical partition sums of the n-site hard-core gas.

    Sites live at 1..n-1 (site 0 carries no interaction energy and is
    excluded).  A pair occupying sites i < j contributes a Boltzmann
    factor exp(beta * (2/n^2) * i), i.e. the pair energy is
    -(2/n^2)*min(i, j).  Returns an array L with L[N] = log Z_N for
    N = 0..n-1 particles; the grand sum is logsumexp(L + N*log(rho)).

    The recursion scans sites from n-1 down to 1 keeping the count k of
    particles already placed above the current site: occupying site i
    then multiplies the weight by exp(beta*(2/n^2)*i*k).
    """
    L = np.full(n, -np.inf)
    L[0] = 0.0
    c = 2.0 * beta / (n * n)
    for i in range(n - 1, 0, -1):
        kmax = n - i  # counts reachable once this site is processed
        L[1 : kmax + 1] = np.logaddexp(
            L[1 : kmax + 1], L[0:kmax] + (c * i) * np.arange(kmax)
        )
    return L


def gbm_trapezoid_chunk(w, g, acc, increments, sigma, t0, dt):
    """Advance the running trapezoid integral of exp(sigma*W - sigma^2 t/2).

    w, g, acc hold per-path state: current Brownian value, current
    integrand value, and the integral accumulated so far.  `increments`
    is a (paths, steps) block of Brownian increments starting at time t0.
    All three state arrays are updated in place.
    """
    nsteps = increments.shape[1]
    W = w[:, None] + np.cumsum(increments, axis=1)
    t = t0 + dt * np.arange(1, nsteps + 1)
    G = np.exp(sigma * W - (0.5 * sigma * sigma) * t)
    acc += dt * (0.5 * g + G[:, :-1].sum(axis=1) + 0.5 * G[:, -1])
    w[:] = W[:, -1]
    g[:] = G[:, -1]


def euler_linear_sde_chunk(x, dw, sigma, dt):
    """Euler step x -> x + sigma*x*dW + dt over a (paths, steps) block.

    Updates x in place.
    """
    nsteps = dw.shape[1]
    for j in range(nsteps):
        x[:] = x * (1.0 + sigma * dw[:, j]) + dt
