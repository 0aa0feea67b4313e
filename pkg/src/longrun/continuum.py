"""Continuous-time limit: the running time integral of geometric
Brownian motion and its stationary laws.

The process x(t) = x0 exp(r A(t)) is driven entirely by A(t) =
int_0^t e^{sigma W(s) - sigma^2 s/2} ds, the integrated exponential
martingale.  A(t) has E[A] = t exactly for every t, converges in law
as t -> infinity to an inverse-Gamma variable with tail weight
2/sigma^2, and the growth factor y = x/x0 inherits a stationary law
supported on (1, infinity).
The auxiliary diffusion dX = sigma X dW + dt started at X = 0 has the
same law as A(t) at every horizon, which gives an independent route to
the same distribution for cross-checks.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import euler_linear_sde_chunk, gbm_trapezoid_chunk
from .errors import ParameterError, SizeLimitError

_PATH_BLOCK = 4096
_STEP_CHUNK = 1024


@dataclass(frozen=True)
class ContinuumParams:
    """Parameters of the continuous-time process dx = r x dM."""

    r: float
    sigma: float
    t: float
    dt: float
    x0: float = 1.0

    def __post_init__(self):
        if not self.r > 0.0:
            raise ParameterError(f"r must be > 0, got {self.r}")
        if not self.sigma > 0.0:
            raise ParameterError(f"sigma must be > 0, got {self.sigma}")
        if not self.t > 0.0:
            raise ParameterError(f"t must be > 0, got {self.t}")
        if not 0.0 < self.dt <= self.t:
            raise ParameterError(f"dt must lie in (0, t], got {self.dt}")

    @property
    def num_steps(self):
        """Number of integrator steps; the last one may be shorter."""
        n = int(math.ceil(self.t / self.dt - 1e-12))
        return max(n, 1)


def _step_sizes(params):
    n = params.num_steps
    last = params.t - (n - 1) * params.dt
    return n, last


def simulate_integral_gbm(params, num_paths, seed):
    """Samples of A(t) by composite-trapezoid integration of
    e^{sigma W - sigma^2 s/2} along exact Brownian increments.

    The trapezoid rule makes the estimator unbiased: each node has
    expectation 1, so E[A_trap] = t regardless of dt.  Paths are
    generated in fixed blocks with one spawned child seed per block, so
    results depend only on (params, num_paths, seed).
    """
    if num_paths < 1:
        raise ParameterError(f"num_paths must be >= 1, got {num_paths}")
    n_steps, dt_last = _step_sizes(params)
    sigma = params.sigma
    out = np.empty(num_paths)
    blocks = (num_paths + _PATH_BLOCK - 1) // _PATH_BLOCK
    seeds = np.random.SeedSequence(seed).spawn(blocks)
    for b in range(blocks):
        lo = b * _PATH_BLOCK
        hi = min(lo + _PATH_BLOCK, num_paths)
        m = hi - lo
        rng = np.random.default_rng(seeds[b])
        w = np.zeros(m)
        g = np.ones(m)
        acc = np.zeros(m)
        full = n_steps - 1
        done = 0
        t0 = 0.0
        while done < full:
            k = min(_STEP_CHUNK, full - done)
            dw = rng.standard_normal((m, k)) * math.sqrt(params.dt)
            gbm_trapezoid_chunk(w, g, acc, dw, sigma, t0, params.dt)
            done += k
            t0 += k * params.dt
        dw = rng.standard_normal((m, 1)) * math.sqrt(dt_last)
        gbm_trapezoid_chunk(w, g, acc, dw, sigma, t0, dt_last)
        out[lo:hi] = acc
    return out


def simulate_growth(params, num_paths, seed):
    """Samples of the growth factor y = x(t)/x0 = e^{r A(t)} > 1.

    The stationary law of A is heavy tailed (no mean once sigma^2 > 2),
    so individual samples may overflow to inf; that is the correct
    float representation of those draws and is left in place.
    """
    A = simulate_integral_gbm(params, num_paths, seed)
    with np.errstate(over="ignore"):
        return np.exp(params.r * A)


def simulate_linear_sde(params, num_paths, seed):
    """Euler samples of X(t) from dX = sigma X dW + dt, X(0) = 0.

    X(t) has the same law as A(t), which makes this an independent
    discretization of the same distribution (weak order 1, so KS-level
    agreement needs dt small but no bias correction).
    """
    if num_paths < 1:
        raise ParameterError(f"num_paths must be >= 1, got {num_paths}")
    n_steps, dt_last = _step_sizes(params)
    sigma = params.sigma
    out = np.empty(num_paths)
    blocks = (num_paths + _PATH_BLOCK - 1) // _PATH_BLOCK
    seeds = np.random.SeedSequence(seed).spawn(blocks)
    for b in range(blocks):
        lo = b * _PATH_BLOCK
        hi = min(lo + _PATH_BLOCK, num_paths)
        m = hi - lo
        rng = np.random.default_rng(seeds[b])
        x = np.zeros(m)
        full = n_steps - 1
        done = 0
        while done < full:
            k = min(_STEP_CHUNK, full - done)
            dw = rng.standard_normal((m, k)) * math.sqrt(params.dt)
            euler_linear_sde_chunk(x, dw, sigma, params.dt)
            done += k
        dw = rng.standard_normal((m, 1)) * math.sqrt(dt_last)
        euler_linear_sde_chunk(x, dw, sigma, dt_last)
        out[lo:hi] = x
    return out


def _check_sigma(sigma):
    if not sigma > 0.0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")


def stationary_density_A(z, sigma):
    """Inverse-Gamma density 2/(sigma^2 z^2) e^{-2/(sigma^2 z)}; 0 for z <= 0."""
    _check_sigma(sigma)
    z = np.asarray(z, dtype=float)
    c = 2.0 / (sigma * sigma)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = np.where(z > 0.0, c / (z * z) * np.exp(-c / z), 0.0)
    if val.ndim == 0:
        return float(val)
    return val


def stationary_cdf_A(z, sigma):
    """P(A <= z) = e^{-2/(sigma^2 z)} in the t -> infinity limit."""
    _check_sigma(sigma)
    z = np.asarray(z, dtype=float)
    c = 2.0 / (sigma * sigma)
    with np.errstate(divide="ignore"):
        val = np.where(z > 0.0, np.exp(-c / z), 0.0)
    if val.ndim == 0:
        return float(val)
    return val


def stationary_density_y(y, r, sigma):
    """Stationary density of y = x/x0: 2r/(sigma^2 y log^2 y) e^{-2r/(sigma^2 log y)}.

    Support is (1, infinity); arguments at or below 1 give 0.
    """
    if not r > 0.0:
        raise ParameterError(f"r must be > 0, got {r}")
    _check_sigma(sigma)
    y = np.asarray(y, dtype=float)
    c = 2.0 * r / (sigma * sigma)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ly = np.log(np.where(y > 1.0, y, 2.0))
        val = np.where(y > 1.0, c / (y * ly * ly) * np.exp(-c / ly), 0.0)
    if val.ndim == 0:
        return float(val)
    return val


def stationary_cdf_y(y, r, sigma):
    """P(y <= Y) = e^{-2r/(sigma^2 log Y)} for Y > 1, else 0."""
    if not r > 0.0:
        raise ParameterError(f"r must be > 0, got {r}")
    _check_sigma(sigma)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        ly = np.log(np.where(y > 1.0, y, 2.0))
        val = np.where(y > 1.0, np.exp(-2.0 * r / (sigma * sigma * ly)), 0.0)
    if val.ndim == 0:
        return float(val)
    return val


def ks_distance(samples, cdf):
    """Kolmogorov-Smirnov sup distance between the empirical CDF of the
    samples and an analytic CDF (a callable accepting arrays)."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < 100:
        raise SizeLimitError(f"need at least 100 samples for a KS distance, got {n}")
    xs = np.sort(samples)
    F = np.asarray(cdf(xs), dtype=float)
    i = np.arange(1, n + 1)
    return float(max((i / n - F).max(), (F - (i - 1) / n).max()))


def ks_two_sample(a, b):
    """Two-sample KS distance; used for the law-equivalence check
    between the trapezoid integral and the auxiliary diffusion."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size < 100 or b.size < 100:
        raise SizeLimitError(
            f"need at least 100 samples per side, got {a.size} and {b.size}"
        )
    both = np.concatenate([a, b])
    Fa = np.searchsorted(a, both, side="right") / a.size
    Fb = np.searchsorted(b, both, side="right") / b.size
    return float(np.abs(Fa - Fb).max())
