"""Exact finite-n averages via the lattice-gas correspondence.

Expanding E[prod_i a_i] over subsets S of step indices turns <x_n> into a
grand partition sum of a one-dimensional gas: a pair occupying indices
i < j carries the Boltzmann weight exp(sigma^2*tau*min(i,j)), i.e. an
attractive pair energy -(2/n^2)*min(i,j) at inverse temperature
beta = sigma^2*tau*n^2/2.  Index 0 never interacts (t_0 = 0), so

    <x_n> = x0 * (1+rho) * Z(beta, rho),

with Z the grand sum over sites 1..n-1.  The identity is also often
quoted without the deterministic (1+rho) factor from index 0; both
conventions are exposed (exact_mean vs grand_partition_mean) and the
difference vanishes in the growth rate as n grows.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from ._kernels import log_canonical_vector
from .errors import ParameterError, SizeLimitError

_BRUTE_LIMIT = 20
_SPECTRUM_LIMIT = 18


@dataclass(frozen=True)
class LatticeSpec:
    """Hard-core gas on sites 1..n-1 with pair energy -(2/n^2)*min(i,j)."""

    n: int
    rho: float
    beta: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ParameterError(f"n must be an integer >= 2, got {self.n}")
        if self.rho < 0.0:
            raise ParameterError(f"rho must be >= 0, got {self.rho}")
        if self.beta < 0.0:
            raise ParameterError(f"beta must be >= 0, got {self.beta}")

    @property
    def sites(self):
        return range(1, self.n)


@lru_cache(maxsize=1024)
def _canonical_vector(n, beta):
    """log Z_N for N = 0..n-1; cached so fugacity sweeps reuse one DP pass."""
    return log_canonical_vector(n, beta)


def _log_fugacity_weights(log_z, rho):
    """log(rho^N * Z_N) handling rho = 0 without 0*(-inf)."""
    if rho == 0.0:
        w = np.full_like(log_z, -np.inf)
        w[0] = log_z[0]
        return w
    return log_z + math.log(rho) * np.arange(len(log_z))


def grand_partition_log(spec):
    """log of Z(beta, rho) = sum_N rho^N Z_N(beta) over sites 1..n-1.

    The canonical vector comes from an O(n^2) right-to-left scan keeping
    the count of particles already placed; everything stays in the log
    domain (the largest cell exceeds e^2000 at beta = 50, n = 200).
    """
    log_z = _canonical_vector(spec.n, spec.beta)
    return float(logsumexp(_log_fugacity_weights(log_z, spec.rho)))


def exact_mean(params):
    """log <x_n>, exact.

    First-principles value: log x0 + log(1+rho) + log Z with Z over
    sites 1..n-1 at beta = sigma^2*tau*n^2/2.
    """
    log_grand = 0.0
    if params.n >= 2:
        log_grand = grand_partition_log(
            LatticeSpec(n=params.n, rho=params.rho, beta=params.beta)
        )
    return math.log(params.x0) + math.log1p(params.rho) + log_grand


def grand_partition_mean(params):
    """log(x0 * Z): the partition-function identity without the free
    index-0 factor; differs from exact_mean by exactly log(1+rho)."""
    return exact_mean(params) - math.log1p(params.rho)


def brute_mean(params):
    """log <x_n> by explicit enumeration of all 2^n index subsets."""
    n = params.n
    if n > _BRUTE_LIMIT:
        raise SizeLimitError(f"brute_mean enumerates 2^n subsets; n={n} > {_BRUTE_LIMIT}")
    coupling = params.sigma**2 * params.tau
    log_rho = math.log(params.rho) if params.rho > 0.0 else -math.inf

    total = -math.inf
    chunk = 1 << 16
    idx = np.arange(n, dtype=np.int64)
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        bits = (masks[:, None] >> idx[None, :]) & 1
        counts = bits.sum(axis=1)
        # sum over pairs i<j in S of min(i,j) = sum_i i * #{j in S : j > i}
        after = bits[:, ::-1].cumsum(axis=1)[:, ::-1] - bits
        pair_sum = (idx * bits * after).sum(axis=1)
        with np.errstate(invalid="ignore"):
            log_w = np.where(counts == 0, 0.0, counts * log_rho) + coupling * pair_sum
        total = np.logaddexp(total, logsumexp(log_w))
    return math.log(params.x0) + float(total)


def finite_lyapunov(params):
    """lambda_n = (log <x_n> - log x0) / n."""
    return (exact_mean(params) - math.log(params.x0)) / params.n


def finite_lyapunov_at(rho, temperature, n, tau=1.0):
    """lambda_n on the (rho, T) axes: sigma chosen so beta = 1/T."""
    from .process import ModelParams

    params = ModelParams.from_temperature(rho, temperature, n, tau=tau)
    return finite_lyapunov(params)


def finite_isotherm(n, temperature, rho_grid=None):
    """Parametric finite-n equation of state.

    For each fugacity rho on a grid, the density and pressure per site are
    d = <N>/n and p = (T/n) log Z.  Returns (d, p, rho) arrays ordered by
    increasing d; useful as the finite-size overlay for isotherm plots and
    for the finite-lattice fugacity curve rho(d).
    """
    if rho_grid is None:
        rho_grid = np.logspace(-8.0, 4.0, 481)
    rho_grid = np.asarray(rho_grid, dtype=float)
    beta = 1.0 / temperature
    log_z = _canonical_vector(n, beta)
    counts = np.arange(n)
    d = np.empty(rho_grid.size)
    p = np.empty(rho_grid.size)
    for k, rho in enumerate(rho_grid):
        w = _log_fugacity_weights(log_z, rho)
        log_grand = logsumexp(w)
        occ = np.exp(w - log_grand)
        d[k] = float(occ @ counts) / n
        p[k] = temperature * float(log_grand) / n
    return d, p, rho_grid


@dataclass(frozen=True)
class SpectrumDescriptor:
    """Energy levels of the N-particle sector in the gap representation.

    Configuration energies are ground_energy + sum_k y_k * levels[k]
    where the occupation numbers y_k >= 0 are the inter-particle gaps
    (y_0 counts empty sites left of the leftmost particle) and satisfy
    sum_k y_k = boson_count = n - N - 1.
    """

    n: int
    N: int
    ground_energy: float
    levels: np.ndarray
    boson_count: int


def spectrum_descriptor(n, N):
    _check_spectrum_args(n, N)
    k = np.arange(N + 1)
    levels = (2.0 / (n * n)) * k * (N - (k + 1) / 2.0)
    ground = N * (N - 1) * (2 * N + 2 - 3 * n) / (3.0 * n * n)
    return SpectrumDescriptor(
        n=n, N=N, ground_energy=ground, levels=levels, boson_count=n - N - 1
    )


def _check_spectrum_args(n, N):
    if n > _SPECTRUM_LIMIT:
        raise SizeLimitError(f"spectrum enumeration limited to n <= {_SPECTRUM_LIMIT}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0 <= N <= n - 1:
        raise ParameterError(f"N must satisfy 0 <= N <= n-1, got N={N}, n={n}")


def verify_spectrum(n, N):
    """Check the gap representation of the N-particle energy spectrum.

    Enumerates all C(n-1, N) placements on sites 1..n-1, computes each
    energy directly from the pair rule, and compares the multiset against
    {E0 + sum_k y_k w_k : y_k >= 0, sum y_k = n-N-1}.  All energies are
    compared exactly using the integer scale 3*n^2*E.
    """
    _check_spectrum_args(n, N)

    direct = Counter()
    for sites in itertools.combinations(range(1, n), N):
        # sum over pairs a<b of min = sum_a sites[a]*(N-1-a) for sorted sites
        s = sum(site * (N - 1 - a) for a, site in enumerate(sites))
        direct[-6 * s] += 1

    ground_scaled = N * (N - 1) * (2 * N + 2 - 3 * n)
    level_scaled = [3 * k * (2 * N - k - 1) for k in range(N + 1)]
    spectral = Counter()
    bosons = n - N - 1
    # stars and bars: bar positions among bosons + N slots give the gaps
    for bars in itertools.combinations(range(bosons + N), N):
        prev = -1
        e = ground_scaled
        for k, b in enumerate(bars):
            e += level_scaled[k] * (b - prev - 1)
            prev = b
        e += level_scaled[N] * (bosons + N - 1 - prev)
        spectral[e] += 1

    return direct == spectral
