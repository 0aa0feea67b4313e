"""Brownian-driven multiplicative process: parameters, paths, Monte Carlo.

The process is x_{i+1} = a_i * x_i with multipliers

    a_i = 1 + rho * exp(sigma*W(t_i) - sigma^2 t_i / 2),    t_i = i*tau,

where W is a standard Brownian motion.  Each multiplier has mean 1 + rho;
correlations between multipliers decay only through the shared Brownian
path, which is what makes the long-run growth rate nontrivial.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import ParameterError

# Paths are simulated in fixed-size blocks with per-block child seeds, so
# estimates do not depend on how work is scheduled across workers.
_PATH_BLOCK = 4096

_LOG_DBL_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the multiplicative process.

    rho is the multiplier excess (0 <= rho < 1), sigma the Brownian
    volatility, tau the time step, n the number of steps, x0 the start
    value.
    """

    rho: float
    sigma: float
    tau: float
    n: int
    x0: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ParameterError(f"rho must be in [0, 1), got {self.rho}")
        if self.sigma < 0.0:
            raise ParameterError(f"sigma must be >= 0, got {self.sigma}")
        if self.tau <= 0.0:
            raise ParameterError(f"tau must be > 0, got {self.tau}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ParameterError(f"n must be an integer >= 1, got {self.n}")
        if self.x0 <= 0.0:
            raise ParameterError(f"x0 must be > 0, got {self.x0}")

    @property
    def beta(self):
        """Inverse temperature of the equivalent lattice gas, sigma^2*tau*n^2/2."""
        return 0.5 * self.sigma**2 * self.tau * self.n**2

    @property
    def temperature(self):
        return math.inf if self.beta == 0.0 else 1.0 / self.beta

    @property
    def times(self):
        return self.tau * np.arange(self.n)

    @classmethod
    def from_temperature(cls, rho, temperature, n, tau=1.0, x0=1.0):
        """Choose sigma so the equivalent gas sits at the given temperature."""
        if temperature <= 0.0:
            raise ParameterError(f"temperature must be > 0, got {temperature}")
        if math.isinf(temperature):
            sigma = 0.0
        else:
            sigma = math.sqrt(2.0 / (temperature * tau * n * n))
        return cls(rho=rho, sigma=sigma, tau=tau, n=n, x0=x0)


def multiplier_covariance(params, i, j):
    """cov(a_i, a_j) = rho^2 * (exp(sigma^2 * min(t_i, t_j)) - 1)."""
    if not (0 <= i < params.n and 0 <= j < params.n):
        raise ParameterError(
            f"multiplier indices must lie in [0, {params.n - 1}], got ({i}, {j})"
        )
    t = params.tau * min(i, j)
    return params.rho**2 * math.expm1(params.sigma**2 * t)


@dataclass(frozen=True)
class PathRealization:
    """One simulated path.

    states[i+1] == multipliers[i] * states[i] holds exactly; log_states
    carries the same path accumulated in the log domain, which stays
    finite even when the linear states overflow.
    """

    params: ModelParams
    times: np.ndarray = field(repr=False)
    brownian: np.ndarray = field(repr=False)
    multipliers: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    log_states: np.ndarray = field(repr=False)


def _log_multipliers(params, brownian):
    """log(1 + rho*exp(u)) with u = sigma*W - sigma^2 t/2, stable for any u."""
    u = params.sigma * brownian - 0.5 * params.sigma**2 * params.times
    with np.errstate(divide="ignore"):
        log_rho = np.log(params.rho)
    return np.logaddexp(0.0, log_rho + u)


def sample_path(params, seed):
    rng = np.random.default_rng(seed)
    dw = rng.normal(0.0, math.sqrt(params.tau), params.n - 1)
    brownian = np.concatenate(([0.0], np.cumsum(dw)))
    u = params.sigma * brownian - 0.5 * params.sigma**2 * params.times
    with np.errstate(over="ignore"):
        multipliers = 1.0 + params.rho * np.exp(u)
    states = np.empty(params.n + 1)
    states[0] = params.x0
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(params.n):
            states[i + 1] = multipliers[i] * states[i]
    log_states = np.concatenate(
        ([math.log(params.x0)], math.log(params.x0) + np.cumsum(_log_multipliers(params, brownian)))
    )
    return PathRealization(
        params=params,
        times=params.times,
        brownian=brownian,
        multipliers=multipliers,
        states=states,
        log_states=log_states,
    )


@dataclass(frozen=True)
class McMeanResult:
    """Monte Carlo estimate of <x_n> with log-domain bookkeeping.

    estimate/std_error may be inf when the mean itself exceeds float
    range; log_mean is always finite.  heavy_tailed is set when the
    sample kurtosis of x_n exceeds the configured threshold, flagging a
    mean estimate dominated by rare paths.
    """

    estimate: float
    std_error: float
    log_mean: float
    kurtosis: float
    heavy_tailed: bool
    num_overflow_paths: int
    num_paths: int


def mc_mean(params, num_paths, seed, kurtosis_threshold=20.0):
    """Estimate <x_n> from num_paths independent paths.

    Per-path weights are accumulated in the log domain, so paths whose
    linear x_n overflows still contribute exactly; they are counted in
    num_overflow_paths.  Fixed path blocks with per-block child seeds
    make the result a pure function of (params, num_paths, seed).
    """
    if num_paths < 2:
        raise ParameterError(f"num_paths must be >= 2, got {num_paths}")
    n = params.n
    sqrt_tau = math.sqrt(params.tau)
    with np.errstate(divide="ignore"):
        log_rho = np.log(params.rho)
    half_var_t = 0.5 * params.sigma**2 * params.times[1:]

    nblocks = (num_paths + _PATH_BLOCK - 1) // _PATH_BLOCK
    children = np.random.SeedSequence(seed).spawn(nblocks)
    log_pow_sums = np.full(4, -np.inf)  # log sum of x^k, k = 1..4
    overflow = 0
    for b in range(nblocks):
        bsize = min(_PATH_BLOCK, num_paths - b * _PATH_BLOCK)
        rng = np.random.default_rng(children[b])
        dw = rng.normal(0.0, sqrt_tau, (bsize, n - 1))
        w = np.cumsum(dw, axis=1)
        # log a_0 = log(1+rho); later steps from the sampled Brownian values
        log_x = math.log(params.x0) + np.log1p(params.rho)
        if n > 1:
            log_a = np.logaddexp(0.0, log_rho + params.sigma * w - half_var_t)
            log_x = log_x + log_a.sum(axis=1)
        else:
            log_x = np.full(bsize, log_x)
        overflow += int(np.count_nonzero(log_x > _LOG_DBL_MAX))
        for k in range(1, 5):
            log_pow_sums[k - 1] = np.logaddexp(
                log_pow_sums[k - 1], logsumexp(k * log_x)
            )

    log_n = math.log(num_paths)
    log_m = log_pow_sums - log_n  # log of raw sample moments
    log_mean = float(log_m[0])

    # variance of the mean: (m2 - m1^2)/N, all in the log domain
    gap = min(2.0 * log_m[0] - log_m[1], 0.0)  # log(m1^2/m2) <= 0
    log_var = log_m[1] + math.log1p(-math.exp(gap)) if gap < 0.0 else -math.inf
    log_se = 0.5 * (log_var - log_n)

    with np.errstate(over="ignore"):
        estimate = float(np.exp(log_mean))
        std_error = float(np.exp(log_se))
        # normalized raw moments r_k = m_k / m1^k
        r2, r3, r4 = (float(np.exp(log_m[k] - (k + 1) * log_m[0])) for k in (1, 2, 3))
    mu2 = r2 - 1.0
    if mu2 > 0.0 and math.isfinite(r4):
        kurtosis = (r4 - 4.0 * r3 + 6.0 * r2 - 3.0) / (mu2 * mu2)
    elif not math.isfinite(r4):
        kurtosis = math.inf
    else:
        kurtosis = math.nan
    heavy = bool(kurtosis > kurtosis_threshold) if not math.isnan(kurtosis) else False

    return McMeanResult(
        estimate=estimate,
        std_error=std_error,
        log_mean=log_mean,
        kurtosis=kurtosis,
        heavy_tailed=heavy,
        num_overflow_paths=overflow,
        num_paths=num_paths,
    )
