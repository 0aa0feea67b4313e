"""Path sampling and the Monte Carlo mean estimator."""

import math

import numpy as np
import pytest

from longrun import (
    ModelParams,
    ParameterError,
    exact_mean,
    mc_mean,
    multiplier_covariance,
    sample_path,
)


def test_params_validation():
    with pytest.raises(ParameterError):
        ModelParams(rho=1.0, sigma=0.1, tau=1.0, n=4)
    with pytest.raises(ParameterError):
        ModelParams(rho=-0.1, sigma=0.1, tau=1.0, n=4)
    with pytest.raises(ParameterError):
        ModelParams(rho=0.1, sigma=-1.0, tau=1.0, n=4)
    with pytest.raises(ParameterError):
        ModelParams(rho=0.1, sigma=0.1, tau=0.0, n=4)
    with pytest.raises(ParameterError):
        ModelParams(rho=0.1, sigma=0.1, tau=1.0, n=0)
    with pytest.raises(ParameterError):
        ModelParams(rho=0.1, sigma=0.1, tau=1.0, n=4, x0=0.0)


def test_beta_temperature_round_trip():
    p = ModelParams.from_temperature(0.1, 0.37, 25, tau=2.0)
    assert math.isclose(p.temperature, 0.37, rel_tol=1e-14)
    assert math.isclose(p.beta, 0.5 * p.sigma**2 * p.tau * p.n**2, rel_tol=1e-15)
    p0 = ModelParams.from_temperature(0.1, math.inf, 25)
    assert p0.sigma == 0.0 and p0.temperature == math.inf


def test_multiplier_covariance():
    p = ModelParams(rho=0.3, sigma=0.5, tau=2.0, n=6)
    # cov(a_i, a_j) = rho^2 (e^{sigma^2 tau min(i,j)} - 1); zero when either
    # index is 0 because W starts at 0
    assert multiplier_covariance(p, 0, 4) == 0.0
    got = multiplier_covariance(p, 3, 2)
    assert math.isclose(got, 0.09 * math.expm1(0.25 * 2.0 * 2), rel_tol=1e-14)
    with pytest.raises(ParameterError):
        multiplier_covariance(p, 0, 6)


def test_sample_path_structure():
    p = ModelParams(rho=0.2, sigma=0.4, tau=1.0, n=50)
    path = sample_path(p, seed=11)
    assert path.states.shape == (51,)
    assert path.brownian.shape == (50,)
    assert path.brownian[0] == 0.0
    # multiplicative recursion holds exactly
    assert np.allclose(path.states[1:], path.multipliers * path.states[:-1],
                       rtol=0.0, atol=0.0)
    # log bookkeeping consistent with linear states
    assert np.allclose(np.exp(path.log_states), path.states, rtol=1e-10)
    # multipliers exceed 1: a_i = 1 + rho*exp(...)
    assert np.all(path.multipliers > 1.0)
    again = sample_path(p, seed=11)
    assert np.array_equal(path.states, again.states)


def test_mc_mean_sigma_zero_is_exact():
    p = ModelParams(rho=0.1, sigma=0.0, tau=1.0, n=6)
    res = mc_mean(p, 500, seed=1)
    assert res.std_error == 0.0
    assert math.isclose(res.estimate, 1.1**6, rel_tol=1e-13)
    assert math.isclose(res.log_mean, 6 * math.log(1.1), rel_tol=1e-13)
    assert not res.heavy_tailed
    assert res.num_overflow_paths == 0


def test_mc_mean_matches_exact_within_4se():
    for rho, temperature, n, seed in [
        (0.1, 1.0, 10, 202),
        (0.5, 0.5, 8, 203),
        (0.01, 2.0, 16, 204),
    ]:
        p = ModelParams.from_temperature(rho, temperature, n)
        res = mc_mean(p, 40000, seed=seed)
        truth = math.exp(exact_mean(p))
        assert abs(res.estimate - truth) <= 4.0 * res.std_error, (rho, temperature, n)


def test_mc_mean_deterministic():
    p = ModelParams(rho=0.2, sigma=0.3, tau=1.0, n=12)
    a = mc_mean(p, 3000, seed=9)
    b = mc_mean(p, 3000, seed=9)
    assert a == b
    c = mc_mean(p, 3000, seed=10)
    assert a.estimate != c.estimate


def test_mc_mean_flags_heavy_tail():
    # beta = sigma^2 tau n^2 / 2 = 5: the mean is dominated by rare
    # aligned paths and the kurtosis blows up
    p = ModelParams(rho=0.5, sigma=math.sqrt(10.0 / 64.0), tau=1.0, n=8)
    res = mc_mean(p, 20000, seed=5)
    assert res.heavy_tailed
    assert res.kurtosis > 100.0
    # mild regime stays calm
    q = ModelParams.from_temperature(0.1, 1.0, 10)
    assert not mc_mean(q, 20000, seed=5).heavy_tailed


def test_mc_mean_log_domain_survives_overflow():
    # sigma^2 tau n^2 / 2 = 50 at n = 100: individual x_n overflow but the
    # log-domain estimate stays finite
    p = ModelParams(rho=0.9, sigma=math.sqrt(100.0 / 100.0**2), tau=1.0, n=100)
    res = mc_mean(p, 2000, seed=77)
    assert math.isfinite(res.log_mean)
    assert res.log_mean > 0.0


def test_mc_mean_rejects_tiny_samples():
    p = ModelParams(rho=0.1, sigma=0.1, tau=1.0, n=4)
    with pytest.raises(ParameterError):
        mc_mean(p, 1, seed=0)
