"""Exact thermodynamic-limit equation of state and growth-rate surface.

In the limit n -> infinity at fixed temperature T = 1/beta and density d,
the lattice gas behind the multiplicative process has an exact solution
parameterized by an intensive quantity pi(d, T) > 0 solving

    I(pi) = 1/d - 1,   I(pi) = int_0^1 dy / (exp(beta*(d^2 y(2-y) + pi)) - 1).

With J = int_0^1 log(1 - exp(-beta*(d^2 y(2-y) + pi))) dy and
K = int_0^1 y(2-y) / (exp(beta*(d^2 y(2-y) + pi)) - 1) dy the free energy
density, pressure, Gibbs density and chemical potential are

    f = (1/3) d^2 (2d - 3) + pi*(d - 1) + T*d*J
    p = (1/3) d^2 (4d - 3) + pi + 2 d^3 K      (= -f + d*mu)
    g = f + pi
    mu = 2d^2 - 2d + pi + T*J + 2 d^2 K        (d-derivative of f at fixed
                                                pi; valid because f is
                                                stationary in pi at the
                                                solution of the I equation)

and the growth rate at fugacity rho is lambda(rho, T) = p(d(rho), T) / T
with d(rho) inverting the fugacity exp(mu/T), Maxwell-corrected below the
critical temperature.
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConvergenceError,
    NoCoexistenceError,
    NoTransitionError,
    ParameterError,
)
from .quadrature import integrate_adaptive

# Default relative tolerance of the Bose integrals; one order tighter than
# the 1e-10 the rest of the stack budgets for.  Coexistence and critical
# solvers use _TIGHT so finite differences of p stay quiet.
_QUAD_TOL = 1e-11
_TIGHT = 1e-13

_EPS_CBRT = 6.06e-6  # cbrt(machine epsilon), first-derivative step scale


def _check_dT(d, T):
    if not 0.0 < d < 1.0:
        raise ParameterError(f"density must lie in (0,1), got {d}")
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")


def _log1mexp(z):
    """log(1 - exp(-z)) for z > 0, stable at both ends."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < math.log(2.0)
    with np.errstate(divide="ignore"):
        out[small] = np.log(-np.expm1(-z[small]))
        out[~small] = np.log1p(-np.exp(-z[~small]))
    return out


def _bose_breaks(d, T, pi):
    """Seed panels, geometrically refined toward y=0 where the integrand
    varies on the scale pi/(2 d^2), which can be hundreds of decades below
    1 on the dilute branch at low temperature."""
    beta = 1.0 / T
    scale = min(pi / (2.0 * d * d), 1.0 / (2.0 * beta * d * d), 0.5)
    scale = max(scale, 1e-306)
    breaks = [0.0]
    y = scale
    while y < 1.0:
        breaks.append(y)
        y *= 4.0
    breaks.append(1.0)
    return breaks


def _phi_factor(y):
    return y * (2.0 - y)


def bose_occupation_integral(d, T, pi, rel_tol=1e-10):
    """I(pi) = int_0^1 dy / (exp(beta*(d^2 y(2-y) + pi)) - 1)."""
    _check_dT(d, T)
    if pi <= 0.0:
        raise ParameterError(f"pi must be > 0, got {pi}")
    beta = 1.0 / T
    d2 = d * d

    def f(y):
        z = beta * (d2 * _phi_factor(y) + pi)
        with np.errstate(over="ignore"):
            return 1.0 / np.expm1(z)

    val, _ = integrate_adaptive(f, _bose_breaks(d, T, pi), rel_tol=rel_tol)
    return val


def _bose_J(d, T, pi, rel_tol=_QUAD_TOL):
    """J = int_0^1 log(1 - exp(-beta*(d^2 y(2-y) + pi))) dy  (negative)."""
    beta = 1.0 / T
    d2 = d * d

    def f(y):
        return _log1mexp(beta * (d2 * _phi_factor(y) + pi))

    val, _ = integrate_adaptive(f, _bose_breaks(d, T, pi), rel_tol=rel_tol)
    return val


def _bose_K(d, T, pi, rel_tol=_QUAD_TOL):
    """K = int_0^1 y(2-y) / (exp(beta*(d^2 y(2-y) + pi)) - 1) dy."""
    beta = 1.0 / T
    d2 = d * d

    def f(y):
        z = beta * (d2 * _phi_factor(y) + pi)
        with np.errstate(over="ignore"):
            return _phi_factor(y) / np.expm1(z)

    val, _ = integrate_adaptive(f, _bose_breaks(d, T, pi), rel_tol=rel_tol)
    return val


def pi_lower_bound(d, T):
    """Jensen bound: pi(d,T) >= -T*log(1-d) - (2/3) d^2."""
    return -T * math.log1p(-d) - (2.0 / 3.0) * d * d


@lru_cache(maxsize=65536)
def _solve_pi(d, T, quad_tol):
    target = 1.0 / d - 1.0

    def f(pi):
        return target - bose_occupation_integral(d, T, pi, rel_tol=quad_tol)

    # I decreases in pi and diverges logarithmically at pi=0, so a bracket
    # always exists; hunt for it geometrically so no evaluation strays far
    # from the root (I at absurdly small pi is expensive to integrate).
    hi = max(pi_lower_bound(d, T), 1e-6)
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise ConvergenceError(f"no upper bracket for pi at d={d}, T={T}")
    lo = 0.5 * hi
    while f(lo) > 0.0:
        lo *= 0.25
        if lo < 1e-305:
            raise ConvergenceError(f"no lower bracket for pi at d={d}, T={T}")
    xtol = max(quad_tol * 1e-2, 1e-15)
    return brentq(f, lo, hi, xtol=xtol, rtol=4.0 * np.finfo(float).eps)


def solve_pi(d, T):
    """The unique pi > 0 with I(pi) = 1/d - 1."""
    _check_dT(d, T)
    return _solve_pi(d, T, _QUAD_TOL)


@lru_cache(maxsize=65536)
def _JK(d, T, quad_tol):
    pi = _solve_pi(d, T, quad_tol)
    return pi, _bose_J(d, T, pi, quad_tol), _bose_K(d, T, pi, quad_tol)


def _f(d, T, quad_tol=_QUAD_TOL):
    pi, J, _ = _JK(d, T, quad_tol)
    return d * d * (2.0 * d - 3.0) / 3.0 + pi * (d - 1.0) + T * d * J


def _p(d, T, quad_tol=_QUAD_TOL):
    pi, _, K = _JK(d, T, quad_tol)
    return d * d * (4.0 * d - 3.0) / 3.0 + pi + 2.0 * d**3 * K


def _mu(d, T, quad_tol=_QUAD_TOL):
    pi, J, K = _JK(d, T, quad_tol)
    return 2.0 * d * d - 2.0 * d + pi + T * J + 2.0 * d * d * K


def free_energy(d, T):
    """Raw (pre-envelope) free energy density; two-phase corrections are
    the business of maxwell/convex_envelope."""
    _check_dT(d, T)
    return _f(d, T)


def pressure(d, T):
    _check_dT(d, T)
    return _p(d, T)


def gibbs(d, T):
    _check_dT(d, T)
    pi, _, _ = _JK(d, T, _QUAD_TOL)
    return _f(d, T) + pi


def chemical_potential(d, T, check=True):
    """mu = d-derivative of the free energy density.

    Evaluated analytically at fixed pi; the pi-dependence drops because
    f is stationary in pi at the solved value.  Unless check=False the
    value is also compared against a central finite difference of
    free_energy (step 1e-5) and a disagreement beyond 1e-6 relative
    raises ConvergenceError.  The check is skipped within 2e-5 of the
    density endpoints where the stencil does not fit.
    """
    _check_dT(d, T)
    mu = _mu(d, T)
    if check and 2e-5 < d < 1.0 - 2e-5:
        h = 1e-5
        fd = (_f(d + h, T) - _f(d - h, T)) / (2.0 * h)
        if abs(fd - mu) > 1e-6 * max(1.0, abs(mu)):
            raise ConvergenceError(
                f"chemical potential cross-check failed at d={d}, T={T}: "
                f"analytic {mu} vs finite-difference {fd}"
            )
    return mu


def fugacity(d, T):
    return math.exp(chemical_potential(d, T) / T)


def _log_fugacity(d, T, quad_tol=_QUAD_TOL):
    return _mu(d, T, quad_tol) / T


@dataclass(frozen=True)
class ThermoPoint:
    """One point of the equation of state.

    pi, f, p, g, mu, rho are the raw single-phase values.  Inside a
    coexistence region isotherm() labels the point two_phase and attaches
    the plateau pressure p0 and equilibrium fugacity rho0.
    """

    d: float
    T: float
    pi: float
    f: float
    p: float
    g: float
    mu: float
    rho: float
    two_phase: bool = False
    p0: float = math.nan
    rho0: float = math.nan


def thermo_point(d, T):
    _check_dT(d, T)
    pi, J, K = _JK(d, T, _QUAD_TOL)
    f = _f(d, T)
    mu = _mu(d, T)
    return ThermoPoint(
        d=d,
        T=T,
        pi=pi,
        f=f,
        p=_p(d, T),
        g=f + pi,
        mu=mu,
        rho=math.exp(mu / T),
    )


@dataclass(frozen=True)
class CoexistenceRecord:
    T: float
    d_g: float
    d_ell: float
    p0: float
    rho0: float


@dataclass(frozen=True)
class CriticalPoint:
    T_C: float
    d_C: float
    rho_C: float


def pressure_d(d, T):
    """First d-derivative of p, central difference with cbrt(eps) step."""
    h = _EPS_CBRT * max(1.0, abs(d))
    return (_p(d + h, T, _TIGHT) - _p(d - h, T, _TIGHT)) / (2.0 * h)


def pressure_dd(d, T):
    """Second d-derivative of p.  The step is much wider than cbrt(eps):
    the quadrature noise floor ~1e-14 forces h ~ 1e-3 to keep the
    difference quotient quiet."""
    h = 1e-3 * max(1.0, abs(d))
    return (_p(d + h, T, _TIGHT) - 2.0 * _p(d, T, _TIGHT) + _p(d - h, T, _TIGHT)) / (
        h * h
    )


def _scan_extrema(T):
    """Locate the loop extrema of the raw isotherm, or None if monotone.

    Returns (d_max, p_max, d_min, p_min) with d_max < d_min: the local
    maximum and local minimum of p(d, T).
    """
    grid = np.concatenate(
        [np.geomspace(1e-7, 0.04, 40, endpoint=False), np.linspace(0.04, 0.995, 260)]
    )
    pvals = np.array([_p(x, T, _TIGHT) for x in grid])
    diffs = np.diff(pvals)
    rising = diffs > 0.0
    max_brackets = [
        k for k in range(len(diffs) - 1) if rising[k] and not rising[k + 1]
    ]
    min_brackets = [
        k for k in range(len(diffs) - 1) if not rising[k] and rising[k + 1]
    ]
    if not max_brackets or not min_brackets:
        return None
    k_max = max(max_brackets, key=lambda k: pvals[k + 1])
    k_min = min(min_brackets, key=lambda k: pvals[k + 1])
    if grid[k_max] >= grid[k_min]:
        return None

    def refine(k_lo, k_hi):
        a, b = grid[k_lo], grid[k_hi]
        lo_sign = pressure_d(a, T)
        hi_sign = pressure_d(b, T)
        if lo_sign * hi_sign > 0.0:
            return 0.5 * (a + b)  # degenerate, flat to FD noise
        return brentq(lambda x: pressure_d(x, T), a, b, xtol=1e-10)

    d_max = refine(k_max, k_max + 2 if k_max + 2 < grid.size else k_max + 1)
    d_min = refine(k_min, k_min + 2 if k_min + 2 < grid.size else k_min + 1)
    return d_max, _p(d_max, T, _TIGHT), d_min, _p(d_min, T, _TIGHT)


def _equal_area(T, p0, d_max, d_min):
    """Outermost roots of p = p0 and the equal-area residual.

    The residual is int_{d_g}^{d_ell} (p(x) - p0)/x^2 dx.  With
    p = -f + x f' the integrand is the exact derivative of (f(x)+p0)/x,
    and at roots of p = p0 that antiderivative equals mu(x), so the
    integral collapses to mu(d_ell) - mu(d_g) with no quadrature at all.
    Driving it to 0 is the equal-chemical-potential condition, which is
    why equal area and common tangent coincide.
    """
    d_g = brentq(lambda x: _p(x, T, _TIGHT) - p0, 1e-12, d_max, xtol=1e-15)
    hi = d_min + 0.9 * (1.0 - d_min)
    while _p(hi, T, _TIGHT) < p0:
        hi = 0.5 * (hi + 1.0)
        if 1.0 - hi < 1e-13:
            raise ConvergenceError(f"no liquid root for p0={p0} at T={T}")
    d_ell = brentq(lambda x: _p(x, T, _TIGHT) - p0, d_min, hi, xtol=1e-15)
    residual = _mu(d_ell, T, _TIGHT) - _mu(d_g, T, _TIGHT)
    return d_g, d_ell, residual


@lru_cache(maxsize=1024)
def _coexistence_or_none(T):
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    extrema = _scan_extrema(T)
    if extrema is None:
        return None
    d_max, p_hi, d_min, p_lo = extrema
    span = p_hi - max(p_lo, 0.0)
    a = max(p_lo, 0.0) + 1e-6 * span
    b = p_hi - 1e-6 * span

    # safeguarded Newton on the equal-area residual; its p0-derivative is
    # exactly -(1/d_g - 1/d_ell)
    p0 = 0.5 * (a + b)
    d_g = d_ell = math.nan
    for _ in range(80):
        d_g, d_ell, res = _equal_area(T, p0, d_max, d_min)
        if abs(res) < 1e-10:
            break
        if res > 0.0:
            a = p0
        else:
            b = p0
        step = res / (1.0 / d_g - 1.0 / d_ell)
        candidate = p0 + step
        p0 = candidate if a < candidate < b else 0.5 * (a + b)
    else:
        raise ConvergenceError(
            f"equal-area residual did not reach 1e-10 at T={T}", last_iterate=p0
        )

    rho_g = math.exp(_log_fugacity(d_g, T, _TIGHT))
    rho_l = math.exp(_log_fugacity(d_ell, T, _TIGHT))
    if abs(rho_g - rho_l) > 1e-6 * rho_g:
        raise ConvergenceError(
            f"fugacity mismatch at coexistence, T={T}: {rho_g} vs {rho_l}"
        )
    return CoexistenceRecord(T=T, d_g=d_g, d_ell=d_ell, p0=p0, rho0=rho_g)


def maxwell(T):
    """Equal-area coexistence record at temperature T < T_C."""
    rec = _coexistence_or_none(T)
    if rec is None:
        raise NoCoexistenceError(
            f"no van der Waals loop at T={T}; temperature is at or above critical"
        )
    return rec


def coexistence_curve(T_grid):
    return [maxwell(T) for T in T_grid]


@lru_cache(maxsize=8)
def critical_point(initial=None):
    """Merge point of the isotherm extrema: p_d = p_dd = 0.

    Damped two-dimensional Newton in (d, T) with finite-difference
    Jacobian (steps 1e-4), started from the van der Waals critical point
    (T, d) = (1/6, 1/2) or from the optional (T, d) pair `initial`.
    """

    def residuals(x):
        return np.array([pressure_d(x[0], x[1]), pressure_dd(x[0], x[1])])

    if initial is None:
        initial = (1.0 / 6.0, 0.5)
    x = np.array([initial[1], initial[0]])
    F = residuals(x)
    h = 1e-4
    for _ in range(100):
        if np.all(np.abs(F) < 1e-7):
            rho_c = math.exp(_log_fugacity(x[0], x[1], _TIGHT))
            return CriticalPoint(T_C=x[1], d_C=x[0], rho_C=rho_c)
        J = np.empty((2, 2))
        for col in range(2):
            e = np.zeros(2)
            e[col] = h
            J[:, col] = (residuals(x + e) - residuals(x - e)) / (2.0 * h)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(
                f"singular Jacobian in critical-point search at {x}", last_iterate=x
            ) from exc
        lam = 1.0
        norm = np.linalg.norm(F)
        while lam > 1e-3:
            xn = x + lam * step
            xn[0] = min(max(xn[0], 0.05), 0.95)
            xn[1] = min(max(xn[1], 0.02), 1.0)
            Fn = residuals(xn)
            if np.linalg.norm(Fn) < norm:
                x, F = xn, Fn
                break
            lam *= 0.5
        else:
            raise ConvergenceError(
                f"critical-point line search stalled at {x}", last_iterate=x
            )
    raise ConvergenceError(
        f"critical-point Newton did not converge, last iterate {x}", last_iterate=x
    )


def isotherm(T, d_grid):
    """ThermoPoint per grid density, two-phase points labeled with the
    plateau values."""
    d_grid = list(d_grid)
    if not d_grid:
        raise ParameterError("empty density grid")
    if any(not 0.0 < x < 1.0 for x in d_grid):
        raise ParameterError("densities must lie inside (0,1)")
    if any(b <= a for a, b in zip(d_grid, d_grid[1:])):
        raise ParameterError("density grid must be strictly increasing")
    rec = _coexistence_or_none(T)
    points = []
    for d in d_grid:
        tp = thermo_point(d, T)
        if rec is not None and rec.d_g < d < rec.d_ell:
            tp = replace(tp, two_phase=True, p0=rec.p0, rho0=rec.rho0)
        points.append(tp)
    return points


def transition_temperature(rho):
    """Temperature where fugacity rho sits on the coexistence curve."""
    crit = critical_point()
    if not 0.0 < rho < crit.rho_C:
        raise NoTransitionError(
            f"no transition for rho={rho}; coexistence needs 0 < rho < {crit.rho_C:.4f}"
        )

    def f(T):
        return maxwell(T).rho0 - rho

    # the coexistence loop shrinks below scan resolution within ~2e-4 of
    # T_C, so the bracket walk stops there; affects only rho within about
    # 4e-4 of rho_C
    hi = crit.T_C - 1e-3
    while f(hi) < 0.0:
        hi = 0.5 * (hi + crit.T_C)
        if crit.T_C - hi < 2e-4:
            raise ConvergenceError(f"cannot bracket transition for rho={rho}")
    # vdW value -1/(3 log rho) overshoots the exact curve; halve until below
    lo = min(-1.0 / (3.0 * math.log(rho)), hi * 0.9)
    while f(lo) > 0.0:
        lo *= 0.7
        if lo < 5e-3:
            raise ConvergenceError(f"cannot bracket transition for rho={rho}")
    return brentq(f, lo, hi, xtol=1e-7)


def _invert_fugacity(rho, T, lo, hi):
    target = math.log(rho)

    def f(d):
        return _log_fugacity(d, T, _TIGHT) - target

    return brentq(f, lo, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps)


def lyapunov(rho, T):
    """Long-run growth rate lambda(rho, T) = p/T on the equilibrium branch."""
    if not 0.0 < rho < 1.0:
        raise ParameterError(f"rho must lie in (0,1), got {rho}")
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    rec = _coexistence_or_none(T)
    if rec is None:
        d = _invert_fugacity(rho, T, 1e-10, 1.0 - 1e-12)
        return _p(d, T, _TIGHT) / T
    if abs(rho - rec.rho0) <= 1e-12 * max(rho, rec.rho0):
        return rec.p0 / T
    if rho < rec.rho0:
        d = _invert_fugacity(rho, T, 1e-10, rec.d_g)
    else:
        d = _invert_fugacity(rho, T, rec.d_ell, 1.0 - 1e-12)
    return _p(d, T, _TIGHT) / T


def convex_envelope(samples):
    """Lower convex envelope of (d, f) samples by monotone chain.

    Returns (d, f_env) at the input densities; f_env equals f wherever
    the input is already convex.
    """
    pts = [(float(d), float(f)) for d, f in samples]
    if len(pts) < 2:
        raise ParameterError("need at least two samples")
    if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
        raise ParameterError("samples must be strictly increasing in d")
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0.0:
                hull.pop()
            else:
                break
        hull.append(p)
    hx = np.array([h[0] for h in hull])
    hy = np.array([h[1] for h in hull])
    ds = np.array([p[0] for p in pts])
    env = np.interp(ds, hx, hy)
    return list(zip(ds.tolist(), env.tolist()))
