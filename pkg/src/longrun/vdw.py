"""Van der Waals mean-field approximation of the lattice gas.

Replacing the pair energy -(2/n^2) min(i,j) by a uniform coupling c/n
per pair bounds the partition function on both sides and turns the model
into mean-field theory with free energy density T*A(d) + (c/2) d^2,
where A(d) = d log d + (1-d) log(1-d) is the mixing entropy.  The lower
bound c = UNIFORM_COUPLING_LOWER = -2/3 saturates at large temperature
and is the more accurate one throughout, so every prediction here uses
it; the weaker particle-number-independent upper bound
c = UNIFORM_COUPLING_UPPER = -2 is kept only for reference.

Everything is closed form.  Coexistence below T_C = 1/6 is controlled by
the positive root of Delta = tanh(Delta/(6T)); the coexisting densities
are (1 -+ Delta)/2 and the plateau fugacity is e^{-1/(3T)} at every
temperature below critical.
"""

import math
import warnings
from dataclasses import dataclass

from .errors import NoCoexistenceError, NoTransitionError, ParameterError
from .thermo import CriticalPoint

UNIFORM_COUPLING_LOWER = -2.0 / 3.0
UNIFORM_COUPLING_UPPER = -2.0

VDW_T_C = 1.0 / 6.0
VDW_D_C = 0.5
VDW_RHO_C = math.exp(-2.0)

_TIE = 1e-12


def _check_d(d):
    if not 0.0 < d < 1.0:
        raise ParameterError(f"density must lie in (0,1), got {d}")


def _check_rho_T(rho, T):
    if not 0.0 < rho < 1.0:
        raise ParameterError(f"rho must lie in (0,1), got {rho}")
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")


def vdw_critical_point():
    return CriticalPoint(T_C=VDW_T_C, d_C=VDW_D_C, rho_C=VDW_RHO_C)


def vdw_delta(T):
    """Positive root of Delta = tanh(Delta/(6T)); 0 at or above T = 1/6."""
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    if T >= VDW_T_C:
        return 0.0
    # tanh slope at 0 is 1/(6T) > 1, so the difference is negative at the
    # left end and positive at 1; plain bisection per the pinned scheme
    lo, hi = 1e-12, 1.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if mid - math.tanh(mid / (6.0 * T)) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class VdwCoexistence:
    T: float
    delta: float
    d_g: float
    d_ell: float
    p0: float

    @property
    def rho0(self):
        """Plateau fugacity e^{-1/(3T)}; the chemical potential at
        coexistence is -1/3 independent of temperature."""
        return math.exp(-1.0 / (3.0 * self.T))


def vdw_coexistence(T):
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    if T >= VDW_T_C:
        raise NoCoexistenceError(f"no coexistence at T={T} >= 1/6")
    delta = vdw_delta(T)
    u = 1.0 - delta
    if delta > 0.5:
        # 1 - delta underflows to the bisection tolerance as T -> 0; the
        # equivalent fixed point u = 2 e^{-x}/(1 + e^{-x}), x = (1-u)/(3T),
        # is a strong contraction there and restores full relative
        # precision in u, which the p(d_g) = p(d_ell) identity needs.
        # Below T ~ 0.009 the liquid density 1 - u/2 still rounds to 1.0
        # in doubles; d_g and p0 remain exact.
        for _ in range(60):
            e = math.exp(-(1.0 - u) / (3.0 * T))
            un = 2.0 * e / (1.0 + e)
            if un == u:
                break
            u = un
        delta = 1.0 - u
    d_g = 0.5 * u
    d_ell = 1.0 - 0.5 * u
    return VdwCoexistence(T=T, delta=delta, d_g=d_g, d_ell=d_ell, p0=_raw_p(d_g, T))


def _raw_p(d, T):
    return -T * math.log1p(-d) - d * d / 3.0


def vdw_pressure(d, T):
    """Equation of state -T log(1-d) - d^2/3, with the Maxwell plateau
    substituted between the coexisting densities below T = 1/6.

    The symmetry d_g + d_ell = 1 makes the plateau exact here:
    T log(d_ell/d_g) = Delta/3 is the pressure-equality identity.
    """
    _check_d(d)
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    if T < VDW_T_C:
        rec = vdw_coexistence(T)
        if rec.d_g < d < rec.d_ell:
            return rec.p0
    return _raw_p(d, T)


def vdw_free_energy(d, T):
    """Raw (pre-envelope) mean-field free energy T*A(d) - d^2/3.

    The equilibrium free energy is its convex envelope; below T_C the
    common-tangent region is exactly [d_g, d_ell].
    """
    _check_d(d)
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    return T * (d * math.log(d) + (1.0 - d) * math.log1p(-d)) - d * d / 3.0


def vdw_chemical_potential(d, T):
    _check_d(d)
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    return T * (math.log(d) - math.log1p(-d)) - 2.0 * d / 3.0


def vdw_fugacity(d, T):
    """rho = d/(1-d) * e^{-2d/(3T)}."""
    _check_d(d)
    if not T > 0.0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    return d / (1.0 - d) * math.exp(-2.0 * d / (3.0 * T))


def _log_fugacity_of_v(v, T):
    # v = log(1-d); stable parameterization of the liquid branch
    return math.log1p(-math.exp(v)) - v - 2.0 * (1.0 - math.exp(v)) / (3.0 * T)


def _solve_liquid_v(rho, T, v_hi):
    """Root of log fugacity = log rho in v = log(1-d) on (-inf, v_hi].

    Bisection in v keeps full relative precision in 1-d, which the
    low-temperature liquid branch needs: for example at T = 0.02,
    rho = 0.05 the root has 1-d of order 1e-13.
    """
    target = math.log(rho)
    lo = -700.0
    hi = v_hi
    flo = _log_fugacity_of_v(lo, T) - target
    fhi = _log_fugacity_of_v(hi, T) - target
    if flo < 0.0 or fhi > 0.0:
        raise ParameterError(f"no liquid-branch density for rho={rho}, T={T}")
    # log fugacity is decreasing in v on this segment
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _log_fugacity_of_v(mid, T) - target > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def _solve_gas_d(rho, T, d_hi):
    """Root of fugacity = rho on the monotone gas segment (0, d_hi].

    Solved in s = log d so the relative precision of tiny gas densities
    does not depend on an absolute bracket width.
    """
    from scipy.optimize import brentq

    target = math.log(rho)

    def f(s):
        d = math.exp(s)
        return s - math.log1p(-d) - 2.0 * d / (3.0 * T) - target

    s = brentq(f, -690.0, math.log(d_hi), xtol=1e-13, rtol=8.9e-16)
    return math.exp(s)


def _branch_point(T):
    # extrema of the fugacity in d, where d(1-d) = 3T/2
    s = math.sqrt(1.0 - 6.0 * T)
    return 0.5 * (1.0 - s), 0.5 * (1.0 + s)


def vdw_density(rho, T):
    """Invert the fugacity, selecting the equilibrium branch.

    Up to three densities share one fugacity below T_C; the smallest is
    returned for rho below the plateau fugacity e^{-1/(3T)}, the largest
    above it.  Exactly at the plateau (within 1e-12 relative) the gas
    density d_g is returned and a coexistence warning is emitted, since
    both phases are physical there.
    """
    _check_rho_T(rho, T)
    if T >= VDW_T_C:
        # single branch; split the search at d = 1/2 to use the stable
        # parameterization on the dense side
        if math.log(rho) >= _log_fugacity_of_v(math.log(0.5), T):
            return 1.0 - math.exp(_solve_liquid_v(rho, T, math.log(0.5)))
        return _solve_gas_d(rho, T, 0.5)
    rho0 = math.exp(-1.0 / (3.0 * T))
    if abs(rho - rho0) <= _TIE * rho0:
        warnings.warn(
            f"rho={rho} is the coexistence fugacity at T={T}; "
            "returning the gas density",
            stacklevel=2,
        )
        return vdw_coexistence(T).d_g
    d_lo, d_hi = _branch_point(T)
    if rho < rho0:
        return _solve_gas_d(rho, T, d_lo)
    return 1.0 - math.exp(_solve_liquid_v(rho, T, math.log1p(-d_hi)))


def vdw_lyapunov(rho, T):
    """Mean-field growth rate -log(1-d) - d^2/(3T) on the equilibrium
    branch; p0/T on the coexistence plateau."""
    _check_rho_T(rho, T)
    if T < VDW_T_C:
        rho0 = math.exp(-1.0 / (3.0 * T))
        if abs(rho - rho0) <= _TIE * rho0:
            rec = vdw_coexistence(T)
            return rec.p0 / T
        d_lo, d_hi = _branch_point(T)
        if rho > rho0:
            v = _solve_liquid_v(rho, T, math.log1p(-d_hi))
            d = 1.0 - math.exp(v)
            return -v - d * d / (3.0 * T)
        d = _solve_gas_d(rho, T, d_lo)
        return -math.log1p(-d) - d * d / (3.0 * T)
    if math.log(rho) >= _log_fugacity_of_v(math.log(0.5), T):
        v = _solve_liquid_v(rho, T, math.log(0.5))
        d = 1.0 - math.exp(v)
        return -v - d * d / (3.0 * T)
    d = _solve_gas_d(rho, T, 0.5)
    return -math.log1p(-d) - d * d / (3.0 * T)


def vdw_transition_temperature(rho):
    """T_tr = -1/(3 log rho) for fugacities up to the critical e^{-2}."""
    if not 0.0 < rho <= VDW_RHO_C:
        raise NoTransitionError(
            f"no van der Waals transition for rho={rho}; needs 0 < rho <= e^-2"
        )
    return -1.0 / (3.0 * math.log(rho))
