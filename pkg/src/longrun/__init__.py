"""Long-run growth rates of Brownian-driven multiplicative processes.

Three mutually validating routes: exact finite-n lattice-gas partition
functions, the exact thermodynamic-limit equation of state, and a
closed-form van der Waals approximation; plus the continuous-time limit.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (
    ConvergenceError,
    NoCoexistenceError,
    NoTransitionError,
    ParameterError,
    SizeLimitError,
)
from .process import (
    McMeanResult,
    ModelParams,
    PathRealization,
    mc_mean,
    multiplier_covariance,
    sample_path,
)
from .lattice import (
    LatticeSpec,
    SpectrumDescriptor,
    brute_mean,
    exact_mean,
    finite_isotherm,
    finite_lyapunov,
    finite_lyapunov_at,
    grand_partition_log,
    grand_partition_mean,
    spectrum_descriptor,
    verify_spectrum,
)
from .thermo import (
    CoexistenceRecord,
    CriticalPoint,
    ThermoPoint,
    chemical_potential,
    coexistence_curve,
    convex_envelope,
    critical_point,
    free_energy,
    fugacity,
    gibbs,
    isotherm,
    lyapunov,
    maxwell,
    pressure,
    solve_pi,
    thermo_point,
    transition_temperature,
)
from .vdw import (
    VdwCoexistence,
    vdw_coexistence,
    vdw_critical_point,
    vdw_density,
    vdw_free_energy,
    vdw_fugacity,
    vdw_lyapunov,
    vdw_pressure,
    vdw_transition_temperature,
)
from .continuum import (
    ContinuumParams,
    ks_distance,
    ks_two_sample,
    simulate_growth,
    simulate_integral_gbm,
    simulate_linear_sde,
    stationary_cdf_A,
    stationary_cdf_y,
    stationary_density_A,
    stationary_density_y,
)

__all__ = [
    "BACKEND",
    "__version__",
    "ConvergenceError",
    "NoCoexistenceError",
    "NoTransitionError",
    "ParameterError",
    "SizeLimitError",
    "McMeanResult",
    "ModelParams",
    "PathRealization",
    "mc_mean",
    "multiplier_covariance",
    "sample_path",
    "LatticeSpec",
    "SpectrumDescriptor",
    "brute_mean",
    "exact_mean",
    "finite_isotherm",
    "finite_lyapunov",
    "finite_lyapunov_at",
    "grand_partition_log",
    "grand_partition_mean",
    "spectrum_descriptor",
    "verify_spectrum",
    "CoexistenceRecord",
    "CriticalPoint",
    "ThermoPoint",
    "chemical_potential",
    "coexistence_curve",
    "convex_envelope",
    "critical_point",
    "free_energy",
    "fugacity",
    "gibbs",
    "isotherm",
    "lyapunov",
    "maxwell",
    "pressure",
    "solve_pi",
    "thermo_point",
    "transition_temperature",
    "VdwCoexistence",
    "vdw_coexistence",
    "vdw_critical_point",
    "vdw_density",
    "vdw_free_energy",
    "vdw_fugacity",
    "vdw_lyapunov",
    "vdw_pressure",
    "vdw_transition_temperature",
    "ContinuumParams",
    "ks_distance",
    "ks_two_sample",
    "simulate_growth",
    "simulate_integral_gbm",
    "simulate_linear_sde",
    "stationary_cdf_A",
    "stationary_cdf_y",
    "stationary_density_A",
    "stationary_density_y",
]
