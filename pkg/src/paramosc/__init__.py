"""Markovian quantum dynamics of the parametrically driven, damped oscillator.

The package bundles the classical Floquet machinery for periodic stiffness
(continued-fraction solver, Green function, stability charts), the transport
coefficients of three Markovian master-equation schemes (driving-blind,
quasienergy-averaged, and RWA), Gaussian moment propagation with asymptotic
covariances and Wigner-function Floquet eigenstates, and a quasi-exact
quantum-Langevin reference for scoring the approximations.
"""

__version__ = "0.1.0"

from .dissipation import (
    BathSpec,
    DiffusionSet,
    Scheme,
    d_pp_improved,
    d_pp_simple,
    d_xp_drude,
    digamma,
    effective_occupation,
    improved_coefficients_quadrature,
    improved_diffusion,
    rwa_coefficients,
    rwa_diffusion,
    simple_diffusion,
    thermal_occupation,
)
from .errors import (
    BorderlineStabilityWarning,
    ConfigError,
    CutoffWarning,
    DegreeCap,
    NoConvergence,
    NonPositiveResultWarning,
    ParamOscError,
    QuadratureBudget,
    QuadratureWarning,
    ResonantTerm,
    StepFailure,
    TruncationOverflow,
    TruncationTooSmall,
    UnstableSolution,
    ZeroFrequency,
)
from .evolution import (
    CovarianceState,
    FloquetDensityMatrix,
    MeanTrajectory,
    WignerFloquetState,
    asymptotic_covariance,
    conservative_covariance,
    effective_force,
    mean_response_with_force,
    propagate_moments,
    rwa_asymptotic_covariance,
    rwa_density_propagate,
    wigner_floquet_state,
)
from .floquet import (
    FloquetSolution,
    FundamentalSolutions,
    GeneralCosine,
    GreenFunctionValues,
    Mathieu,
    PeriodicStiffness,
    StabilityPoint,
    classical_trajectory,
    fundamental_solutions,
    green_function,
    solve_floquet,
    stability_chart,
)
from .oracle import NoiseKernel, exact_variances, suggested_cutoff

__all__ = [
    "BathSpec",
    "BorderlineStabilityWarning",
    "ConfigError",
    "CovarianceState",
    "CutoffWarning",
    "DegreeCap",
    "DiffusionSet",
    "FloquetDensityMatrix",
    "FloquetSolution",
    "FundamentalSolutions",
    "GeneralCosine",
    "GreenFunctionValues",
    "Mathieu",
    "MeanTrajectory",
    "NoConvergence",
    "NoiseKernel",
    "NonPositiveResultWarning",
    "ParamOscError",
    "PeriodicStiffness",
    "QuadratureBudget",
    "QuadratureWarning",
    "ResonantTerm",
    "Scheme",
    "StabilityPoint",
    "StepFailure",
    "TruncationOverflow",
    "TruncationTooSmall",
    "UnstableSolution",
    "WignerFloquetState",
    "ZeroFrequency",
    "asymptotic_covariance",
    "classical_trajectory",
    "conservative_covariance",
    "d_pp_improved",
    "d_pp_simple",
    "d_xp_drude",
    "digamma",
    "effective_force",
    "effective_occupation",
    "exact_variances",
    "fundamental_solutions",
    "green_function",
    "improved_coefficients_quadrature",
    "improved_diffusion",
    "mean_response_with_force",
    "propagate_moments",
    "rwa_asymptotic_covariance",
    "rwa_coefficients",
    "rwa_density_propagate",
    "rwa_diffusion",
    "simple_diffusion",
    "solve_floquet",
    "stability_chart",
    "suggested_cutoff",
    "thermal_occupation",
    "wigner_floquet_state",
]
