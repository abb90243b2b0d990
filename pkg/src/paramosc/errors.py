"""Exception and warning types shared across the package."""


class ParamOscError(Exception):
    """Base class for all package-specific errors."""


class NoConvergence(ParamOscError):
    """An iterative solver exhausted its iteration budget."""


class TruncationTooSmall(ParamOscError):
    """The retained Fourier window cannot represent the solution; raise n_max."""


class UnstableSolution(ParamOscError):
    """Operation requires a stable Floquet solution (real Floquet index)."""


class ZeroFrequency(ParamOscError):
    """Bose occupation requested at zero frequency."""


class ResonantTerm(ParamOscError):
    """A quasienergy sideband sits at zero frequency within tolerance."""


class StepFailure(ParamOscError):
    """The ODE integrator could not reach the requested tolerance."""


class TruncationOverflow(ParamOscError):
    """Population leaked into the top levels of a truncated density matrix."""


class DegreeCap(ParamOscError):
    """Requested phase-space polynomial degree exceeds the supported cap."""


class QuadratureBudget(ParamOscError):
    """Adaptive quadrature failed its self-consistency (Richardson) check."""


class ConfigError(ParamOscError):
    """Malformed or inconsistent run configuration."""


class BorderlineStabilityWarning(UserWarning):
    """Floquet index sits on (or next to) a stability borderline."""


class CutoffWarning(UserWarning):
    """Drude cutoff is not large compared to the relevant frequencies."""


class NonPositiveResultWarning(UserWarning):
    """A variance came out non-positive; result kept as diagnostic."""


class QuadratureWarning(UserWarning):
    """Quadrature refinement stopped before reaching the requested tolerance."""
