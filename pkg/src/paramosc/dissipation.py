"""Heat bath description and transport coefficients for the Markov schemes.

Three levels of approximation share this module.  The "simple" scheme takes
the diffusion coefficients of the undriven oscillator; the "improved" scheme
replaces the oscillator frequency with the quasienergy sidebands mu + n Omega
of the zero-damping Floquet solution; the RWA scheme keeps only
quasienergy-conserving terms and is parameterised by an effective bath
occupation N.  The damping coefficient itself is gamma in every scheme.
"""
from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CutoffWarning, ResonantTerm, UnstableSolution, ZeroFrequency
from .floquet import FloquetSolution, PeriodicStiffness, fundamental_solutions

EULER_GAMMA = 0.5772156649015329


def digamma(x: float) -> float:
    """Digamma function for real x > 0.

    Shifts the argument above 10 with psi(x+1) = psi(x) + 1/x, then applies
    the asymptotic series.  Accurate to ~1e-15 relative; psi(1) = -C with C
    the Euler constant.
    """
    if x <= 0.0:
        raise ValueError("digamma implemented for x > 0 only")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = (
        math.log(x)
        - 0.5 / x
        - inv2 * (
            1.0 / 12.0
            - inv2 * (
                1.0 / 120.0
                - inv2 * (
                    1.0 / 252.0
                    - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0))
                )
            )
        )
    )
    return series + acc


def _coth(x: float) -> float:
    """coth with a stable small-argument series and saturated tails."""
    if abs(x) < 1e-4:
        return 1.0 / x + x / 3.0 - x**3 / 45.0
    if abs(x) > 350.0:
        return math.copysign(1.0, x)
    return 1.0 / math.tanh(x)


def _coth_c(z: complex) -> complex:
    if abs(z) < 1e-4:
        return 1.0 / z + z / 3.0 - z**3 / 45.0
    if abs(z.real) > 350.0:
        return complex(math.copysign(1.0, z.real), 0.0)
    return 1.0 / cmath.tanh(z)


@dataclass(frozen=True)
class BathSpec:
    """Ohmic bath with Drude cutoff: I(omega) = m gamma omega / (1 + omega^2/omega_D^2).

    kT is Boltzmann's constant times temperature (an energy); omega_D may be
    math.inf for a strictly Ohmic bath (then the cross diffusion is not
    defined).
    """

    gamma: float
    kT: float
    omega_D: float
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("gamma", "kT", "omega_D", "m", "hbar"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    def check_cutoff(self, frequencies) -> None:
        """Warn when the Drude cutoff fails to dominate the given frequencies."""
        if math.isinf(self.omega_D):
            return
        fmax = float(np.max(np.abs(frequencies)))
        if self.omega_D < 10.0 * fmax:
            warnings.warn(
                f"Drude cutoff {self.omega_D:.3g} is not large compared to the "
                f"relevant frequencies (max {fmax:.3g})",
                CutoffWarning,
                stacklevel=3,
            )


def thermal_occupation(bath: BathSpec, omega: float) -> float:
    """Bose occupation n_th(omega) = 1/(exp(hbar omega / kT) - 1).

    Defined for either sign of omega; n_th(-omega) = -n_th(omega) - 1.
    """
    if omega == 0.0:
        raise ZeroFrequency("thermal occupation undefined at omega = 0")
    x = bath.hbar * omega / bath.kT
    if x > 700.0:
        return 0.0
    if x < -700.0:
        return -1.0
    return 1.0 / math.expm1(x)


def d_pp_simple(bath: BathSpec, omega0: float) -> float:
    """Momentum diffusion of the undriven-spectrum Markov approximation.

    D_pp = (1/2) m hbar omega0 coth(hbar omega0 / 2 kT); reduces to m kT at
    high temperature.
    """
    if omega0 <= 0.0:
        raise ValueError("omega0 must be positive")
    x = 0.5 * bath.hbar * omega0 / bath.kT
    return 0.5 * bath.m * bath.hbar * omega0 * _coth(x)


def d_xp_drude(bath: BathSpec) -> float:
    """Cross diffusion regularised by the Drude cutoff.

    D_xp = -(hbar/pi) [psi(1 + hbar omega_D / 2 pi kT) + C]; it vanishes in
    the high-temperature limit because psi(1) = -C.
    """
    if math.isinf(bath.omega_D):
        raise ValueError("cross diffusion requires a finite Drude cutoff")
    x = bath.hbar * bath.omega_D / (2.0 * math.pi * bath.kT)
    return -(bath.hbar / math.pi) * (digamma(1.0 + x) + EULER_GAMMA)


def _require_zero_damping(sol0: FloquetSolution):
    if abs(sol0.gamma) > 1e-15:
        raise ValueError("this coefficient is built from the zero-damping solution")


def _relevant_frequencies(sol0: FloquetSolution, rel_cut: float = 1e-8) -> np.ndarray:
    c = np.abs(np.asarray(sol0.coeffs))
    keep = c > rel_cut * c.max()
    return np.abs(sol0.mode_frequencies()[keep])


def d_pp_improved(sol0: FloquetSolution, bath: BathSpec, *, allow_unstable: bool = False) -> float:
    """Period-averaged momentum diffusion of the quasienergy-spectrum scheme.

    D_pp = (1/2) m hbar sum_n [c_n (mu + n Omega)]^2 coth(hbar (mu + n Omega) / 2 kT).
    Sidebands at negative frequency contribute positively (odd times odd).
    With ``allow_unstable`` the sum is continued analytically through unstable
    zones (complex mu), where it stays real and interpolates smoothly.
    """
    _require_zero_damping(sol0)
    if not sol0.stable and not allow_unstable:
        raise UnstableSolution("improved diffusion needs a stable solution")
    if sol0.stable:
        bath.check_cutoff(np.append(_relevant_frequencies(sol0), sol0.Omega))
    pref = 0.5 * bath.m * bath.hbar
    scale = 0.5 * bath.hbar / bath.kT
    total = 0.0 + 0.0j
    for c, w in zip(np.asarray(sol0.coeffs, dtype=complex), sol0.mode_frequencies()):
        if c == 0.0:
            continue
        total += (c * w) ** 2 * _coth_c(scale * w)
    val = pref * total
    return float(val.real)


def effective_occupation(sol0: FloquetSolution, bath: BathSpec) -> float:
    """Effective bath occupation N = sum_k c_k^2 (mu + k Omega) n_th(mu + k Omega).

    Reduces to n_th(omega0) without driving and is non-negative for any
    stable solution.
    """
    _require_zero_damping(sol0)
    if not sol0.stable:
        raise UnstableSolution("effective occupation needs a stable solution")
    bath.check_cutoff(np.append(_relevant_frequencies(sol0), sol0.Omega))
    coeffs = np.asarray(sol0.coeffs, dtype=float)
    freqs = np.real(sol0.mode_frequencies())
    cmax = np.abs(coeffs).max()
    total = 0.0
    for c, w in zip(coeffs, freqs):
        if abs(c) <= 1e-14 * cmax:
            continue
        if abs(w) < 1e-12 * sol0.Omega:
            raise ResonantTerm(f"sideband at {w:.3e} sits at zero frequency")
        total += c * c * w * thermal_occupation(bath, w)
    return total


def rwa_coefficients(sol0: FloquetSolution, bath: BathSpec, n_occupation: float, t):
    """Time-periodic RWA diffusion coefficients (D_xx, D_xp, D_pp) at time t.

    All three are real, T-periodic combinations of the zero-damping
    fundamental solutions, each proportional to N + 1/2.
    """
    _require_zero_damping(sol0)
    if not sol0.stable:
        raise UnstableSolution("RWA coefficients need a stable solution")
    fs = fundamental_solutions(sol0, t)
    w = n_occupation + 0.5
    d_xx = bath.hbar * np.real(fs.xi1 * fs.xi2) * w / bath.m
    d_xp = bath.hbar * np.real(fs.dxi1 * fs.xi2 + fs.xi1 * fs.dxi2) * w
    d_pp = bath.m * bath.hbar * np.real(fs.dxi1 * fs.dxi2) * w
    return d_xx, d_xp, d_pp


class Scheme(enum.Enum):
    SIMPLE = "simple"
    IMPROVED_AVERAGED = "improved"
    RWA = "rwa"


@dataclass(frozen=True)
class DiffusionSet:
    """Scheme-tagged transport coefficients.

    For the two non-RWA schemes ``d_pp`` and ``d_xp`` are the constants that
    enter the Fokker-Planck operator.  For the RWA scheme they hold the
    period averages, ``n_occupation`` the effective bath occupation, and the
    ``d_xx_t``/``d_xp_t``/``d_pp_t`` methods the time-resolved coefficients.
    """

    scheme: Scheme
    d_pp: float
    d_xp: float
    bath: BathSpec
    n_occupation: float | None = None
    sol0: FloquetSolution | None = None

    def __post_init__(self):
        if self.bath.kT > 0.0 and self.d_pp <= 0.0:
            raise ValueError("d_pp must be positive at finite temperature")
        if self.scheme is Scheme.RWA:
            if self.n_occupation is None or self.sol0 is None:
                raise ValueError("RWA set needs n_occupation and the gamma=0 solution")
            if self.n_occupation < 0.0:
                raise ValueError("n_occupation must be non-negative")

    def _rwa(self, t, index):
        if self.scheme is not Scheme.RWA:
            raise ValueError("time-resolved coefficients exist only for the RWA scheme")
        return rwa_coefficients(self.sol0, self.bath, self.n_occupation, t)[index]

    def d_xx_t(self, t):
        return self._rwa(t, 0)

    def d_xp_t(self, t):
        return self._rwa(t, 1)

    def d_pp_t(self, t):
        return self._rwa(t, 2)


def simple_diffusion(bath: BathSpec, stiffness: PeriodicStiffness) -> DiffusionSet:
    """Diffusion constants of the driving-blind scheme for the given stiffness."""
    a0, _ = stiffness.harmonics()
    if a0 <= 0.0:
        raise ValueError("undriven reference frequency requires omega0_sq > 0")
    omega0 = math.sqrt(a0)
    return DiffusionSet(
        scheme=Scheme.SIMPLE,
        d_pp=d_pp_simple(bath, omega0),
        d_xp=d_xp_drude(bath),
        bath=bath,
    )


def improved_diffusion(sol0: FloquetSolution, bath: BathSpec) -> DiffusionSet:
    """Period-averaged diffusion constants of the quasienergy-spectrum scheme."""
    return DiffusionSet(
        scheme=Scheme.IMPROVED_AVERAGED,
        d_pp=d_pp_improved(sol0, bath),
        d_xp=d_xp_drude(bath),
        bath=bath,
        sol0=sol0,
    )


def rwa_diffusion(sol0: FloquetSolution, bath: BathSpec) -> DiffusionSet:
    """RWA diffusion set; scalars hold the period averages of D_pp(t), D_xp(t)."""
    n_occ = effective_occupation(sol0, bath)
    coeffs = np.asarray(sol0.coeffs, dtype=float)
    freqs = np.real(sol0.mode_frequencies())
    b_avg = float(np.sum(coeffs**2 * freqs**2))  # period average of xi1' xi2'
    return DiffusionSet(
        scheme=Scheme.RWA,
        d_pp=bath.m * bath.hbar * b_avg * (n_occ + 0.5),
        d_xp=0.0,
        bath=bath,
        n_occupation=n_occ,
        sol0=sol0,
    )


# ---------------------------------------------------------------------------
# quadrature route for the time-resolved improved coefficients
# ---------------------------------------------------------------------------

def _principal_value_j(a: float, bath: BathSpec, quad_limit: int = 400) -> float:
    """J(a) = PV int_0^inf w coth(hbar w/2kT) reg(w) / (w^2 - a^2) dw.

    reg is the Drude factor omega_D^2 / (w^2 + omega_D^2).  Evaluated with a
    Cauchy-weighted panel around the pole plus regular panels and an
    analytic high-frequency tail.
    """
    from scipy.integrate import quad

    a = abs(a)
    hb2kt = 0.5 * bath.hbar / bath.kT
    wd2 = bath.omega_D**2

    def base(w):
        return w * _coth(hb2kt * w) * wd2 / (w * w + wd2)

    if a == 0.0:
        raise ValueError("principal value needs a nonzero sideband frequency")
    upper = 60.0 * max(a, bath.omega_D)
    # pole region [a/2, 3a/2] with explicit Cauchy weight
    pole, _ = quad(
        lambda w: base(w) / (w + a), 0.5 * a, 1.5 * a,
        weight="cauchy", wvar=a, limit=quad_limit,
    )
    low, _ = quad(lambda w: base(w) / (w * w - a * a), 0.0, 0.5 * a, limit=quad_limit)
    mid, _ = quad(
        lambda w: base(w) / (w * w - a * a), 1.5 * a, upper,
        limit=quad_limit, points=[bath.omega_D] if 1.5 * a < bath.omega_D < upper else None,
    )
    tail = wd2 / (2.0 * upper**2)  # integrand ~ omega_D^2 / w^3 beyond the box
    return pole + low + mid + tail


def improved_coefficients_quadrature(sol0: FloquetSolution, bath: BathSpec, t: float):
    """Time-resolved (D_pp(t), D_xp(t)) of the quasienergy-spectrum scheme.

    The sideband delta contributions are analytic; the principal-value parts
    are evaluated by Drude-regularised quadrature.  Averaged over one period
    the results reduce to d_pp_improved and (up to the level shifts the
    closed form neglects) to d_xp_drude.
    """
    _require_zero_damping(sol0)
    if not sol0.stable:
        raise UnstableSolution("quadrature coefficients need a stable solution")
    coeffs = np.asarray(sol0.coeffs, dtype=float)
    freqs = np.real(sol0.mode_frequencies())
    n_idx = np.arange(-sol0.n_max, sol0.n_max + 1)
    cmax = np.abs(coeffs).max()
    keep = np.abs(coeffs) > 1e-10 * cmax
    coeffs = coeffs[keep]
    freqs = freqs[keep]
    n_idx = n_idx[keep]

    hb2kt = 0.5 * bath.hbar / bath.kT
    j_cache = {}
    for w in freqs:
        key = round(abs(w), 14)
        if key not in j_cache:
            j_cache[key] = _principal_value_j(w, bath)

    d_pp = 0.0
    d_xp = 0.0
    for cn, an, n in zip(coeffs, freqs, n_idx):
        coth_n = an * _coth(hb2kt * an)  # = |a_n| coth(hbar |a_n| / 2 kT)
        j_n = j_cache[round(abs(an), 14)]
        for cm, am, m in zip(coeffs, freqs, n_idx):
            phase = (n - m) * sol0.Omega * t
            cos_p = math.cos(phase)
            sin_p = math.sin(phase)
            d_pp += 0.5 * bath.m * bath.hbar * cn * cm * am * coth_n * cos_p
            d_pp -= (bath.m * bath.hbar / math.pi) * cn * cm * am * an * j_n * sin_p
            d_xp -= 0.5 * bath.hbar * cn * cm * coth_n * sin_p
            d_xp -= (bath.hbar / math.pi) * cn * cm * an * j_n * cos_p
    return d_pp, d_xp
