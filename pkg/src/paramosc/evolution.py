"""Gaussian-state and density-matrix propagation for the Markov schemes.

The Wigner function of every scheme obeys a Fokker-Planck equation with
time-periodic coefficients, so first and second moments close on themselves.
This module integrates those moment equations, evaluates the asymptotic
(time-periodic) covariances by quadrature over the classical Green function,
constructs the phase-space eigenfunctions of the one-period propagator, and
handles an additive driving force.

Drift conventions (d/dt of the central covariances), with k(t) = m * stiffness:

  non-RWA:  sxx' = 2 sxp / m
            sxp' = spp / m - gamma sxp - k sxx + gamma D_xp
            spp' = -2 gamma spp - 2 k sxp + 2 gamma D_pp

  RWA:      sxx' = 2 sxp / m - gamma sxx + gamma D_xx(t)
            sxp' = spp / m - k sxx - gamma sxp + gamma D_xp(t) / 2
            spp' = -2 k sxp - gamma spp + gamma D_pp(t)

The asymptotic covariance of the non-RWA flow is reproduced exactly by the
Green-function quadrature when the combination D = D_pp + m gamma D_xp is
used under the integrals (spp keeps its constant -m gamma D_xp shift); with
``effective_d=False`` the plain D_pp form is used instead, which differs by
a correction of relative order gamma.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp

from .dissipation import BathSpec, DiffusionSet, Scheme
from .errors import (
    DegreeCap,
    NonPositiveResultWarning,
    QuadratureWarning,
    StepFailure,
    TruncationOverflow,
    UnstableSolution,
)
from .floquet import (
    FloquetSolution,
    classical_trajectory,
    fundamental_solutions,
    green_function,
)

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = leggauss(order)
    return _GL_CACHE[order]


def _panel_nodes(a: float, b: float, n_panels: int, order: int):
    x, w = _gl(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class CovarianceState:
    """First moments and symmetric covariance of a Gaussian phase-space state."""

    t: float
    mean_x: float
    mean_p: float
    sigma_xx: float
    sigma_xp: float
    sigma_pp: float

    def det(self) -> float:
        return self.sigma_xx * self.sigma_pp - self.sigma_xp**2

    def uncertainty_ok(self, hbar: float) -> bool:
        """Heisenberg check det sigma >= hbar^2/4; advisory, not enforced."""
        return self.det() >= 0.25 * hbar * hbar * (1.0 - 1e-12)


def _covariance_matrix(state: CovarianceState) -> np.ndarray:
    return np.array(
        [[state.sigma_xx, state.sigma_xp], [state.sigma_xp, state.sigma_pp]]
    )


# ---------------------------------------------------------------------------
# moment propagation
# ---------------------------------------------------------------------------

def propagate_moments(
    sol: FloquetSolution,
    diff: DiffusionSet,
    state0: CovarianceState,
    t1: float,
    tol: float = 1e-9,
    *,
    t_eval: Sequence[float] | None = None,
    force: Callable[[float], float] | None = None,
) -> list[CovarianceState]:
    """Integrate the closed first/second-moment system from state0.t to t1.

    Means and covariances are propagated by two separate adaptive
    Runge-Kutta integrations: the covariance flow never sees the additive
    force, and the means never see the diffusion constants.

    Returns the trajectory sampled at ``t_eval`` (default: 201 uniform
    points).  Raises StepFailure if the integrator gives up.
    """
    stiff = sol.stiffness
    bath = diff.bath
    m = bath.m
    gamma = bath.gamma
    t0 = state0.t
    if t_eval is None:
        t_eval = np.linspace(t0, t1, 201)
    t_eval = np.asarray(t_eval, dtype=float)

    if diff.scheme is Scheme.RWA:
        sol0 = diff.sol0

        def mean_rhs(t, y):
            k = m * stiff.value(t)
            f = force(t) if force is not None else 0.0
            return [y[1] / m - 0.5 * gamma * y[0], -k * y[0] - 0.5 * gamma * y[1] + f]

        def cov_rhs(t, y):
            k = m * stiff.value(t)
            fs = fundamental_solutions(sol0, t)
            w = diff.n_occupation + 0.5
            dxx = bath.hbar * (fs.xi1 * fs.xi2).real * w / m
            dxp = bath.hbar * (fs.dxi1 * fs.xi2 + fs.xi1 * fs.dxi2).real * w
            dpp = m * bath.hbar * (fs.dxi1 * fs.dxi2).real * w
            sxx, sxp, spp = y
            return [
                2.0 * sxp / m - gamma * sxx + gamma * dxx,
                spp / m - k * sxx - gamma * sxp + 0.5 * gamma * dxp,
                -2.0 * k * sxp - gamma * spp + gamma * dpp,
            ]
    else:
        d_pp = diff.d_pp
        d_xp = diff.d_xp

        def mean_rhs(t, y):
            k = m * stiff.value(t)
            f = force(t) if force is not None else 0.0
            return [y[1] / m, -gamma * y[1] - k * y[0] + f]

        def cov_rhs(t, y):
            k = m * stiff.value(t)
            sxx, sxp, spp = y
            return [
                2.0 * sxp / m,
                spp / m - gamma * sxp - k * sxx + gamma * d_xp,
                -2.0 * gamma * spp - 2.0 * k * sxp + 2.0 * gamma * d_pp,
            ]

    opts = dict(method="DOP853", rtol=tol, atol=1e-4 * tol, dense_output=False)
    r_mean = solve_ivp(mean_rhs, (t0, t1), [state0.mean_x, state0.mean_p], t_eval=t_eval, **opts)
    if not r_mean.success:
        raise StepFailure(f"mean propagation failed: {r_mean.message}")
    r_cov = solve_ivp(
        cov_rhs, (t0, t1),
        [state0.sigma_xx, state0.sigma_xp, state0.sigma_pp],
        t_eval=t_eval, **opts,
    )
    if not r_cov.success:
        raise StepFailure(f"covariance propagation failed: {r_cov.message}")

    out = []
    for i, t in enumerate(t_eval):
        out.append(
            CovarianceState(
                t=float(t),
                mean_x=float(r_mean.y[0, i]),
                mean_p=float(r_mean.y[1, i]),
                sigma_xx=float(r_cov.y[0, i]),
                sigma_xp=float(r_cov.y[1, i]),
                sigma_pp=float(r_cov.y[2, i]),
            )
        )
    return out


# ---------------------------------------------------------------------------
# asymptotic covariances
# ---------------------------------------------------------------------------

def asymptotic_covariance(
    sol: FloquetSolution,
    diff: DiffusionSet,
    t: float,
    t0: float | None = None,
    tol: float = 1e-9,
    *,
    effective_d: bool = True,
    order: int | None = None,
) -> CovarianceState:
    """Covariance of the asymptotic (time-periodic) Wigner-function solution.

    Evaluates the Green-function quadratures

        sxx = (2 gamma D / m^2) int G(t,t')^2 dt'
        sxp = (2 gamma D / m)   int G(t,t') dG/dt dt'
        spp = -m gamma D_xp + 2 gamma D int (dG/dt)^2 dt'

    from t0 (default -infinity) to t, with D = D_pp + m gamma D_xp when
    ``effective_d`` is set (then the result solves the moment equations
    exactly) and D = D_pp otherwise.  The infinite lower limit is truncated
    where the integrand envelope exp(-gamma (t - t')) falls below
    min(tol, 1e-12).

    The Gauss order per driving period is refined adaptively unless a fixed
    ``order`` is given; a fixed order makes the (tiny) quadrature error a
    smooth function of t, which matters when the result is differenced.
    """
    if diff.scheme is Scheme.RWA:
        raise ValueError("use rwa_asymptotic_covariance for the RWA scheme")
    if not sol.stable:
        raise UnstableSolution("asymptotic covariance requires a stable solution")
    bath = diff.bath
    gamma = bath.gamma
    if gamma <= 0.0:
        raise ValueError("asymptotic covariance needs gamma > 0")
    if abs(sol.gamma - gamma) > 1e-12 * max(1.0, gamma):
        raise ValueError("sol was computed with a different damping than the bath")
    m = bath.m
    d_eff = diff.d_pp + (m * gamma * diff.d_xp if effective_d else 0.0)

    cut = min(tol, 1e-12)
    span = -math.log(cut) / gamma
    if t0 is not None and not math.isinf(t0):
        span = min(span, t - t0)
        if span <= 0.0:
            return CovarianceState(t, 0.0, 0.0, 0.0, 0.0, -m * gamma * diff.d_xp)
    T = sol.period
    n_panels = max(1, int(math.ceil(span / T)))

    def _integrals(gauss_order):
        s_nodes, s_w = _panel_nodes(0.0, span, n_panels, gauss_order)
        gv = green_function(sol, t, t - s_nodes)
        return (
            float(np.dot(s_w, gv.g**2)),
            float(np.dot(s_w, gv.g * gv.dg_dt)),
            float(np.dot(s_w, gv.dg_dt**2)),
        )

    if order is not None:
        cur = _integrals(order)
    else:
        prev = None
        for gauss_order in (32, 64, 128, 256):
            cur = _integrals(gauss_order)
            if prev is not None:
                scale = max(abs(v) for v in cur) + 1e-300
                if max(abs(a - b) for a, b in zip(cur, prev)) < tol * scale:
                    break
            prev = cur
        else:
            warnings.warn(
                "asymptotic covariance quadrature did not reach the requested tolerance",
                QuadratureWarning,
                stacklevel=2,
            )

    sxx = 2.0 * gamma * d_eff / m**2 * cur[0]
    sxp = 2.0 * gamma * d_eff / m * cur[1]
    spp = -m * gamma * diff.d_xp + 2.0 * gamma * d_eff * cur[2]
    if sxx <= 0.0 or spp <= 0.0:
        warnings.warn(
            "non-positive asymptotic variance", NonPositiveResultWarning, stacklevel=2
        )
    return CovarianceState(t, 0.0, 0.0, sxx, sxp, spp)


def rwa_asymptotic_covariance(
    sol0: FloquetSolution, bath: BathSpec, n_occupation: float, t
) -> CovarianceState:
    """Stationary-in-the-Floquet-sense Gaussian of the RWA master equation.

    sxx = (hbar/m)(N+1/2) xi1 xi2, spp = hbar m (N+1/2) xi1' xi2', and the
    symmetrised cross term; det sigma = hbar^2 (N+1/2)^2 at every t.
    """
    if not sol0.stable:
        raise UnstableSolution("RWA covariance requires a stable solution")
    fs = fundamental_solutions(sol0, t)
    w = n_occupation + 0.5
    sxx = bath.hbar / bath.m * w * float((fs.xi1 * fs.xi2).real)
    sxp = bath.hbar * w * 0.5 * float((fs.dxi1 * fs.xi2 + fs.xi1 * fs.dxi2).real)
    spp = bath.hbar * bath.m * w * float((fs.dxi1 * fs.dxi2).real)
    return CovarianceState(float(t), 0.0, 0.0, sxx, sxp, spp)


def conservative_covariance(
    sol0: FloquetSolution, d_pp: float, m: float, t
) -> CovarianceState:
    """Zero-damping limit of the non-RWA asymptotic covariance.

    sigma = A D_pp / m^2 * (xi products) with A = sum c_n^2; its determinant
    is (A D_pp / m)^2 independent of time.
    """
    if not sol0.stable:
        raise UnstableSolution("conservative covariance requires a stable solution")
    fs = fundamental_solutions(sol0, t)
    A = sol0.coefficient_weight()
    sxx = A * d_pp / m**2 * float((fs.xi1 * fs.xi2).real)
    sxp = A * d_pp / (2.0 * m) * float((fs.dxi1 * fs.xi2 + fs.xi1 * fs.dxi2).real)
    spp = A * d_pp * float((fs.dxi1 * fs.dxi2).real)
    return CovarianceState(float(t), 0.0, 0.0, sxx, sxp, spp)


# ---------------------------------------------------------------------------
# RWA density-matrix propagation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FloquetDensityMatrix:
    """Density matrix in the basis of Floquet states, rho[alpha, beta]."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("rho must be a square matrix")
        object.__setattr__(self, "rho", rho)

    @property
    def a_max(self) -> int:
        return self.rho.shape[0] - 1

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho))

    def mean_level(self) -> float:
        pops = self.populations()
        return float(np.sum(np.arange(len(pops)) * pops) / np.sum(pops))

    @staticmethod
    def thermal(n_occupation: float, a_max: int) -> "FloquetDensityMatrix":
        """Geometric (thermal) diagonal state with mean level n_occupation."""
        alpha = np.arange(a_max + 1)
        p = (n_occupation / (n_occupation + 1.0)) ** alpha / (n_occupation + 1.0)
        return FloquetDensityMatrix(np.diag(p.astype(complex)))

    @staticmethod
    def level(alpha: int, a_max: int) -> "FloquetDensityMatrix":
        rho = np.zeros((a_max + 1, a_max + 1), dtype=complex)
        rho[alpha, alpha] = 1.0
        return FloquetDensityMatrix(rho)


def rwa_density_propagate(
    rho0: FloquetDensityMatrix,
    n_occupation: float,
    gamma: float,
    t1: float,
    dt: float,
) -> FloquetDensityMatrix:
    """Propagate the RWA master equation for a duration t1 with RK4 steps.

    rho' = (gamma/2) { (N+1)(2 a rho a+ - n rho - rho n)
                     + N (2 a+ rho a - (n+1) rho - rho (n+1)) }

    with a the lowering operator on Floquet states.  The trace is conserved
    identically; TruncationOverflow is raised as soon as the top two levels
    hold more than 1e-8 population.
    """
    dim = rho0.a_max + 1
    alpha = np.arange(dim)
    low = np.diag(np.sqrt(alpha[1:]), k=1)  # lowering operator
    n_op = np.diag(alpha.astype(float))
    N = n_occupation

    def rhs(r):
        term_down = 2.0 * low @ r @ low.T - n_op @ r - r @ n_op
        term_up = 2.0 * low.T @ r @ low - (n_op + np.eye(dim)) @ r - r @ (n_op + np.eye(dim))
        return 0.5 * gamma * ((N + 1.0) * term_down + N * term_up)

    steps = max(1, int(math.ceil(t1 / dt)))
    h = t1 / steps
    r = rho0.rho.copy()
    for _ in range(steps):
        k1 = rhs(r)
        k2 = rhs(r + 0.5 * h * k1)
        k3 = rhs(r + 0.5 * h * k2)
        k4 = rhs(r + h * k3)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        top = float(np.real(r[-1, -1] + r[-2, -2]))
        if top > 1e-8:
            raise TruncationOverflow(
                f"top-level population {top:.2e} exceeds 1e-8; raise a_max"
            )
    return FloquetDensityMatrix(r)


# ---------------------------------------------------------------------------
# Wigner-Floquet states
# ---------------------------------------------------------------------------

def _poly_diff(c: np.ndarray, axis: int) -> np.ndarray:
    """d/dx (axis 0) or d/dp (axis 1) of a coefficient table c[j,k] ~ x^j p^k."""
    d = np.zeros_like(c)
    if axis == 0:
        j = np.arange(1, c.shape[0])
        d[: c.shape[0] - 1, :] = c[1:, :] * j[:, None]
    else:
        k = np.arange(1, c.shape[1])
        d[:, : c.shape[1] - 1] = c[:, 1:] * k[None, :]
    return d


def _poly_shift(c: np.ndarray, axis: int) -> np.ndarray:
    """Multiply the table by x (axis 0) or p (axis 1), growing it by one row/col."""
    if axis == 0:
        out = np.zeros((c.shape[0] + 1, c.shape[1]), dtype=c.dtype)
        out[1:, :] = c
    else:
        out = np.zeros((c.shape[0], c.shape[1] + 1), dtype=c.dtype)
        out[:, 1:] = c
    return out


def _poly_pad(c: np.ndarray, shape) -> np.ndarray:
    out = np.zeros(shape, dtype=c.dtype)
    out[: c.shape[0], : c.shape[1]] = c
    return out


def _apply_ladder(poly: np.ndarray, f: complex, fdot: complex, m: float, inv: np.ndarray):
    """Apply f d/dx + m fdot d/dp to poly(x,p) * exp(-v Sigma^-1 v / 2)."""
    A, B, C = inv[0, 0], inv[0, 1], inv[1, 1]
    shape = (poly.shape[0] + 1, poly.shape[1] + 1)
    term = _poly_pad(f * _poly_diff(poly, 0) + m * fdot * _poly_diff(poly, 1), shape)
    # gradient of the Gaussian exponent contributes -(A x + B p) and -(B x + C p)
    term -= f * (A * _poly_shift(_poly_pad(poly, (shape[0] - 1, shape[1])), 0)
                 + B * _poly_shift(_poly_pad(poly, (shape[0], shape[1] - 1)), 1))
    term -= m * fdot * (B * _poly_shift(_poly_pad(poly, (shape[0] - 1, shape[1])), 0)
                        + C * _poly_shift(_poly_pad(poly, (shape[0], shape[1] - 1)), 1))
    return term


@dataclass(frozen=True)
class WignerFloquetState:
    """Eigenfunction W_{n n'} of the one-period Wigner-function propagator.

    The state is Q1^n Q2^n' applied to the asymptotic Gaussian, with
    Q_i = f_i d/dx + m f_i' d/dp built from the damped fundamental solutions.
    Its Floquet exponent is n(-gamma/2 + i mu) + n'(-gamma/2 - i mu),
    independent of the diffusion constants.  ``gaussian`` and ``poly`` are
    the t = 0 snapshot; use the methods for other times.
    """

    n: int
    n_prime: int
    quasi_eigenvalue: complex
    gaussian: CovarianceState
    poly: np.ndarray
    solution: FloquetSolution
    diffusion: DiffusionSet
    quad_tol: float

    def covariance_at(self, t: float) -> CovarianceState:
        # fixed Gauss order keeps the quadrature error smooth in t, so the
        # state can be differenced in time without amplifying node noise
        return asymptotic_covariance(
            self.solution, self.diffusion, t, tol=self.quad_tol, order=192
        )

    def poly_at(self, t: float) -> np.ndarray:
        cov = self.covariance_at(t)
        return _build_poly(self.solution, cov, self.n, self.n_prime, self.diffusion.bath.m, t)

    def evaluate(self, x, p, t: float):
        """W_{n n'}(x, p, t); x and p broadcast."""
        cov = self.covariance_at(t)
        poly = _build_poly(self.solution, cov, self.n, self.n_prime, self.diffusion.bath.m, t)
        return _eval_poly_gauss(poly, cov, x, p)

    def periodic_part(self, x, p, t: float):
        """u(x,p,t) = exp(-quasi_eigenvalue t) W(x,p,t), T-periodic in t."""
        return np.exp(-self.quasi_eigenvalue * t) * self.evaluate(x, p, t)


def _build_poly(sol, cov, n, n_prime, m, t):
    sig = _covariance_matrix(cov)
    inv = np.linalg.inv(sig)
    fs = fundamental_solutions(sol, t)
    poly = np.array([[1.0 + 0.0j]])
    for _ in range(n):
        poly = _apply_ladder(poly, complex(fs.f1), complex(fs.df1), m, inv)
    for _ in range(n_prime):
        poly = _apply_ladder(poly, complex(fs.f2), complex(fs.df2), m, inv)
    return poly


def _eval_poly_gauss(poly, cov, x, p):
    sig = _covariance_matrix(cov)
    inv = np.linalg.inv(sig)
    det = np.linalg.det(sig)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    quad = inv[0, 0] * x**2 + 2.0 * inv[0, 1] * x * p + inv[1, 1] * p**2
    gauss = np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))
    return np.polynomial.polynomial.polyval2d(x, p, poly) * gauss


def wigner_floquet_state(
    sol: FloquetSolution,
    diff: DiffusionSet,
    n: int,
    n_prime: int,
    *,
    quad_tol: float = 1e-11,
) -> WignerFloquetState:
    """Construct the Wigner-Floquet eigenfunction W_{n n'}.

    Only the non-RWA schemes carry the ladder construction; the polynomial
    degree n + n' is capped at 8.
    """
    if diff.scheme is Scheme.RWA:
        raise ValueError("Wigner-Floquet ladder states exist for the non-RWA schemes")
    if n < 0 or n_prime < 0:
        raise ValueError("n and n_prime must be non-negative")
    if n + n_prime > 8:
        raise DegreeCap("polynomial degree n + n_prime is capped at 8")
    if not sol.stable:
        raise UnstableSolution("Wigner-Floquet states require a stable solution")
    mu = sol.mu.real
    gamma = sol.gamma
    eig = n * complex(-0.5 * gamma, mu) + n_prime * complex(-0.5 * gamma, -mu)
    cov0 = asymptotic_covariance(sol, diff, 0.0, tol=quad_tol)
    poly0 = _build_poly(sol, cov0, n, n_prime, diff.bath.m, 0.0)
    return WignerFloquetState(
        n=n,
        n_prime=n_prime,
        quasi_eigenvalue=eig,
        gaussian=cov0,
        poly=poly0,
        solution=sol,
        diffusion=diff,
        quad_tol=quad_tol,
    )


# ---------------------------------------------------------------------------
# additive driving
# ---------------------------------------------------------------------------

def effective_force(
    force: Callable[[float], float],
    sol0: FloquetSolution,
    bath: BathSpec,
    t,
    *,
    laguerre_order: int = 48,
    inner_order: int = 32,
):
    """Bath-renormalised driving force evaluated at the times ``t``.

    For a strictly Ohmic bath (omega_D = inf) the renormalisation vanishes
    identically and force(t) is returned unchanged.  With a Drude cutoff the
    correction

        gamma omega_D^2 int_0^inf dtau e^{-omega_D tau}
                        int_t^{t-tau} dt' G0(t - tau, t') F(t')

    is evaluated by Gauss-Laguerre (outer) and Gauss-Legendre (inner)
    quadrature on the zero-damping Green function G0.
    """
    if abs(sol0.gamma) > 1e-15:
        raise ValueError("effective force uses the zero-damping solution")
    if not sol0.stable:
        raise UnstableSolution("effective force requires a stable solution")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    base = np.array([force(ti) for ti in t], dtype=float)
    if math.isinf(bath.omega_D):
        return base if base.shape != () else float(base)

    u, wu = np.polynomial.laguerre.laggauss(laguerre_order)
    xg, wg = _gl(inner_order)
    out = np.empty_like(base)
    for i, ti in enumerate(t):
        acc = 0.0
        for uj, wj in zip(u, wu):
            tau = uj / bath.omega_D
            # inner integral from t - tau up to t, sign flipped below
            half = 0.5 * tau
            nodes = ti - half + half * xg
            gv = green_function(sol0, ti - tau, nodes)
            fvals = np.array([force(s) for s in nodes])
            inner = float(np.dot(half * wg, gv.g * fvals))
            acc += wj * (-inner)
        out[i] = base[i] + bath.gamma * bath.omega_D * acc
    return out


@dataclass(frozen=True)
class MeanTrajectory:
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray


def mean_response_with_force(
    sol: FloquetSolution,
    force_eff: Callable[[float], float],
    state0: CovarianceState,
    t1: float,
    *,
    m: float = 1.0,
    t_eval: Sequence[float] | None = None,
    order: int = 48,
) -> MeanTrajectory:
    """First moments under an (already renormalised) additive force.

    x(t) = homogeneous part + (1/m) int_t0^t G(t,t') F(t') dt'; the
    covariances are untouched by additive driving.
    """
    if not sol.stable:
        raise UnstableSolution("mean response requires a stable solution")
    t0 = state0.t
    if t_eval is None:
        t_eval = np.linspace(t0, t1, 201)
    t_eval = np.asarray(t_eval, dtype=float)
    T = sol.period
    xs = np.empty_like(t_eval)
    ps = np.empty_like(t_eval)
    for i, ti in enumerate(t_eval):
        x_h, p_h = classical_trajectory(sol, state0.mean_x, state0.mean_p, t0, ti, m)
        x_h = float(x_h)
        p_h = float(p_h)
        if ti > t0:
            n_panels = max(1, int(math.ceil((ti - t0) / T)))
            nodes, wts = _panel_nodes(t0, ti, n_panels, order)
            gv = green_function(sol, ti, nodes)
            fvals = np.array([force_eff(s) for s in nodes])
            x_h = x_h + float(np.dot(wts, gv.g * fvals)) / m
            p_h = p_h + float(np.dot(wts, gv.dg_dt * fvals))
        xs[i] = x_h
        ps[i] = p_h
    return MeanTrajectory(t=t_eval, x=xs, p=ps)
