"""Classical Floquet machinery for an oscillator with periodic stiffness.

The equation of motion

    x'' + gamma x' + k(t)/m x = 0,    k(t + T) = k(t),  T = 2 pi / Omega,

is reduced by x = y exp(-gamma t / 2) to a Hill equation

    y'' + (k(t)/m - gamma^2/4) y = 0,

whose quasi-periodic solutions xi_1(t) = exp(i mu t) sum_n c_n exp(i n Omega t)
and xi_2(t) = xi_1(-t) are computed here by continued fractions on the
tridiagonal (or banded) Fourier recurrence.  The coefficients are normalised
so that the Wronskian  xi_1' xi_2 - xi_1 xi_2'  equals 2i, which is the sum
rule  sum_n c_n^2 (mu + n Omega) = 1.

Everything downstream (Green function, trajectories, stability charts) is
built from these fundamental solutions.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    BorderlineStabilityWarning,
    NoConvergence,
    TruncationTooSmall,
    UnstableSolution,
)

_EDGE_THRESHOLD = 1e-12   # |c_{+-n_max}| / max|c| required before accepting n_max
_STEP_BUDGET = 14         # max halvings of a continuation step


@dataclass(frozen=True)
class Mathieu:
    """Stiffness k(t)/m = omega0_sq + epsilon cos(Omega t).

    Parameters are given as squared frequencies (omega0_sq, epsilon) and the
    driving frequency Omega; the particle mass never enters the classical
    Floquet problem.
    """

    omega0_sq: float
    epsilon: float
    Omega: float

    def __post_init__(self):
        if self.Omega <= 0.0:
            raise ValueError("Omega must be positive")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.Omega

    def harmonics(self) -> tuple[float, tuple[float, ...]]:
        """Constant part a_0 and cosine amplitudes (a_1, ..., a_L)."""
        return self.omega0_sq, (self.epsilon,)

    def value(self, t):
        """k(t)/m at time t (scalar or array)."""
        return self.omega0_sq + self.epsilon * np.cos(self.Omega * np.asarray(t))


@dataclass(frozen=True)
class GeneralCosine:
    """Stiffness k(t)/m = a_0 + sum_{l>=1} a_l cos(l Omega t).

    ``amplitudes`` lists (a_0, a_1, ..., a_L).  The cosine-series form keeps
    k(t) symmetric and T-periodic by construction.
    """

    Omega: float
    amplitudes: tuple[float, ...]

    def __post_init__(self):
        if self.Omega <= 0.0:
            raise ValueError("Omega must be positive")
        if len(self.amplitudes) < 1:
            raise ValueError("amplitudes must contain at least a_0")
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.Omega

    def harmonics(self) -> tuple[float, tuple[float, ...]]:
        return self.amplitudes[0], tuple(self.amplitudes[1:])

    def value(self, t):
        t = np.asarray(t)
        out = np.full(t.shape, self.amplitudes[0], dtype=float)
        for l, a in enumerate(self.amplitudes[1:], start=1):
            out = out + a * np.cos(l * self.Omega * t)
        return out


PeriodicStiffness = Union[Mathieu, GeneralCosine]


@dataclass(frozen=True)
class FloquetSolution:
    """Floquet index, Fourier coefficients and bookkeeping for one solution.

    ``mu`` is reported on the branch that is continuous in the driving
    amplitude and reduces to sqrt(omega0_sq - gamma^2/4) for vanishing
    driving, i.e. it is not folded back into the first Brillouin zone.
    ``coeffs`` holds c_n for n = -n_max .. n_max; for a stable solution they
    are real and sum-rule normalised, for an unstable one they are complex
    and normalised with the principal square root.
    """

    mu: complex
    coeffs: np.ndarray
    gamma: float
    n_max: int
    residual: float
    stable: bool
    stiffness: PeriodicStiffness

    @property
    def Omega(self) -> float:
        return self.stiffness.Omega

    @property
    def period(self) -> float:
        return self.stiffness.period

    def mode_frequencies(self) -> np.ndarray:
        """The sideband frequencies mu + n Omega, n = -n_max .. n_max."""
        n = np.arange(-self.n_max, self.n_max + 1)
        return self.mu + n * self.Omega

    def sum_rule_residual(self) -> float:
        """|sum_n c_n^2 (mu + n Omega) - 1|."""
        s = np.sum(self.coeffs**2 * self.mode_frequencies())
        return abs(s - 1.0)

    def coefficient_weight(self) -> float:
        """sum_n c_n^2 (order unity; the zero-damping conservative factor)."""
        return float(np.sum(np.asarray(self.coeffs) ** 2).real)


@dataclass(frozen=True)
class FundamentalSolutions:
    """xi_i, their derivatives, and the damped solutions f_i = e^{-gamma t/2} xi_i."""

    xi1: np.ndarray
    xi2: np.ndarray
    dxi1: np.ndarray
    dxi2: np.ndarray
    ddxi1: np.ndarray
    ddxi2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    df1: np.ndarray
    df2: np.ndarray


@dataclass(frozen=True)
class GreenFunctionValues:
    """G(t, t') and its partial derivatives."""

    g: np.ndarray
    dg_dt: np.ndarray
    dg_dtp: np.ndarray
    d2g_dtdtp: np.ndarray
    d2g_dt2: np.ndarray


@dataclass(frozen=True)
class StabilityPoint:
    omega0_sq: float
    eps: float
    mu_re: float
    mu_im: float
    stable: bool
    converged: bool


# ---------------------------------------------------------------------------
# continued fractions
# ---------------------------------------------------------------------------

def _char_tridiagonal(mu, a, eps, Omega, n_max):
    """Characteristic function of the Mathieu recurrence at trial index mu.

    Ratios h_n = c_n / c_{n-1} are evaluated downward from n_max with the
    closure h_{n_max+1} = 0; the returned value is the n = 0 row divided by
    c_0, which vanishes exactly at a Floquet index.
    """
    tiny = 1e-300
    h = 0.0j
    for n in range(n_max, 0, -1):
        w = mu + n * Omega
        den = 2.0 * (a - w * w) + eps * h
        if den == 0:
            den = tiny
        h = -eps / den
    g = 0.0j
    for n in range(n_max, 0, -1):
        w = mu - n * Omega
        den = 2.0 * (a - w * w) + eps * g
        if den == 0:
            den = tiny
        g = -eps / den
    return 2.0 * (a - mu * mu) + eps * (h + g)


def _ratios_tridiagonal(mu, a, eps, Omega, n_max):
    """Downward ratio chains (h_1..h_n_max, g_1..g_n_max) at a converged mu."""
    tiny = 1e-300
    h = [0.0j] * (n_max + 2)
    for n in range(n_max, 0, -1):
        w = mu + n * Omega
        den = 2.0 * (a - w * w) + eps * h[n + 1]
        if den == 0:
            den = tiny
        h[n] = -eps / den
    g = [0.0j] * (n_max + 2)
    for n in range(n_max, 0, -1):
        w = mu - n * Omega
        den = 2.0 * (a - w * w) + eps * g[n + 1]
        if den == 0:
            den = tiny
        g[n] = -eps / den
    return h[1 : n_max + 1], g[1 : n_max + 1]


def _block_matrices(mu, a_const, amps, Omega, n_blocks, L):
    """Banded recurrence as a block-tridiagonal system with L x L blocks.

    Block k gathers c_n for n = kL .. kL+L-1; returns (B_k for k in
    -n_blocks..n_blocks, A, A^T) where A couples a block to its left
    neighbour.
    """
    A = np.zeros((L, L), dtype=complex)
    for j in range(L):
        for jp in range(j, L):
            l = L + j - jp
            if 1 <= l <= len(amps):
                A[j, jp] = 0.5 * amps[l - 1]
    B = {}
    for k in range(-n_blocks, n_blocks + 1):
        Bk = np.zeros((L, L), dtype=complex)
        for j in range(L):
            n = k * L + j
            w = mu + n * Omega
            Bk[j, j] = a_const - w * w
            for jp in range(L):
                l = abs(jp - j)
                if 1 <= l <= len(amps):
                    Bk[j, jp] += 0.5 * amps[l - 1]
        B[k] = Bk
    return B, A, A.T.copy()


def _char_block(mu, a_const, amps, Omega, n_blocks, L, want_chain=False):
    """det of the central closed block row; optionally the ratio matrices."""
    B, A, At = _block_matrices(mu, a_const, amps, Omega, n_blocks, L)
    R = np.zeros((L, L), dtype=complex)
    R_chain = []
    for k in range(n_blocks, 0, -1):
        R = -np.linalg.solve(B[k] + At @ R, A)
        if want_chain:
            R_chain.append(R)
    S = np.zeros((L, L), dtype=complex)
    S_chain = []
    for k in range(n_blocks, 0, -1):
        S = -np.linalg.solve(B[-k] + A @ S, At)
        if want_chain:
            S_chain.append(S)
    M = B[0] + At @ R + A @ S
    if not want_chain:
        return np.linalg.det(M)
    R_chain.reverse()  # R_chain[k-1] maps C_{k-1} -> C_k
    S_chain.reverse()  # S_chain[m-1] maps C_{-m+1} -> C_{-m}
    return M, R_chain, S_chain


def _secant(f, z0, z1, tol, max_iter=80):
    f0 = f(z0)
    f1 = f(z1)
    z_prev, z_cur = z0, z1
    for _ in range(max_iter):
        if f1 == f0:
            break
        z_next = z_cur - f1 * (z_cur - z_prev) / (f1 - f0)
        if not (cmath.isfinite(z_next)):
            break
        z_prev, f0 = z_cur, f1
        z_cur = z_next
        f1 = f(z_cur)
        if abs(z_cur - z_prev) <= tol:
            return z_cur, True
    return z_cur, False


def _trace_root(char_of, mu0, Omega, scale_total, tol_mu):
    """Follow the root of char_of(s, mu) from s=0 (where mu=mu0) to s=1.

    The driving amplitudes are ramped with s; across an instability tongue
    the root leaves the real axis, so every secant start carries a small
    complex kick.  Steps are halved when the root jumps or the secant stalls.
    """
    n_steps = max(2, int(math.ceil(scale_total / 0.3)))
    step = 1.0 / n_steps
    min_step = step / 2.0**_STEP_BUDGET
    kick = Omega * (1e-6 + 1e-6j)
    mu = complex(mu0)
    s = 0.0
    while s < 1.0 - 1e-12:
        s_try = min(1.0, s + step)
        f = lambda z, _s=s_try: char_of(_s, z)
        root, ok = _secant(f, mu + kick, mu, tol_mu)
        if ok and abs(root - mu) < 0.45 * Omega:
            mu = root
            s = s_try
        else:
            step *= 0.5
            if step < min_step:
                raise NoConvergence(
                    f"continued-fraction root tracking stalled at ramp s={s:.4f}"
                )
    return mu


def _polish_real(char, mu, tol_mu):
    """Re-converge a root on the real axis; returns (mu, polished)."""
    f = lambda x: char(complex(x, 0.0)).real
    root, ok = _secant(f, mu.real + 10.0 * tol_mu, mu.real, 0.01 * tol_mu)
    if ok and abs(root - mu.real) < 100.0 * tol_mu + 1e-9 * abs(mu.real):
        return complex(float(np.real(root)), 0.0), True
    return complex(mu.real, 0.0), False


def _coefficients(mu, a_const, amps, Omega, n_max, stable):
    """Unnormalised Fourier coefficients at a converged Floquet index."""
    L = len(amps)
    if stable:
        mu = complex(mu.real, 0.0)
    if L == 1:
        h, g = _ratios_tridiagonal(mu, a_const, amps[0], Omega, n_max)
        c = np.zeros(2 * n_max + 1, dtype=complex)
        c[n_max] = 1.0
        for n in range(1, n_max + 1):
            c[n_max + n] = c[n_max + n - 1] * h[n - 1]
            c[n_max - n] = c[n_max - n + 1] * g[n - 1]
        return c
    n_blocks = max(1, int(math.ceil(n_max / L)))
    M, R_chain, S_chain = _char_block(mu, a_const, amps, Omega, n_blocks, L, want_chain=True)
    _, _, vh = np.linalg.svd(M)
    c0 = vh[-1].conj()
    blocks = {0: c0}
    cur = c0
    for k in range(1, n_blocks + 1):
        cur = R_chain[k - 1] @ cur
        blocks[k] = cur
    cur = c0
    for m in range(1, n_blocks + 1):
        cur = S_chain[m - 1] @ cur
        blocks[-m] = cur
    full = np.concatenate([blocks[k] for k in range(-n_blocks, n_blocks + 1)])
    # block k=-n_blocks starts at n = -n_blocks*L; keep the symmetric window
    n_lo = -n_blocks * L
    idx0 = -n_max - n_lo
    return full[idx0 : idx0 + 2 * n_max + 1]


def _recurrence_residual(c, mu, a_const, amps, Omega, n_max):
    """Max relative defect of the banded recurrence over all retained rows.

    Each row is scaled by its own term magnitudes, floored at a fraction of
    the largest row so that truncation-edge rows built from denormal
    coefficients do not dominate.
    """
    L = len(amps)
    defects = []
    scales = []
    for i, n in enumerate(range(-n_max, n_max + 1)):
        w = mu + n * Omega
        acc = (a_const - w * w) * c[i]
        scale = abs((a_const - w * w) * c[i])
        for l in range(1, L + 1):
            half = 0.5 * amps[l - 1]
            lo = i - l
            hi = i + l
            if lo >= 0:
                acc += half * c[lo]
                scale += abs(half * c[lo])
            if hi <= 2 * n_max:
                acc += half * c[hi]
                scale += abs(half * c[hi])
        defects.append(abs(acc))
        scales.append(scale)
    floor = 1e-10 * max(scales)
    return max(d / max(s, floor) for d, s in zip(defects, scales))


def solve_floquet(
    stiffness: PeriodicStiffness,
    gamma: float = 0.0,
    tol: float = 1e-9,
    n_max: int = 32,
    *,
    n_max_limit: int = 512,
) -> FloquetSolution:
    """Solve the classical Floquet problem for a periodic stiffness.

    Parameters
    ----------
    stiffness
        Mathieu or GeneralCosine coefficient of the restoring force.
    gamma
        Velocity damping rate; enters only through the shift -gamma^2/4.
    tol
        Root-finding tolerance; also the |Im mu| threshold below which the
        solution is classified as stable.
    n_max
        Initial Fourier truncation, doubled automatically until the edge
        coefficients fall below 1e-12 of the largest one.

    Returns
    -------
    FloquetSolution
        With mu on the branch continuous in the driving amplitude (it reduces
        to sqrt(omega0_sq - gamma^2/4) at zero driving), and coefficients
        normalised by the sum rule.

    Raises
    ------
    NoConvergence
        If the continued-fraction root tracking fails.
    TruncationTooSmall
        If the edge-coefficient criterion is still violated at
        ``n_max_limit`` harmonics.
    """
    if n_max < 8:
        raise ValueError("n_max must be at least 8")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a0, amps = stiffness.harmonics()
    Omega = stiffness.Omega
    a_const = a0 - 0.25 * gamma * gamma
    amps = tuple(amps)
    drive = sum(abs(a) for a in amps)

    mu0 = cmath.sqrt(complex(a_const, 0.0))  # principal branch: Im >= 0

    if drive == 0.0:
        return _undriven_solution(stiffness, gamma, tol, a_const, mu0)

    L = len(amps)
    tol_mu = max(1e-13, 0.01 * tol) * max(Omega, abs(mu0))

    current_n = n_max
    mu_seed = mu0
    while True:
        if L == 1:
            char_of = lambda s, z: _char_tridiagonal(z, a_const, s * amps[0], Omega, current_n)
        else:
            n_blocks = max(1, int(math.ceil(current_n / L)))
            char_of = lambda s, z: _char_block(
                z, a_const, tuple(s * a for a in amps), Omega, n_blocks, L
            )
        mu = _trace_root(char_of, mu_seed, Omega, drive / Omega**2, tol_mu)

        stable = abs(mu.imag) < tol
        if stable:
            mu_re, _ = _polish_real(lambda z: char_of(1.0, z), mu, tol_mu)
            mu = mu_re
        if mu.imag < -tol:
            mu = mu.conjugate()  # deterministic sign for the unstable pair

        c = _coefficients(mu, a_const, amps, Omega, current_n, stable)
        peak = np.max(np.abs(c))
        edge = max(abs(c[0]), abs(c[-1]))
        if peak > 0 and edge / peak < _EDGE_THRESHOLD:
            break
        if 2 * current_n > n_max_limit:
            raise TruncationTooSmall(
                f"edge coefficients {edge/peak:.2e} of peak at n_max={current_n}; "
                "raise n_max"
            )
        mu_seed = mu
        current_n *= 2

    residual = _recurrence_residual(c, mu, a_const, amps, Omega, current_n)

    # sum-rule normalisation; the sign makes the dominant coefficient positive
    n_arr = np.arange(-current_n, current_n + 1)
    freq = mu + n_arr * Omega
    s_sum = complex(np.sum(c**2 * freq))
    if stable:
        s_real = s_sum.real
        if s_real < 0.0:
            # mirror branch: relabel xi_1 <-> xi_2
            mu = -mu
            c = c[::-1].copy()
            s_real = -s_real
            warnings.warn(
                "sum rule forced a branch mirror; Floquet index sign flipped",
                BorderlineStabilityWarning,
                stacklevel=2,
            )
        if s_real <= 0.0:
            raise NoConvergence("sum-rule normalisation degenerate (borderline point)")
        c = c / math.sqrt(s_real)
        c = np.real(c)
    else:
        c = c / cmath.sqrt(s_sum)
    k_peak = int(np.argmax(np.abs(c)))
    if (c[k_peak].real if np.iscomplexobj(c) else c[k_peak]) < 0:
        c = -c

    _warn_if_borderline(mu, Omega, tol)
    return FloquetSolution(
        mu=mu,
        coeffs=c,
        gamma=float(gamma),
        n_max=current_n,
        residual=float(residual),
        stable=bool(stable),
        stiffness=stiffness,
    )


def _undriven_solution(stiffness, gamma, tol, a_const, mu0):
    if abs(mu0) < 1e-14:
        raise NoConvergence("marginal point: omega0_sq == gamma^2/4")
    stable = abs(mu0.imag) < tol
    if stable:
        mu = complex(mu0.real, 0.0)
        c = np.array([1.0 / math.sqrt(mu.real)])
    else:
        mu = mu0 if mu0.imag > 0 else mu0.conjugate()
        c = np.array([1.0 / cmath.sqrt(mu)])
    _warn_if_borderline(mu, stiffness.Omega, tol)
    return FloquetSolution(
        mu=mu,
        coeffs=c,
        gamma=float(gamma),
        n_max=0,
        residual=0.0,
        stable=stable,
        stiffness=stiffness,
    )


def _warn_if_borderline(mu, Omega, tol):
    half = 0.5 * Omega
    dist = abs(mu.real - round(mu.real / half) * half)
    if dist < 1e-6 * Omega or 0.0 < abs(mu.imag) < tol:
        warnings.warn(
            "Floquet index lies on a stability borderline; xi_1 and xi_2 "
            "are close to linearly dependent",
            BorderlineStabilityWarning,
            stacklevel=3,
        )


# ---------------------------------------------------------------------------
# fundamental solutions and Green function
# ---------------------------------------------------------------------------

def fundamental_solutions(sol: FloquetSolution, t) -> FundamentalSolutions:
    """Evaluate xi_1, xi_2 = xi_1(-t), f_i = e^{-gamma t/2} xi_i and derivatives.

    Derivatives come from the Fourier series itself, never from finite
    differences.  ``t`` may be a scalar or an array.
    """
    if not sol.stable:
        raise UnstableSolution("fundamental solutions require a stable Floquet index")
    t = np.asarray(t, dtype=float)
    freq = sol.mode_frequencies().astype(complex)
    c = np.asarray(sol.coeffs, dtype=complex)
    ph_p = np.exp(1j * np.multiply.outer(t, freq))
    ph_m = np.exp(-1j * np.multiply.outer(t, freq))
    xi1 = ph_p @ c
    dxi1 = ph_p @ (1j * freq * c)
    ddxi1 = ph_p @ (-(freq**2) * c)
    xi2 = ph_m @ c
    dxi2 = -(ph_m @ (1j * freq * c))
    ddxi2 = ph_m @ (-(freq**2) * c)
    damp = np.exp(-0.5 * sol.gamma * t)
    f1 = damp * xi1
    f2 = damp * xi2
    df1 = damp * (dxi1 - 0.5 * sol.gamma * xi1)
    df2 = damp * (dxi2 - 0.5 * sol.gamma * xi2)
    return FundamentalSolutions(xi1, xi2, dxi1, dxi2, ddxi1, ddxi2, f1, f2, df1, df2)


def green_function(sol: FloquetSolution, t, tp) -> GreenFunctionValues:
    """Green function of x'' + gamma x' + k(t)/m x = 0 and its derivatives.

    G(t, t') vanishes at coincidence and has unit slope in its first
    argument there; both facts are forced by the Wronskian normalisation.
    ``t`` and ``tp`` broadcast against each other.
    """
    if not sol.stable:
        raise UnstableSolution("Green function requires a stable Floquet index")
    ft = fundamental_solutions(sol, t)
    fp = fundamental_solutions(sol, tp)
    half_i = 1.0 / 2.0j
    H = (ft.xi1 * fp.xi2 - ft.xi2 * fp.xi1) * half_i
    Ht = (ft.dxi1 * fp.xi2 - ft.dxi2 * fp.xi1) * half_i
    Hp = (ft.xi1 * fp.dxi2 - ft.xi2 * fp.dxi1) * half_i
    Htp = (ft.dxi1 * fp.dxi2 - ft.dxi2 * fp.dxi1) * half_i
    Htt = (ft.ddxi1 * fp.xi2 - ft.ddxi2 * fp.xi1) * half_i
    t = np.asarray(t, dtype=float)
    tp = np.asarray(tp, dtype=float)
    hg = 0.5 * sol.gamma
    decay = np.exp(-hg * (t - tp))
    g = decay * H
    dg_dt = decay * (Ht - hg * H)
    dg_dtp = decay * (Hp + hg * H)
    d2g_dtdtp = decay * (Htp + hg * Ht - hg * (Hp + hg * H))
    d2g_dt2 = decay * (Htt - sol.gamma * Ht + hg * hg * H)
    return GreenFunctionValues(
        g=np.real(g),
        dg_dt=np.real(dg_dt),
        dg_dtp=np.real(dg_dtp),
        d2g_dtdtp=np.real(d2g_dtdtp),
        d2g_dt2=np.real(d2g_dt2),
    )


def classical_trajectory(sol: FloquetSolution, x0: float, p0: float, t0: float, t, m: float = 1.0):
    """Classical phase-space trajectory from (x0, p0) at t0.

    x(t) = -x0 dG(t,t0)/dt0 + (p0/m) G(t,t0), p = m xdot; the result depends
    explicitly on t0 because the driving breaks time-translation invariance.
    """
    if not sol.stable:
        raise UnstableSolution("trajectory requires a stable Floquet index")
    gv = green_function(sol, t, t0)
    x = -x0 * gv.dg_dtp + (p0 / m) * gv.g
    p = m * (-x0 * gv.d2g_dtdtp + (p0 / m) * gv.dg_dt)
    return x, p


def stability_chart(
    omega0_sq_range: tuple[float, float],
    eps_range: tuple[float, float],
    grid,
    gamma: float = 0.0,
    *,
    Omega: float = 1.0,
    tol: float = 1e-9,
    n_max: int = 32,
) -> list[StabilityPoint]:
    """Classify stability on a rectangular (omega0_sq, eps) grid.

    One record per node; nodes where the solver fails are flagged
    ``converged=False`` instead of aborting the scan.  Nodes are independent,
    so the scan parallelises trivially if ever needed.
    """
    if isinstance(grid, int):
        nx = ny = grid
    else:
        nx, ny = grid
    if nx < 2 or ny < 2:
        raise ValueError("grid must have at least 2 nodes per axis")
    om_vals = np.linspace(omega0_sq_range[0], omega0_sq_range[1], nx)
    eps_vals = np.linspace(eps_range[0], eps_range[1], ny)
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BorderlineStabilityWarning)
        for om in om_vals:
            for ep in eps_vals:
                try:
                    sol = solve_floquet(
                        Mathieu(float(om), float(ep), Omega), gamma, tol, n_max
                    )
                    out.append(
                        StabilityPoint(
                            float(om), float(ep),
                            float(sol.mu.real), float(sol.mu.imag),
                            sol.stable, True,
                        )
                    )
                except (NoConvergence, TruncationTooSmall):
                    out.append(
                        StabilityPoint(float(om), float(ep), math.nan, math.nan, False, False)
                    )
    return out
