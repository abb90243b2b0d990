"""Quasi-exact reference variances from the linear quantum-Langevin route.

For the bilinear system-bath model the Heisenberg equations are linear, so
the asymptotic second moments follow from the damped classical Green
function driven by the symmetrised noise kernel

    K(tau) = (hbar/pi) int_0^inf dw I(w) coth(hbar w / 2 kT) cos(w tau),

with the Drude-regularised Ohmic spectral density.  The double time integral

    sigma_xx(t) = (1/m^2) int int_{-inf}^t dt1 dt2 G(t,t1) G(t,t2) K(t1-t2)

(and its dG/dt analogues) is reduced to a single kernel integral: in the
difference variable u = t1 - t2 the inner integral over the mean time is a
finite sum over Floquet sidebands with known exponential integrals, and the
remaining u integral is done on adaptive panels with a node-doubling check.
This reproduces the physics of the exact reference solution; it makes no
weak-coupling or Markov approximation for the asymptotic state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import expn, polygamma

from .dissipation import BathSpec
from .errors import QuadratureBudget, UnstableSolution
from .floquet import FloquetSolution, fundamental_solutions


def suggested_cutoff(sol: FloquetSolution, factor: float = 50.0) -> float:
    """Drude cutoff well above the frequencies the solution actually carries."""
    c = np.abs(np.asarray(sol.coeffs))
    keep = c > 1e-8 * c.max()
    fmax = float(np.max(np.abs(np.real(sol.mode_frequencies()[keep]))))
    return factor * max(sol.Omega, fmax)


@dataclass(frozen=True)
class NoiseKernel:
    """Symmetrised bath correlation K(tau) for an Ohmic bath with Drude cutoff.

    Evaluated from the Matsubara decomposition

        K(tau) = m gamma kT [ w_D e^{-w_D|tau|}
                 + 2 w_D^2 sum_k (w_D e^{-w_D|tau|} - nu_k e^{-nu_k|tau|})
                                 / (w_D^2 - nu_k^2) ],

    nu_k = 2 pi k kT / hbar, with the slowly converging 1/nu_k piece summed
    in closed form (a logarithm) and polygamma tail corrections for the
    rest.  K is even in tau and has an integrable log singularity at 0; in
    the high-temperature limit it acts on smooth functions as
    2 m gamma kT delta(tau).
    """

    bath: BathSpec
    n_terms: int = 0
    tau: np.ndarray = field(default=None, repr=False)
    values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if math.isinf(self.bath.omega_D):
            raise ValueError("noise kernel requires a finite Drude cutoff")
        nu1 = 2.0 * math.pi * self.bath.kT / self.bath.hbar
        if self.n_terms <= 0:
            auto = int(math.ceil(6.0 * self.bath.omega_D / nu1)) + 512
            object.__setattr__(self, "n_terms", min(max(auto, 1024), 400_000))
        if self.tau is None:
            # diagnostic sample grid, dyadically refined towards tau = 0
            T_ref = 2.0 * math.pi / min(nu1, self.bath.omega_D)
            grid = np.concatenate(
                [T_ref * 2.0 ** (-np.arange(30, 0, -1.0)), np.linspace(T_ref, 20 * T_ref, 64)]
            )
            object.__setattr__(self, "tau", grid)
            object.__setattr__(self, "values", self.evaluate(grid))

    @property
    def nu1(self) -> float:
        return 2.0 * math.pi * self.bath.kT / self.bath.hbar

    def evaluate(self, tau) -> np.ndarray:
        """K at the given lags (vectorised); K(0) is logarithmically divergent."""
        b = self.bath
        wd = b.omega_D
        nu1 = self.nu1
        tau_in = np.asarray(tau, dtype=float)
        at = np.atleast_1d(np.abs(tau_in))
        if np.any(at == 0.0):
            raise ValueError("K(0) diverges logarithmically; evaluate at tau != 0")
        q = np.exp(-nu1 * at)
        e_wd = np.exp(-wd * at)

        k_idx = np.arange(1, self.n_terms + 1, dtype=float)
        nu = nu1 * k_idx
        close = np.abs(nu - wd) < 0.01 * wd
        total = np.zeros_like(at)
        log_partial = np.zeros_like(at)
        chunk = 4096
        for lo in range(0, self.n_terms, chunk):
            kk = nu[lo : lo + chunk]
            cl = close[lo : lo + chunk]
            ek = np.exp(-np.multiply.outer(at, kk))
            safe = np.where(cl, 1.0, wd * wd - kk * kk)
            s_k = (wd * e_wd[:, None] - kk * ek) / safe
            if np.any(cl):
                # removable 0/0 at nu_k ~ w_D: stable expm1 form of the ratio
                kc = kk[cl]
                dk = np.where(kc == wd, 1e-30 * wd, kc - wd)
                num = -dk - kc * np.expm1(-np.outer(at, dk))
                s_k[:, cl] = e_wd[:, None] * num / (-dk * (wd + kc))
            total += s_k.sum(axis=1)
            log_partial += (ek / kk).sum(axis=1)
        # sum_k e^{-nu_k tau}/nu_k has the closed form -ln(1 - q)/nu1; the part
        # beyond the partial sum supplies the slowly converging log tail
        # (expm1 keeps 1 - q alive when nu1 tau underflows)
        log_sum = -np.log(-np.expm1(-nu1 * at)) / nu1
        tail_log = log_sum - log_partial
        # remainders beyond n_terms (K = n_terms, y = wd/nu1):
        #   sum_{k>K} e^{-nu tau} wd^2/(nu (nu^2 - wd^2))
        #     ~ (wd^2/nu1^3) int_{K+1/2}^inf e^{-a kappa} kappa^-3 (1 + y^2/kappa^2)
        #   sum_{k>K} wd e^{-wd tau}/(wd^2 - nu^2) = -wd e^{-wd tau}/nu1^2
        #     * sum_{k>K} 1/(k^2 - y^2), expanded in polygamma functions; the
        #     y^2 corrections must match the first piece or the kernel picks
        #     up a spurious net area
        kh = self.n_terms + 0.5
        y2 = (wd / nu1) ** 2
        a_kh = np.maximum(nu1 * at * kh, 1e-300)
        int_part = expn(3, a_kh) / kh**2 + y2 * expn(5, a_kh) / kh**4
        tail_rest = (wd * wd / nu1**3) * int_part
        s_inv = (
            float(polygamma(1, self.n_terms + 1))
            + y2 * float(polygamma(3, self.n_terms + 1)) / 6.0
            + y2 * y2 * float(polygamma(5, self.n_terms + 1)) / 120.0
        )
        tail_wd = -wd * e_wd * s_inv / nu1**2
        series = total + tail_log + tail_rest + tail_wd
        out = b.m * b.gamma * b.kT * (wd * e_wd + 2.0 * wd * wd * series)
        return out if tau_in.ndim else float(out[0])


def exact_variances(
    sol: FloquetSolution, kernel: NoiseKernel, t: float, tol: float = 1e-6
) -> "CovarianceState":
    """Asymptotic covariance of the quantum-Langevin dynamics at time t.

    Requires the damped Floquet solution (gamma of sol equals the bath's)
    and a stable index.  The result is T-periodic in t.  Raises
    QuadratureBudget when node doubling fails the self-consistency check.
    """
    from .evolution import CovarianceState

    bath = kernel.bath
    if not sol.stable:
        raise UnstableSolution("exact variances require a stable solution")
    gamma = bath.gamma
    if abs(sol.gamma - gamma) > 1e-12 * max(1.0, gamma):
        raise ValueError("sol was computed with a different damping than the bath")

    # mode decomposition of G(t, t-s) and dG/dt(t, t-s) at fixed t:
    # g(s) = e^{-gamma s/2} sum_j q_j e^{i lam_j s}
    fs = fundamental_solutions(sol, t)
    freqs = np.real(sol.mode_frequencies())
    c = np.asarray(sol.coeffs, dtype=float)
    phase_m = np.exp(-1j * freqs * t) * c
    phase_p = np.exp(1j * freqs * t) * c
    lam = np.concatenate([freqs, -freqs])
    half_i = 1.0 / 2.0j
    q_x = np.concatenate([complex(fs.xi1) * phase_m, -complex(fs.xi2) * phase_p]) * half_i
    dxi1 = complex(fs.dxi1) - 0.5 * gamma * complex(fs.xi1)
    dxi2 = complex(fs.dxi2) - 0.5 * gamma * complex(fs.xi2)
    q_p = np.concatenate([dxi1 * phase_m, -dxi2 * phase_p]) * half_i

    # inner (mean-time) integral in closed form: D[j,j'] = 1/(gamma - i(lam_j + lam_j'))
    denom = 1.0 / (gamma - 1j * np.add.outer(lam, lam))
    v_x = denom @ q_x
    v_p = denom @ q_p

    def c_pair(qa, vb, u):
        ph = np.exp(1j * np.multiply.outer(u, lam))
        return np.exp(-0.5 * gamma * u) * np.real(ph @ (qa * vb))

    # kernel support: K decays on 1/min(nu1, w_D), the G product on 2/gamma
    decay = min(kernel.nu1, bath.omega_D) + 0.5 * gamma
    u_max = -math.log(1e-14) / decay
    T = sol.period

    def quadrature(order):
        nodes_all, w_all = [], []
        # dyadic refinement towards the log singularity at u = 0; the depth
        # leaves only ~1e-10 of the log weight inside the innermost panel
        lo_edges = [0.0] + [min(u_max, T) * 2.0**(-j) for j in range(40, -1, -1)]
        x, w = leggauss(order // 4)
        for a, b in zip(lo_edges[:-1], lo_edges[1:]):
            half = 0.5 * (b - a)
            nodes_all.append(0.5 * (a + b) + half * x)
            w_all.append(half * w)
        if u_max > T:
            n_pan = int(math.ceil((u_max - T) / T))
            x2, w2 = leggauss(order)
            edges = np.linspace(T, u_max, n_pan + 1)
            for a, b in zip(edges[:-1], edges[1:]):
                half = 0.5 * (b - a)
                nodes_all.append(0.5 * (a + b) + half * x2)
                w_all.append(half * w2)
        u = np.concatenate(nodes_all)
        wq = np.concatenate(w_all)
        K = kernel.evaluate(u)
        cxx = c_pair(q_x, v_x, u)
        cpp = c_pair(q_p, v_p, u)
        cxp = c_pair(q_x, v_p, u) + c_pair(q_p, v_x, u)
        sxx = 2.0 / bath.m**2 * float(np.dot(wq, K * cxx))
        sxp = 1.0 / bath.m * float(np.dot(wq, K * cxp))
        spp = 2.0 * float(np.dot(wq, K * cpp))
        return np.array([sxx, sxp, spp])

    prev = quadrature(16)
    for order in (32, 64, 128, 256):
        cur = quadrature(order)
        scale = float(np.max(np.abs(cur))) + 1e-300
        if float(np.max(np.abs(cur - prev))) <= max(tol, 1e-12) * scale:
            return CovarianceState(
                float(t), 0.0, 0.0, float(cur[0]), float(cur[1]), float(cur[2])
            )
        prev = cur
    raise QuadratureBudget(
        "kernel quadrature failed its node-doubling consistency check"
    )
