"""Command-line front end emitting machine-readable datasets.

Subcommands cover the standard experiments: stability charts, single Floquet
solves, diffusion-coefficient scans, asymptotic variances with the exact
reference, damping sweeps, RWA relaxation, and the reference oracle alone.
Output is CSV with a '#' metadata header (or JSON via --format json) and is
byte-identical for identical configurations.

Physical inputs are accepted in natural units (hbar = m = 1, explicit Omega)
or in scaled units, where frequencies carry a factor 2/Omega, times Omega/2,
the driving amplitude 2/Omega^2, and temperature 1/(hbar Omega).  Scaled mode
computes internally in natural units with Omega = 2, which maps scaled onto
natural quantities one-to-one.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import __version__
from .dissipation import (
    BathSpec,
    improved_diffusion,
    rwa_diffusion,
    simple_diffusion,
    d_pp_improved,
    d_pp_simple,
)
from .errors import ConfigError, ParamOscError
from .evolution import (
    FloquetDensityMatrix,
    asymptotic_covariance,
    rwa_asymptotic_covariance,
    rwa_density_propagate,
)
from .floquet import GeneralCosine, Mathieu, solve_floquet, stability_chart
from .oracle import NoiseKernel, exact_variances

# how each config key transforms between natural and scaled units
_KIND = {
    "omega0_sq": "freq2",
    "eps": "drive",
    "gamma": "freq",
    "omega_d": "freq",
    "mu": "freq",
    "kt": "energy",
    "t": "time",
    "sigma_xx": "sxx",
    "sigma_xp": "sxp",
    "sigma_pp": "spp",
}


def scaled_to_natural(key: str, value: float, Omega: float, m: float = 1.0, hbar: float = 1.0) -> float:
    kind = _KIND[key]
    if kind == "freq":
        return value * Omega / 2.0
    if kind == "freq2":
        return value * Omega * Omega / 4.0
    if kind == "drive":
        return value * Omega * Omega / 2.0
    if kind == "energy":
        return value * hbar * Omega
    if kind == "time":
        return value * 2.0 / Omega
    if kind == "sxx":
        return value * 2.0 * hbar / (m * Omega)
    if kind == "sxp":
        return value * hbar
    if kind == "spp":
        return value * m * hbar * Omega / 2.0
    raise KeyError(kind)


def natural_to_scaled(key: str, value: float, Omega: float, m: float = 1.0, hbar: float = 1.0) -> float:
    kind = _KIND[key]
    if kind == "freq":
        return value * 2.0 / Omega
    if kind == "freq2":
        return value * 4.0 / (Omega * Omega)
    if kind == "drive":
        return value * 2.0 / (Omega * Omega)
    if kind == "energy":
        return value / (hbar * Omega)
    if kind == "time":
        return value * Omega / 2.0
    if kind == "sxx":
        return value * m * Omega / (2.0 * hbar)
    if kind == "sxp":
        return value / hbar
    if kind == "spp":
        return value * 2.0 / (m * hbar * Omega)
    raise KeyError(kind)


_DEFAULTS = {
    "units": "natural",
    "omega": 1.0,
    "omega0_sq": 6.5,
    "eps": 7.0,
    "stiffness_harmonics": "",
    "gamma": 0.05,
    "kt": 0.5,
    "omega_d": 400.0,
    "schemes": "simple,improved",
    "tol": 1e-9,
    "n_max": 32,
    "t_start": 0.0,
    "t_count": 32,
    "grid_n": 24,
    "omega0_sq_min": 0.0,
    "omega0_sq_max": 9.0,
    "eps_min": 0.0,
    "eps_max": 10.0,
    "path_omega0_sq_start": 0.5,
    "path_omega0_sq_end": 6.5,
    "path_eps_start": 0.0,
    "path_eps_end": 7.0,
    "path_count": 40,
    "gammas": "0.01,0.05,0.1",
    "n_occupation": -1.0,
    "alpha0": 1,
    "a_max": 40,
    "dt": 0.0,
    "t_max": 0.0,
    "format": "csv",
    "out": "-",
}

_INT_KEYS = {"n_max", "t_count", "grid_n", "path_count", "alpha0", "a_max"}
_STR_KEYS = {"units", "schemes", "format", "out", "stiffness_harmonics", "gammas"}


@dataclass
class RunConfig:
    """Typed run configuration in the units the user declared."""

    values: dict

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError as exc:
            raise ConfigError(f"unknown config key: {key}") from exc

    @property
    def scaled(self) -> bool:
        return self.values["units"] == "scaled"

    def natural(self, key: str) -> float:
        """A physical value converted to the internal natural units."""
        v = float(self.values[key])
        if self.scaled and key in _KIND:
            return scaled_to_natural(key, v, self.omega_natural)
        return v

    @property
    def omega_natural(self) -> float:
        # scaled mode computes at Omega = 2, making scaled frequencies
        # numerically equal to natural ones
        return 2.0 if self.scaled else float(self.values["omega"])

    def to_output(self, key: str, value: float) -> float:
        if self.scaled and key in _KIND:
            return natural_to_scaled(key, value, self.omega_natural)
        return value


def load_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{ln}: expected 'key = value'")
                key, val = (s.strip() for s in line.split("=", 1))
                out[key] = val
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return out


def build_config(args) -> RunConfig:
    raw = dict(_DEFAULTS)
    if args.config:
        raw.update(load_config_file(args.config))
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        raw[key] = val
    if args.units:
        raw["units"] = args.units
    if args.tol is not None:
        raw["tol"] = args.tol
    if args.out:
        raw["out"] = args.out
    if args.format:
        raw["format"] = args.format

    values = {}
    for key, val in raw.items():
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown config key: {key}")
        try:
            if key in _STR_KEYS:
                values[key] = str(val)
            elif key in _INT_KEYS:
                values[key] = int(val)
            else:
                values[key] = float(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {val!r}") from exc
    if values["units"] not in ("natural", "scaled"):
        raise ConfigError("units must be 'natural' or 'scaled'")
    if values["format"] not in ("csv", "json"):
        raise ConfigError("format must be 'csv' or 'json'")
    for scheme in values["schemes"].split(","):
        if scheme.strip() not in ("simple", "improved", "rwa"):
            raise ConfigError(f"unknown scheme: {scheme.strip()!r}")
    return RunConfig(values)


def _stiffness(cfg: RunConfig):
    Omega = cfg.omega_natural
    if cfg.stiffness_harmonics:
        amps = [float(s) for s in cfg.stiffness_harmonics.split(",")]
        if cfg.scaled:
            amps = [scaled_to_natural("omega0_sq", amps[0], Omega)] + [
                scaled_to_natural("eps", a, Omega) for a in amps[1:]
            ]
        return GeneralCosine(Omega, tuple(amps))
    return Mathieu(cfg.natural("omega0_sq"), cfg.natural("eps"), Omega)


def _bath(cfg: RunConfig, gamma: float | None = None) -> BathSpec:
    return BathSpec(
        gamma=cfg.natural("gamma") if gamma is None else gamma,
        kT=cfg.natural("kt"),
        omega_D=cfg.natural("omega_d"),
    )


def _metadata(cfg: RunConfig, command: str) -> dict:
    meta = {"command": command, "version": __version__}
    meta.update({k: cfg.values[k] for k in sorted(cfg.values)})
    return meta


def _emit(cfg: RunConfig, command: str, columns: list[str], rows: list[list]) -> None:
    meta = _metadata(cfg, command)
    if cfg.values["format"] == "json":
        payload = {"metadata": meta, "columns": columns, "rows": rows}
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    else:
        lines = [f"# {k} = {meta[k]}" for k in sorted(meta)]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    if cfg.values["out"] == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.values["out"], "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_stability(cfg: RunConfig) -> None:
    Omega = cfg.omega_natural
    # ranges share the omega0_sq / eps unit kinds
    lo = scaled_to_natural("omega0_sq", cfg.omega0_sq_min, Omega) if cfg.scaled else cfg.omega0_sq_min
    hi = scaled_to_natural("omega0_sq", cfg.omega0_sq_max, Omega) if cfg.scaled else cfg.omega0_sq_max
    elo = scaled_to_natural("eps", cfg.eps_min, Omega) if cfg.scaled else cfg.eps_min
    ehi = scaled_to_natural("eps", cfg.eps_max, Omega) if cfg.scaled else cfg.eps_max
    points = stability_chart(
        (lo, hi), (elo, ehi), cfg.grid_n, cfg.natural("gamma"),
        Omega=Omega, tol=cfg.tol, n_max=cfg.n_max,
    )
    rows = []
    for p in points:
        rows.append([
            cfg.to_output("omega0_sq", p.omega0_sq),
            cfg.to_output("eps", p.eps),
            cfg.to_output("mu", p.mu_re) if math.isfinite(p.mu_re) else math.nan,
            cfg.to_output("mu", p.mu_im) if math.isfinite(p.mu_im) else math.nan,
            p.stable,
        ])
    _emit(cfg, "stability", ["omega0_sq", "eps", "mu_re", "mu_im", "stable"], rows)


def cmd_floquet(cfg: RunConfig) -> None:
    sol = solve_floquet(_stiffness(cfg), cfg.natural("gamma"), cfg.tol, cfg.n_max)
    rows = []
    for n, c in zip(range(-sol.n_max, sol.n_max + 1), np.asarray(sol.coeffs, dtype=complex)):
        rows.append([n, float(c.real), float(c.imag)])
    meta_cfg = RunConfig(dict(cfg.values))
    meta_cfg.values["mu_re"] = cfg.to_output("mu", sol.mu.real)
    meta_cfg.values["mu_im"] = cfg.to_output("mu", sol.mu.imag)
    meta_cfg.values["stable"] = sol.stable
    meta_cfg.values["residual"] = sol.residual
    _emit(meta_cfg, "floquet", ["n", "c_re", "c_im"], rows)


def cmd_diffusion_scan(cfg: RunConfig) -> None:
    Omega = cfg.omega_natural
    bath = _bath(cfg)
    n_pts = cfg.path_count
    o_start = scaled_to_natural("omega0_sq", cfg.path_omega0_sq_start, Omega) if cfg.scaled else cfg.path_omega0_sq_start
    o_end = scaled_to_natural("omega0_sq", cfg.path_omega0_sq_end, Omega) if cfg.scaled else cfg.path_omega0_sq_end
    e_start = scaled_to_natural("eps", cfg.path_eps_start, Omega) if cfg.scaled else cfg.path_eps_start
    e_end = scaled_to_natural("eps", cfg.path_eps_end, Omega) if cfg.scaled else cfg.path_eps_end
    rows = []
    denom = bath.m * bath.kT
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for s in np.linspace(0.0, 1.0, n_pts):
            om = o_start + s * (o_end - o_start)
            ep = e_start + s * (e_end - e_start)
            stiff = Mathieu(float(om), float(ep), Omega)
            sol0 = solve_floquet(stiff, 0.0, cfg.tol, cfg.n_max)
            d_imp = d_pp_improved(sol0, bath, allow_unstable=True)
            d_sim = d_pp_simple(bath, math.sqrt(om)) if om > 0 else math.nan
            rows.append([
                cfg.to_output("omega0_sq", float(om)),
                cfg.to_output("eps", float(ep)),
                d_sim / denom,
                d_imp / denom,
                sol0.stable,
            ])
    _emit(
        cfg, "diffusion-scan",
        ["omega0_sq", "eps", "d_pp_simple_over_mkt", "d_pp_improved_over_mkt", "valid"],
        rows,
    )


def _scheme_sets(cfg: RunConfig, sol, sol0, bath):
    out = {}
    for name in (s.strip() for s in cfg.schemes.split(",")):
        if name == "simple":
            out[name] = simple_diffusion(bath, sol.stiffness)
        elif name == "improved":
            out[name] = improved_diffusion(sol0, bath)
        elif name == "rwa":
            out[name] = rwa_diffusion(sol0, bath)
    return out


def cmd_variances(cfg: RunConfig) -> None:
    Omega = cfg.omega_natural
    stiff = _stiffness(cfg)
    gamma = cfg.natural("gamma")
    bath = _bath(cfg)
    sol = solve_floquet(stiff, gamma, cfg.tol, cfg.n_max)
    sol0 = solve_floquet(stiff, 0.0, cfg.tol, cfg.n_max)
    kernel = NoiseKernel(bath)
    sets = _scheme_sets(cfg, sol, sol0, bath)
    T = stiff.period
    t_start = scaled_to_natural("t", cfg.t_start, Omega) if cfg.scaled else cfg.t_start
    ts = t_start + np.arange(cfg.t_count) * T / cfg.t_count
    rows = []
    for t in ts:
        ora = exact_variances(sol, kernel, float(t), tol=min(cfg.tol * 100, 1e-6))
        for name, dset in sets.items():
            if name == "rwa":
                cv = rwa_asymptotic_covariance(sol0, bath, dset.n_occupation, float(t))
            else:
                cv = asymptotic_covariance(sol, dset, float(t), tol=cfg.tol)
            rows.append([
                cfg.to_output("t", float(t)),
                name,
                cfg.to_output("sigma_xx", cv.sigma_xx),
                cfg.to_output("sigma_xp", cv.sigma_xp),
                cfg.to_output("sigma_pp", cv.sigma_pp),
                cfg.to_output("sigma_xx", ora.sigma_xx),
                cfg.to_output("sigma_xp", ora.sigma_xp),
                cfg.to_output("sigma_pp", ora.sigma_pp),
                cv.sigma_xx / ora.sigma_xx,
            ])
    _emit(
        cfg, "variances",
        ["t", "scheme", "sigma_xx", "sigma_xp", "sigma_pp",
         "oracle_sigma_xx", "oracle_sigma_xp", "oracle_sigma_pp", "eta_xx"],
        rows,
    )


def cmd_gamma_sweep(cfg: RunConfig) -> None:
    Omega = cfg.omega_natural
    stiff = _stiffness(cfg)
    bath0 = _bath(cfg)
    sol0 = solve_floquet(stiff, 0.0, cfg.tol, cfg.n_max)
    gammas = []
    for part in cfg.gammas.split(","):
        g = float(part)
        gammas.append(scaled_to_natural("gamma", g, Omega) if cfg.scaled else g)
    T = stiff.period
    ts = np.arange(cfg.t_count) * T / cfg.t_count
    rows = []
    for g in gammas:
        bath = BathSpec(gamma=g, kT=bath0.kT, omega_D=bath0.omega_D, m=bath0.m, hbar=bath0.hbar)
        sol = solve_floquet(stiff, g, cfg.tol, cfg.n_max)
        kernel = NoiseKernel(bath)
        sets = _scheme_sets(cfg, sol, sol0, bath)
        ora_avg = float(np.mean([
            exact_variances(sol, kernel, float(t), tol=min(cfg.tol * 100, 1e-6)).sigma_xx
            for t in ts
        ]))
        for name, dset in sets.items():
            if name == "rwa":
                vals = [rwa_asymptotic_covariance(sol0, bath, dset.n_occupation, float(t)).sigma_xx for t in ts]
            else:
                vals = [asymptotic_covariance(sol, dset, float(t), tol=cfg.tol).sigma_xx for t in ts]
            avg = float(np.mean(vals))
            rows.append([
                cfg.to_output("gamma", g),
                name,
                cfg.to_output("sigma_xx", avg),
                cfg.to_output("sigma_xx", ora_avg),
                avg / ora_avg,
            ])
    _emit(
        cfg, "gamma-sweep",
        ["gamma", "scheme", "sigma_xx_avg", "oracle_sigma_xx_avg", "eta_xx_avg"],
        rows,
    )


def cmd_rwa_relax(cfg: RunConfig) -> None:
    stiff = _stiffness(cfg)
    gamma = cfg.natural("gamma")
    bath = _bath(cfg)
    sol0 = solve_floquet(stiff, 0.0, cfg.tol, cfg.n_max)
    dset = rwa_diffusion(sol0, bath)
    n_occ = dset.n_occupation if cfg.n_occupation < 0 else cfg.n_occupation
    t_max = cfg.t_max if cfg.t_max > 0 else 10.0 / gamma
    dt = cfg.dt if cfg.dt > 0 else 0.01 / gamma
    rho = FloquetDensityMatrix.level(cfg.alpha0, cfg.a_max)
    mean0 = rho.mean_level()
    n_out = cfg.t_count
    rows = []
    step = t_max / n_out
    t = 0.0
    rows.append([0.0, mean0, mean0, rho.trace(), float(rho.populations()[-1])])
    for _ in range(n_out):
        rho = rwa_density_propagate(rho, n_occ, gamma, step, dt)
        t += step
        pred = n_occ + (mean0 - n_occ) * math.exp(-gamma * t)
        rows.append([
            cfg.to_output("t", t),
            rho.mean_level(),
            pred,
            rho.trace(),
            float(rho.populations()[-1]),
        ])
    _emit(
        cfg, "rwa-relax",
        ["t", "mean_level", "mean_level_predicted", "trace", "top_population"],
        rows,
    )


def cmd_oracle(cfg: RunConfig) -> None:
    Omega = cfg.omega_natural
    stiff = _stiffness(cfg)
    gamma = cfg.natural("gamma")
    bath = _bath(cfg)
    sol = solve_floquet(stiff, gamma, cfg.tol, cfg.n_max)
    kernel = NoiseKernel(bath)
    T = stiff.period
    t_start = scaled_to_natural("t", cfg.t_start, Omega) if cfg.scaled else cfg.t_start
    ts = t_start + np.arange(cfg.t_count) * T / cfg.t_count
    rows = []
    for t in ts:
        cv = exact_variances(sol, kernel, float(t), tol=min(cfg.tol * 100, 1e-6))
        rows.append([
            cfg.to_output("t", float(t)),
            cfg.to_output("sigma_xx", cv.sigma_xx),
            cfg.to_output("sigma_xp", cv.sigma_xp),
            cfg.to_output("sigma_pp", cv.sigma_pp),
        ])
    _emit(cfg, "oracle", ["t", "sigma_xx", "sigma_xp", "sigma_pp"], rows)


_COMMANDS = {
    "stability": cmd_stability,
    "floquet": cmd_floquet,
    "diffusion-scan": cmd_diffusion_scan,
    "variances": cmd_variances,
    "gamma-sweep": cmd_gamma_sweep,
    "rwa-relax": cmd_rwa_relax,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="paramosc",
        description="Markovian dynamics of the parametrically driven, damped oscillator",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument("--out", help="output path ('-' for stdout)")
    parser.add_argument("--units", choices=["natural", "scaled"])
    parser.add_argument("--tol", type=float)
    args = parser.parse_args(argv)

    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ParamOscError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
