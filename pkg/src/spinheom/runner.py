"""Configuration handling, single runs, parameter sweeps and verification.

Configs are flat ``key = value`` text files ('#' starts a comment) mirrored
one-to-one by command-line overrides, so a run is reproducible from either.
Each run writes one CSV trajectory; sweeps write one CSV per value plus a
summary with extracted features (first vanishing time of the eigenvalue
squeezing measure, revival count of the rescaled concurrence).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .bath import BathSpectrum, build_expansion
from .ensemble import correlators_to_matrix, twisted_correlators
from .errors import ConfigError, NumericsError
from .hierarchy import SystemModel, build_layout, initialize_state
from .observables import SqueezingSample, evaluate_sample
from .propagate import IntegrationConfig, TrajectoryPoint, integrate

__all__ = [
    "SimulationConfig",
    "CONFIG_FIELDS",
    "parse_config_file",
    "build_config",
    "simulate",
    "write_trajectory_csv",
    "run_single",
    "run_sweep",
    "first_vanishing_time",
    "revival_count",
    "verify_all",
    "CSV_HEADER",
]

# Config-file key -> (python type, default).  None means "derived later".
CONFIG_FIELDS: dict[str, tuple[type, object]] = {
    "omega0": (float, 1.0),
    "lambda": (float, 0.03),
    "gamma": (float, 0.15),
    "beta": (float, 4.0),
    "N": (int, 10),
    "theta": (float, math.pi / 10),
    "matsubara_terms": (int, 2),
    "hierarchy_depth": (int, 6),
    "coupling_axis": (str, "x"),
    "dt": (float, None),
    "t_max": (float, 60.0),
    "sample_stride": (int, 10),
    "error_check_stride": (int, 50),
    "output_path": (str, None),
}

CSV_HEADER = ("t,zeta_ku_sq,zeta_t_sq,xi_ku_sq,xi_t_sq,varsigma_sq,concurrence,"
              "c_r,sigma_z,sigma_zz,y,u_re,u_im,sigma_dot,trace_err,herm_err,"
              "parity_err,step_err")

DEFAULT_BETA_SWEEP = (4.0, 3.0, 2.5, 2.0, 1.0, 0.5)
DEFAULT_N_SWEEP = (10, 20)


@dataclass(frozen=True)
class SimulationConfig:
    omega0: float = 1.0
    lam: float = 0.03
    gamma: float = 0.15
    beta: float = 4.0
    n_spins: int = 10
    theta: float = math.pi / 10
    matsubara_terms: int = 2
    hierarchy_depth: int = 6
    coupling_axis: str = "x"
    dt: float | None = None
    t_max: float = 60.0
    sample_stride: int = 10
    error_check_stride: int = 50
    output_path: str | None = None


_ATTR_FOR_KEY = {
    "omega0": "omega0", "lambda": "lam", "gamma": "gamma", "beta": "beta",
    "N": "n_spins", "theta": "theta", "matsubara_terms": "matsubara_terms",
    "hierarchy_depth": "hierarchy_depth", "coupling_axis": "coupling_axis",
    "dt": "dt", "t_max": "t_max", "sample_stride": "sample_stride",
    "error_check_stride": "error_check_stride", "output_path": "output_path",
}


def coerce_value(key: str, raw: str):
    """Parse one raw config value according to its declared type."""
    if key not in CONFIG_FIELDS:
        raise ConfigError(f"unknown configuration key {key!r}")
    typ, _ = CONFIG_FIELDS[key]
    try:
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return str(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None


def parse_config_file(path: str | os.PathLike) -> dict[str, object]:
    """Read a flat key = value file into a typed mapping."""
    values: dict[str, object] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        values[key] = coerce_value(key, raw)
    return values


def build_config(values: dict[str, object]) -> SimulationConfig:
    """Validate a typed mapping and produce a run configuration."""
    unknown = set(values) - set(CONFIG_FIELDS)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    kwargs = {}
    for key, (_, default) in CONFIG_FIELDS.items():
        kwargs[_ATTR_FOR_KEY[key]] = values.get(key, default)
    cfg = SimulationConfig(**kwargs)
    _validate(cfg)
    return cfg


def _validate(cfg: SimulationConfig) -> None:
    if cfg.omega0 <= 0 or cfg.gamma <= 0 or cfg.beta <= 0:
        raise ConfigError("omega0, gamma and beta must all be positive")
    if cfg.lam < 0:
        raise ConfigError("lambda must be >= 0")
    if cfg.n_spins < 2:
        raise ConfigError(f"N must be >= 2 for a pair reduction, got {cfg.n_spins}")
    if cfg.matsubara_terms < 0 or cfg.hierarchy_depth < 0:
        raise ConfigError("matsubara_terms and hierarchy_depth must be >= 0")
    if cfg.coupling_axis not in ("x", "z"):
        raise ConfigError(f"coupling_axis must be 'x' or 'z', got {cfg.coupling_axis!r}")
    if cfg.t_max <= 0:
        raise ConfigError("t_max must be positive")
    if cfg.dt is not None and cfg.dt <= 0:
        raise ConfigError("dt must be positive when given")
    if cfg.sample_stride < 1 or cfg.error_check_stride < 1:
        raise ConfigError("strides must be >= 1")


def resolve_dt(cfg: SimulationConfig, nu_max: float) -> float:
    """Pick the step: the user's if set, otherwise the largest step that
    resolves the fastest rate, snapped so the horizon is a whole number of
    steps."""
    if cfg.dt is not None:
        return cfg.dt
    dt_raw = min(0.01 / cfg.omega0, 0.1 / max(cfg.omega0, nu_max))
    n = max(1, math.ceil(cfg.t_max / dt_raw))
    return cfg.t_max / n


def simulate(cfg: SimulationConfig) -> tuple[list[TrajectoryPoint], list[SqueezingSample]]:
    """Integrate one configuration and evaluate all observables."""
    try:
        spec = BathSpectrum(cfg.lam, cfg.gamma, cfg.beta)
        expansion = build_expansion(spec, cfg.matsubara_terms)
        model = SystemModel(cfg.omega0, 2, cfg.coupling_axis)
        layout = build_layout(cfg.matsubara_terms, cfg.hierarchy_depth, n_baths=2)
        rho0 = correlators_to_matrix(twisted_correlators(cfg.n_spins, cfg.theta))
        ados = initialize_state(layout, rho0)
        icfg = IntegrationConfig(
            dt=resolve_dt(cfg, float(expansion.nu[-1])),
            t_max=cfg.t_max,
            sample_stride=cfg.sample_stride,
            error_check_stride=cfg.error_check_stride,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    points = integrate(ados, model, expansion, layout, icfg)
    try:
        samples = [evaluate_sample(p.t, p.rho, cfg.n_spins) for p in points]
    except ValueError as exc:
        raise NumericsError(str(exc)) from None
    return points, samples


def write_trajectory_csv(path: str | os.PathLike,
                         points: list[TrajectoryPoint],
                         samples: list[SqueezingSample]) -> None:
    """Write one row per sample; floats carry 12 significant digits."""
    def fmt(x: float) -> str:
        return f"{x:.12g}"

    lines = [CSV_HEADER]
    for p, s in zip(points, samples):
        c = s.correlators
        lines.append(",".join(fmt(x) for x in (
            s.t, s.zeta_ku_sq, s.zeta_t_sq, s.xi_ku_sq, s.xi_t_sq,
            s.varsigma_sq, s.concurrence, s.c_r, c.sz, c.szz, c.y,
            c.u.real, c.u.imag, s.sigma_dot, p.trace_err, p.herm_err,
            s.parity_err, p.step_err,
        )))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_single(cfg: SimulationConfig, make_plot: bool = True) -> Path:
    """Full pipeline for one configuration; returns the CSV path."""
    out = Path(cfg.output_path or "trajectory.csv")
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    points, samples = simulate(cfg)
    write_trajectory_csv(out, points, samples)
    if make_plot:
        from .plots import trajectory_figure
        data = read_trajectory_csv(out)
        trajectory_figure(data, out.with_suffix(".png"),
                          title=f"N={cfg.n_spins}, beta={cfg.beta:g}")
    return out


def read_trajectory_csv(path: str | os.PathLike) -> np.ndarray:
    """Load a trajectory CSV as a named record array."""
    return np.genfromtxt(path, delimiter=",", names=True)


# ---------------------------------------------------------------------------
# feature extraction

def first_vanishing_time(t: np.ndarray, values: np.ndarray,
                         threshold: float = 1e-4) -> float:
    """Time of the first sample below ``threshold``; NaN if none."""
    below = np.nonzero(np.asarray(values) < threshold)[0]
    return float(np.asarray(t)[below[0]]) if below.size else math.nan


def revival_count(values: np.ndarray, low: float = 1e-4, high: float = 2e-4) -> int:
    """Number of revivals: excursions back above ``high`` after having
    dropped below ``low`` (hysteresis keeps threshold chatter out)."""
    values = np.asarray(values)
    alive = bool(values[0] >= low)
    count = 0
    for x in values[1:]:
        if alive and x < low:
            alive = False
        elif not alive and x > high:
            alive = True
            count += 1
    return count


# ---------------------------------------------------------------------------
# sweeps

def _sweep_job(args: tuple[SimulationConfig, str]) -> str:
    cfg, out_path = args
    points, samples = simulate(cfg)
    write_trajectory_csv(out_path, points, samples)
    return out_path


def _worker_cap(n_jobs: int) -> int:
    cap = os.cpu_count() or 1
    env = os.environ.get("HEOM_THREADS")
    if env:
        try:
            cap = min(cap, max(1, int(env)))
        except ValueError:
            raise ConfigError(f"HEOM_THREADS must be an integer, got {env!r}") from None
    return max(1, min(n_jobs, cap))


def run_sweep(cfg: SimulationConfig, axis: str, values, make_plot: bool = True) -> Path:
    """Run one simulation per value of ``axis`` ('beta' or 'N'), write the
    per-run CSVs and a feature summary; returns the output directory."""
    if axis not in ("beta", "N"):
        raise ConfigError(f"sweep axis must be 'beta' or 'N', got {axis!r}")
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value")

    outdir = Path(cfg.output_path or "sweep_out")
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = []
    for value in values:
        if axis == "beta":
            member = replace(cfg, beta=float(value), output_path=None)
        else:
            if float(value) != int(value):
                raise ConfigError(f"N sweep values must be integers, got {value!r}")
            member = replace(cfg, n_spins=int(value), output_path=None)
        _validate(member)
        jobs.append((member, str(outdir / f"{axis}_{float(value):g}.csv")))

    workers = _worker_cap(len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            paths = list(pool.map(_sweep_job, jobs))
    else:
        paths = [_sweep_job(job) for job in jobs]

    summary_lines = [f"{axis},csv,zeta_t_first_vanishing,cr_revival_count"]
    curves = []
    for value, path in zip(values, paths):
        data = read_trajectory_csv(path)
        vanish = first_vanishing_time(data["t"], data["zeta_t_sq"])
        revs = revival_count(data["c_r"])
        summary_lines.append(f"{float(value):g},{Path(path).name},{vanish:.12g},{revs}")
        curves.append((f"{axis}={float(value):g}", data))
    (outdir / "summary.csv").write_text("\n".join(summary_lines) + "\n", encoding="utf-8")

    if make_plot:
        from .plots import sweep_figure, trajectory_figure
        for (label, data), path in zip(curves, paths):
            trajectory_figure(data, Path(path).with_suffix(".png"), title=label)
        sweep_figure(curves, outdir / "sweep_overview.png")
    return outdir


# ---------------------------------------------------------------------------
# verification battery

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def verify_all(seed: int = 7) -> list[CheckResult]:
    """Run the independent-reference battery and return one pass/fail
    record per check (the CLI prints them one per line)."""
    from .observables import concurrence_x, xi_ku_squared, xi_t_squared
    from .oracles import (
        brute_force_twisted,
        partial_trace_identity_check,
        reduction_theorem_check,
    )

    results: list[CheckResult] = []
    rng = np.random.default_rng(seed)

    worst = max(partial_trace_identity_check(rng) for _ in range(100))
    results.append(CheckResult(
        "partial-trace identity (100 random tuples)", worst < 1e-12,
        f"max deviation {worst:.3e} (tolerance 1e-12)"))

    devs = [reduction_theorem_check(rng, fock_cutoff=4),
            reduction_theorem_check(rng, fock_cutoff=5),
            reduction_theorem_check(rng, fock_cutoff=5, entangled_system=True)]
    results.append(CheckResult(
        "pair reduction of the three-qubit model", max(devs) < 1e-9,
        f"max deviation {max(devs):.3e} (tolerance 1e-9)"))

    worst = 0.0
    for n in (2, 6, 10):
        for theta in (0.1, math.pi / 10, 1.0):
            ref = brute_force_twisted(n, theta)
            corr = twisted_correlators(n, theta)
            rho = correlators_to_matrix(corr)
            worst = max(
                worst,
                abs(ref.sz - corr.sz), abs(ref.szz - corr.szz),
                abs(ref.y - corr.y), abs(ref.u - corr.u),
                abs(ref.xi_ku_sq - xi_ku_squared(corr, n)),
                abs(ref.xi_t_sq - xi_t_squared(corr, n)),
                abs(ref.concurrence - concurrence_x(rho)),
            )
    results.append(CheckResult(
        "pair formulas vs statevector reference", worst < 1e-10,
        f"max deviation {worst:.3e} (tolerance 1e-10)"))

    ref = brute_force_twisted(10, math.pi / 10)
    corr = twisted_correlators(10, math.pi / 10)
    zeta0 = 1.0 - xi_ku_squared(corr, 10)
    zeta0_t = 1.0 - xi_t_squared(corr, 10)
    cr0 = 9.0 * concurrence_x(correlators_to_matrix(corr))
    coincidence = max(abs(zeta0 - zeta0_t), abs(zeta0 - cr0),
                      abs(zeta0 - (1.0 - ref.xi_ku_sq)))
    results.append(CheckResult(
        "initial coincidence of squeezing and rescaled concurrence",
        coincidence < 1e-10, f"max spread {coincidence:.3e} (tolerance 1e-10)"))

    results.append(_verify_dephasing())

    try:
        brute_force_twisted(13, 0.1)
        results.append(CheckResult("statevector size guard", False,
                                   "13 spins was not rejected"))
    except ValueError:
        results.append(CheckResult("statevector size guard", True,
                                   "13 spins rejected as oversized"))
    return results


def _verify_dephasing() -> CheckResult:
    from .hierarchy import HeomOperator
    from .oracles import dephasing_envelope

    spec = BathSpectrum(0.03, 0.15, 4.0)
    expansion = build_expansion(spec, 2)
    model = SystemModel(1.0, 1, "z")
    layout = build_layout(2, 14, n_baths=1)
    rho0 = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    cfg = IntegrationConfig(dt=0.01, t_max=20.0, sample_stride=20, error_check_stride=100)

    points = integrate(initialize_state(layout, rho0), model, expansion, layout, cfg)
    t = np.array([p.t for p in points])
    coherence = np.array([abs(p.rho[0, 1]) for p in points]) / 0.5
    envelope = dephasing_envelope(build_expansion(spec, 5000), t)
    err_on = float(np.max(np.abs(coherence - envelope) / envelope))

    op_off = HeomOperator(model, expansion, layout, include_terminator=False)
    points_off = integrate(initialize_state(layout, rho0), model, expansion, layout,
                           cfg, operator=op_off)
    coherence_off = np.array([abs(p.rho[0, 1]) for p in points_off]) / 0.5
    factored = coherence_off * np.exp(-4.0 * expansion.delta.real * t)
    err_split = float(np.max(np.abs(coherence - factored) / factored))

    passed = err_on < 1e-3 and err_split < 1e-6
    return CheckResult(
        "single-qubit dephasing envelope",
        passed,
        f"relative error {err_on:.3e} vs exact envelope (tolerance 1e-3); "
        f"tail-coefficient factorization error {err_split:.3e} (tolerance 1e-6)",
    )
