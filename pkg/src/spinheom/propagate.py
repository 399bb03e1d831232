"""Fixed-step time integration of the auxiliary stack.

Classical fourth-order Runge-Kutta.  Fixed steps keep trajectories
deterministic and directly comparable across runs; error control is
diagnostic only, via periodic step-doubling comparisons on the physical
(tier-0) matrix.  The doubled half-steps never feed back into the
trajectory, so the integrated path is independent of the check cadence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import MatsubaraExpansion
from .errors import ConfigError, NumericsError
from .hierarchy import HeomOperator, HierarchyLayout, SystemModel

__all__ = ["IntegrationConfig", "TrajectoryPoint", "integrate"]


@dataclass(frozen=True)
class IntegrationConfig:
    """Step size, horizon and sampling/diagnostic cadence."""

    dt: float
    t_max: float
    sample_stride: int = 10
    error_check_stride: int = 50
    max_step_err: float = 1e-6

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt!r}")
        if self.t_max <= 0.0:
            raise ConfigError(f"t_max must be positive, got {self.t_max!r}")
        if self.sample_stride < 1 or self.error_check_stride < 1:
            raise ConfigError("strides must be >= 1")
        if self.max_step_err <= 0.0:
            raise ConfigError("step error ceiling must be positive")


@dataclass(frozen=True)
class TrajectoryPoint:
    """Sampled physical state plus integration diagnostics."""

    t: float
    rho: np.ndarray
    trace_err: float
    herm_err: float
    step_err: float


def _rk4_step(rhs, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + (0.5 * dt) * k1)
    k3 = rhs(y + (0.5 * dt) * k2)
    k4 = rhs(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def _point(t: float, ados: np.ndarray, step_err: float) -> TrajectoryPoint:
    if not np.all(np.isfinite(ados.view(np.float64))):
        raise NumericsError(f"non-finite auxiliary matrix entries at t = {t:g}")
    rho = ados[0].copy()
    trace_err = abs(complex(np.trace(rho)) - 1.0)
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    return TrajectoryPoint(t=t, rho=rho, trace_err=trace_err,
                           herm_err=herm_err, step_err=step_err)


def integrate(ados0: np.ndarray, model: SystemModel, expansion: MatsubaraExpansion,
              layout: HierarchyLayout, cfg: IntegrationConfig,
              operator: HeomOperator | None = None) -> list[TrajectoryPoint]:
    """March the stack to ``t_max`` and return the sampled trajectory.

    The step must resolve the fastest rate in the problem
    (dt <= 0.1 / max(omega0, nu_max)).  Aborts with ``NumericsError`` if any
    entry turns non-finite or a step-doubling estimate exceeds the ceiling.
    """
    op = operator if operator is not None else HeomOperator(model, expansion, layout)
    fastest = max(model.omega0, float(expansion.nu[-1]))
    if cfg.dt > 0.1 / fastest * (1.0 + 1e-12):
        raise ConfigError(
            f"dt = {cfg.dt:g} does not resolve the fastest rate {fastest:g}; "
            f"need dt <= {0.1 / fastest:.6g}"
        )
    n_steps = int(round(cfg.t_max / cfg.dt))
    if n_steps < 1:
        raise ConfigError(f"t_max = {cfg.t_max:g} is shorter than one step")

    y = np.array(ados0, dtype=complex, copy=True)
    step_err = 0.0
    points = [_point(0.0, y, step_err)]
    for step in range(n_steps):
        if step % cfg.error_check_stride == 0:
            y_next = _rk4_step(op.rhs, y, cfg.dt)
            y_half = _rk4_step(op.rhs, _rk4_step(op.rhs, y, 0.5 * cfg.dt), 0.5 * cfg.dt)
            step_err = float(np.max(np.abs(y_next[0] - y_half[0])))
            if not np.isfinite(step_err) or step_err > cfg.max_step_err:
                raise NumericsError(
                    f"step-doubling error {step_err:.3e} at t = {step * cfg.dt:g} "
                    f"exceeds the ceiling {cfg.max_step_err:g}"
                )
            y = y_next
        else:
            y = _rk4_step(op.rhs, y, cfg.dt)
        k = step + 1
        if k % cfg.sample_stride == 0 or k == n_steps:
            points.append(_point(k * cfg.dt, y, step_err))
    return points
