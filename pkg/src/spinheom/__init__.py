"""Exact non-Markovian dynamics of spin squeezing and pairwise entanglement
for an ensemble of independent qubits, reduced to a two-qubit hierarchy
integration with Drude-Lorentz baths."""

from .bath import BathSpectrum, MatsubaraExpansion, build_expansion, correlation_function, spectral_density
from .ensemble import PairCorrelators, correlators_to_matrix, matrix_to_correlators, twisted_correlators
from .errors import ConfigError, NumericsError
from .hierarchy import HeomOperator, HierarchyLayout, SystemModel, build_layout, heom_rhs, initialize_state
from .observables import (
    SqueezingSample,
    concurrence_wootters,
    concurrence_x,
    evaluate_sample,
    varsigma_squared,
    xi_ku_squared,
    xi_t_squared,
    zeta_squared,
)
from .propagate import IntegrationConfig, TrajectoryPoint, integrate
from .runner import SimulationConfig, build_config, run_single, run_sweep, simulate

__version__ = "0.1.0"

__all__ = [
    "BathSpectrum",
    "MatsubaraExpansion",
    "build_expansion",
    "correlation_function",
    "spectral_density",
    "PairCorrelators",
    "twisted_correlators",
    "correlators_to_matrix",
    "matrix_to_correlators",
    "SystemModel",
    "HierarchyLayout",
    "build_layout",
    "initialize_state",
    "HeomOperator",
    "heom_rhs",
    "IntegrationConfig",
    "TrajectoryPoint",
    "integrate",
    "SqueezingSample",
    "xi_ku_squared",
    "xi_t_squared",
    "varsigma_squared",
    "zeta_squared",
    "concurrence_x",
    "concurrence_wootters",
    "evaluate_sample",
    "SimulationConfig",
    "build_config",
    "simulate",
    "run_single",
    "run_sweep",
    "ConfigError",
    "NumericsError",
    "__version__",
]
