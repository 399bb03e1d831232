"""Initial state of the twisted spin ensemble, reduced to one pair.

An exchange-symmetric ensemble with the mean spin pinned to the z axis is
fully described, at the two-spin level, by four numbers: <s1z>, <s1z s2z>,
the exchange coherence y = <s1+ s2->, and the double-flip coherence
u = <s1- s2->.  The pair density matrix built from them is block diagonal
in the pair basis {|00>,|11>,|01>,|10>} (an X state).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PairCorrelators",
    "twisted_correlators",
    "correlators_to_matrix",
    "matrix_to_correlators",
]

log = logging.getLogger(__name__)

_CROSS_BLOCK_TOL = 1e-8


@dataclass(frozen=True)
class PairCorrelators:
    """The four pair expectations that determine an X-form pair state."""

    sz: float
    szz: float
    y: float
    u: complex

    @property
    def v_plus(self) -> float:
        return (1.0 + 2.0 * self.sz + self.szz) / 4.0

    @property
    def v_minus(self) -> float:
        return (1.0 - 2.0 * self.sz + self.szz) / 4.0

    @property
    def w(self) -> float:
        return (1.0 - self.szz) / 4.0


def _signed_power(base: float, exponent: int) -> float:
    # cos**n for n up to hundreds must not underflow pairwise; go through
    # exp(n*log|cos|) and restore the sign for odd exponents.
    if exponent == 0:
        return 1.0
    if base == 0.0:
        return 0.0
    sign = -1.0 if (base < 0.0 and exponent % 2) else 1.0
    return sign * math.exp(exponent * math.log(abs(base)))


def twisted_correlators(n_spins: int, theta: float) -> PairCorrelators:
    """Closed-form pair correlators of the one-axis-twisted coherent state.

    The state is exp(-i*theta*Jx^2/2) applied to all spins down; at theta=0
    it reduces to the product state with sz=-1.
    """
    if n_spins < 2:
        raise ValueError(f"need at least 2 spins, got {n_spins}")
    c_half = math.cos(0.5 * theta)
    cn2 = _signed_power(math.cos(theta), n_spins - 2)
    cn2_half = _signed_power(c_half, n_spins - 2)
    sz = -_signed_power(c_half, n_spins - 1)
    szz = 0.5 * (1.0 + cn2)
    y = (1.0 - cn2) / 8.0
    u = complex(-(1.0 - cn2) / 8.0, -0.5 * math.sin(0.5 * theta) * cn2_half)
    return PairCorrelators(sz=sz, szz=szz, y=y, u=u)


def correlators_to_matrix(corr: PairCorrelators, atol: float = 1e-10) -> np.ndarray:
    """Assemble the pair-basis X matrix; the trace is 1 by construction.

    Raises ``ValueError`` when the correlators imply a block eigenvalue
    below ``-atol`` (unphysical input).
    """
    v_p, v_m, w = corr.v_plus, corr.v_minus, corr.w
    half_gap = 0.5 * (v_p - v_m)
    radius = math.hypot(half_gap, abs(corr.u))
    eig_min = min(0.5 * (v_p + v_m) - radius, w - abs(corr.y))
    if eig_min < -atol:
        raise ValueError(
            f"correlators describe an unphysical pair state (eigenvalue {eig_min:.3e})"
        )
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = v_p
    rho[1, 1] = v_m
    rho[1, 0] = corr.u
    rho[0, 1] = np.conj(corr.u)
    rho[2, 2] = rho[3, 3] = w
    rho[2, 3] = rho[3, 2] = corr.y
    return rho


def matrix_to_correlators(rho: np.ndarray, leak_tol: float = _CROSS_BLOCK_TOL) -> PairCorrelators:
    """Read the pair correlators back off a pair-basis density matrix.

    The exchange coherence is read symmetrized, y = (rho_23 + rho_32*)/2,
    and only its real part is returned; the imaginary part is an exchange
    diagnostic picked up separately.  Entries coupling the {00,11} block to
    the {01,10} block should stay zero along valid trajectories; leakage
    above ``leak_tol`` is logged as a warning because it signals loss of
    parity or exchange symmetry.
    """
    rho = np.asarray(rho)
    leak = cross_block_leakage(rho)
    if leak > leak_tol:
        log.warning(
            "pair state leaks %.3e across the parity blocks; "
            "parity/exchange symmetry has degraded", leak,
        )
    sz = float((rho[0, 0] - rho[1, 1] + rho[2, 2] - rho[3, 3]).real)
    szz = float((rho[0, 0] + rho[1, 1] - rho[2, 2] - rho[3, 3]).real)
    y = float((0.5 * (rho[2, 3] + np.conj(rho[3, 2]))).real)
    return PairCorrelators(sz=sz, szz=szz, y=y, u=complex(rho[1, 0]))


def cross_block_leakage(rho: np.ndarray) -> float:
    """Largest entry connecting the even and odd parity blocks."""
    rho = np.asarray(rho)
    return float(max(np.max(np.abs(rho[:2, 2:])), np.max(np.abs(rho[2:, :2]))))
