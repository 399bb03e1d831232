"""Squeezing parameters and pairwise concurrence from pair correlators.

With the mean spin along z and exchange symmetry intact, the two collective
squeezing parameters reduce to functions of the pair correlators:

    xi_KU^2 = 1 + 2(N-1) (y - |u|)
    xi_T^2  = min(xi_KU^2, varsigma^2) / [ (1 - 1/N) <s1.s2> + 1/N ]
    varsigma^2 = 1 + (N-1) (<s1z s2z> - <s1z>^2)

with <s1.s2> = 4y + <s1z s2z>.  Squeezing is reported as
zeta^2 = max(0, 1 - xi^2) so that zero means "none".  Pairwise entanglement
is the Wootters concurrence; for block-diagonal (X) states it has a closed
form, kept here alongside the general eigenvalue route so each can check
the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import PairCorrelators, matrix_to_correlators
from .qops import IDENTITY_2, SIGMA_X, SIGMA_Y, pair_op

__all__ = [
    "SqueezingSample",
    "xi_ku_squared",
    "xi_t_squared",
    "varsigma_squared",
    "zeta_squared",
    "concurrence_x",
    "concurrence_wootters",
    "evaluate_sample",
]

_SX1 = pair_op(SIGMA_X, IDENTITY_2)
_SY1 = pair_op(SIGMA_Y, IDENTITY_2)
_YY = pair_op(SIGMA_Y, SIGMA_Y).real


@dataclass(frozen=True)
class SqueezingSample:
    """One trajectory row: squeezing, concurrence and symmetry diagnostics."""

    t: float
    xi_ku_sq: float
    xi_t_sq: float
    varsigma_sq: float
    zeta_ku_sq: float
    zeta_t_sq: float
    concurrence: float
    c_r: float
    sigma_dot: float
    parity_err: float
    correlators: PairCorrelators


def xi_ku_squared(corr: PairCorrelators, n_spins: int) -> float:
    """Minimal-transverse-variance squeezing parameter, pair form."""
    if n_spins < 2:
        raise ValueError(f"need at least 2 spins, got {n_spins}")
    return 1.0 + 2.0 * (n_spins - 1) * (corr.y - abs(corr.u))

def varsigma_squared(corr: PairCorrelators, n_spins: int) -> float:
    """z-variance branch entering the eigenvalue-criterion parameter."""
    return 1.0 + (n_spins - 1) * (corr.szz - corr.sz**2)


def xi_t_squared(corr: PairCorrelators, n_spins: int) -> float:
    """Eigenvalue-criterion squeezing parameter, pair form.

    Raises ``ValueError`` when the denominator (1-1/N)<s1.s2> + 1/N is not
    positive: the state has left the domain where the reduced formula holds.
    """
    sigma_dot = 4.0 * corr.y + corr.szz
    den = (1.0 - 1.0 / n_spins) * sigma_dot + 1.0 / n_spins
    if den <= 0.0:
        raise ValueError(
            f"squeezing denominator {den:.6e} <= 0 (<s1.s2> = {sigma_dot:.6e}); "
            "the reduced squeezing formula no longer applies"
        )
    return min(xi_ku_squared(corr, n_spins), varsigma_squared(corr, n_spins)) / den


def zeta_squared(xi_sq: float) -> float:
    """Clamped squeezing measure max(0, 1 - xi^2)."""
    return max(0.0, 1.0 - xi_sq)


def concurrence_x(rho: np.ndarray) -> float:
    """Concurrence of a pair-basis X state, by the closed form.

    For the block shape [[v+, u*],[u, v-]] (+) [[w, y],[y, w]] the Wootters
    eigenvalues come in the pairs sqrt(v+ v-) +/- |u| and w +/- |y|, giving

        C = 2 max(0, |u| - w, |y| - sqrt(v+ v-)).
    """
    rho = np.asarray(rho)
    v_p = float(rho[0, 0].real)
    v_m = float(rho[1, 1].real)
    w = 0.5 * float((rho[2, 2] + rho[3, 3]).real)
    y = abs(0.5 * (rho[2, 3] + np.conj(rho[3, 2])))
    u = abs(rho[1, 0])
    return 2.0 * max(0.0, u - w, y - math.sqrt(max(v_p * v_m, 0.0)))


def concurrence_wootters(rho: np.ndarray, neg_tol: float = 1e-10) -> float:
    """Concurrence of any pair-basis two-qubit state via the spin-flip
    spectrum.

    The decreasing square roots of the eigenvalues of rho rho~ equal the
    singular values of sqrt(rho) YY conj(sqrt(rho)), which a Hermitian
    eigensolve plus an SVD delivers at full precision even for repeated
    zero roots.  Eigenvalues of rho above ``-neg_tol`` are clamped to zero
    before the square root; anything more negative raises, since the input
    was not a density matrix.
    """
    rho = np.asarray(rho, dtype=complex)
    evals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if evals.min() < -neg_tol:
        raise ValueError(
            f"state has eigenvalue {evals.min():.3e}; "
            "input is not a physical density matrix"
        )
    sqrt_rho = (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ vecs.conj().T
    lam = np.linalg.svd(sqrt_rho @ _YY @ sqrt_rho.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def evaluate_sample(t: float, rho: np.ndarray, n_spins: int) -> SqueezingSample:
    """Compute every reported observable for one sampled pair state."""
    rho = np.asarray(rho)
    corr = matrix_to_correlators(rho)
    xi_ku = xi_ku_squared(corr, n_spins)
    varsigma = varsigma_squared(corr, n_spins)
    xi_t = xi_t_squared(corr, n_spins)
    conc = concurrence_x(rho)
    sx = float(np.trace(rho @ _SX1).real)
    sy = float(np.trace(rho @ _SY1).real)
    y_imag = float((0.5 * (rho[2, 3] + np.conj(rho[3, 2]))).imag)
    return SqueezingSample(
        t=float(t),
        xi_ku_sq=xi_ku,
        xi_t_sq=xi_t,
        varsigma_sq=varsigma,
        zeta_ku_sq=zeta_squared(xi_ku),
        zeta_t_sq=zeta_squared(xi_t),
        concurrence=conc,
        c_r=(n_spins - 1) * conc,
        sigma_dot=4.0 * corr.y + corr.szz,
        parity_err=max(abs(sx), abs(sy), abs(y_imag)),
        correlators=corr,
    )
