"""Drude-Lorentz bath: spectral density and the exponential expansion of its
correlation function.

The spectral density is J(w) = (2/pi) * w * lam * gamma / (w**2 + gamma**2)
with coupling strength ``lam`` and width ``gamma``.  For t >= 0 the bath
correlation function expands as

    C(t) = sum_{n=0..M} c_n * exp(-nu_n * t),

where nu_0 = gamma carries the spectral pole and nu_k = 2*pi*k/beta are the
thermal (Matsubara) frequencies.  Truncating the series at M terms leaves a
fast-decaying tail; its Markovian weight

    delta = 2*lam/(beta*gamma) - i*lam - sum_{k<=M} c_k / nu_k

is kept as a correction coefficient and applied on the diagonal of the
hierarchy.  ``delta`` is real because the imaginary part of c_0/nu_0 cancels
the -i*lam term exactly, and it shrinks to zero as M grows.

All quantities are in units where the qubit frequency, hbar and k_B are 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BathSpectrum",
    "MatsubaraExpansion",
    "spectral_density",
    "build_expansion",
    "correlation_function",
]

# Relative half-width of the rejection window around beta*gamma = 2*pi*k.
_RESONANCE_RTOL = 1e-9


@dataclass(frozen=True)
class BathSpectrum:
    """Parameters of the Drude-Lorentz spectral density.

    ``lam`` may be zero, which decouples the system from the bath; the
    expansion then consists of vanishing coefficients.
    """

    lam: float
    gamma: float
    beta: float

    def __post_init__(self):
        if self.lam < 0.0:
            raise ValueError(f"coupling strength must be >= 0, got {self.lam!r}")
        if self.gamma <= 0.0:
            raise ValueError(f"spectral width must be positive, got {self.gamma!r}")
        if self.beta <= 0.0:
            raise ValueError(f"inverse temperature must be positive, got {self.beta!r}")


@dataclass(frozen=True)
class MatsubaraExpansion:
    """Exponential expansion C(t) = sum c_n exp(-nu_n t) truncated at
    ``n_terms`` thermal frequencies, plus the tail coefficient ``delta``."""

    n_terms: int
    nu: np.ndarray
    c: np.ndarray
    delta: complex


def spectral_density(omega, spec: BathSpectrum):
    """J(w) = (2/pi) w lam gamma / (w^2 + gamma^2); odd in w, finite everywhere."""
    omega = np.asarray(omega, dtype=float)
    value = (2.0 / np.pi) * omega * spec.lam * spec.gamma / (omega**2 + spec.gamma**2)
    return value if value.ndim else float(value)


def build_expansion(spec: BathSpectrum, n_terms: int) -> MatsubaraExpansion:
    """Compute frequencies, coefficients and the tail coefficient.

    Raises
    ------
    ValueError
        If ``beta*gamma`` sits on 2*pi*k for some integer k >= 1.  There
        cot(beta*gamma/2) diverges and, when k <= n_terms, the k-th
        coefficient is singular (nu_k = gamma).  These are configuration
        errors, not states to regularize.
    """
    if n_terms < 0:
        raise ValueError(f"number of expansion terms must be >= 0, got {n_terms}")
    bg = spec.beta * spec.gamma
    k_near = round(bg / (2.0 * np.pi))
    if k_near >= 1 and abs(bg - 2.0 * np.pi * k_near) <= _RESONANCE_RTOL * bg:
        raise ValueError(
            f"beta*gamma = {bg:g} lies on the resonance 2*pi*{k_near}: "
            "cot(beta*gamma/2) diverges and the matching thermal frequency "
            "would equal gamma; move beta or gamma off the resonance"
        )
    k = np.arange(1, n_terms + 1, dtype=float)
    nu = np.concatenate(([spec.gamma], 2.0 * np.pi * k / spec.beta))
    c = np.empty(n_terms + 1, dtype=complex)
    c[0] = spec.lam * spec.gamma * (1.0 / np.tan(bg / 2.0) - 1.0j)
    if n_terms:
        c[1:] = (4.0 * spec.lam * spec.gamma / spec.beta) * nu[1:] / (nu[1:] ** 2 - spec.gamma**2)
    delta = 2.0 * spec.lam / bg - 1.0j * spec.lam - np.sum(c / nu)
    return MatsubaraExpansion(n_terms=n_terms, nu=nu, c=c, delta=complex(delta))


def correlation_function(t, expansion: MatsubaraExpansion):
    """Evaluate C(t) = sum c_n exp(-nu_n t) for t >= 0 (scalar or array)."""
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.0):
        raise ValueError("the exponential expansion is only valid for t >= 0")
    value = expansion.c @ np.exp(-np.outer(expansion.nu, tt.reshape(-1)))
    return value.reshape(tt.shape) if tt.ndim else complex(value[0])
