"""Independent references the solver and its formulas are tested against.

Nothing here shares code paths with the production pipeline: the twisted
ensemble is built as an explicit N-qubit statevector and measured directly;
the pure-dephasing envelope is the known closed form for an exponential
kernel; the reduction and partial-trace identities are evaluated on
explicitly constructed qubit+boson models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import MatsubaraExpansion
from .observables import concurrence_wootters
from .qops import (
    IDENTITY_2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    ptrace,
    to_pair_order,
)

__all__ = [
    "CollectiveMoments",
    "TwistedReference",
    "brute_force_twisted",
    "dephasing_envelope",
    "reduction_theorem_check",
    "partial_trace_identity_check",
]

MAX_BRUTE_FORCE_SPINS = 12

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


@dataclass(frozen=True)
class CollectiveMoments:
    """First and second moments of the collective spin components."""

    mean_j: np.ndarray        # <J_a>, a in (x, y, z)
    corr: np.ndarray          # C_ab = <J_a J_b + J_b J_a>/2
    cov: np.ndarray           # C_ab - <J_a><J_b>
    j2: float                 # <J.J>
    gamma_matrix: np.ndarray  # (N-1) cov + corr


@dataclass(frozen=True)
class TwistedReference:
    """Everything the statevector route knows about one twisted ensemble."""

    n_spins: int
    theta: float
    state: np.ndarray
    rho_pair: np.ndarray
    sz: float
    szz: float
    y: complex
    u: complex
    moments: CollectiveMoments
    xi_ku_sq: float
    xi_t_sq: float
    concurrence: float


def _apply_on_every_qubit(psi: np.ndarray, gate: np.ndarray, n: int) -> np.ndarray:
    arr = psi.reshape((2,) * n)
    for axis in range(n):
        arr = np.moveaxis(np.tensordot(gate, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1)


def _popcounts(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    counts = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        counts += (idx >> b) & 1
    return counts


def _twisted_state(n: int, theta: float) -> np.ndarray:
    # exp(-i theta Jx^2 / 2) is diagonal in the product x basis, so conjugate
    # by per-qubit Hadamards and apply exact phases: no approximation involved.
    psi = np.zeros(1 << n, dtype=complex)
    psi[-1] = 1.0  # all spins down, |1...1>
    psi = _apply_on_every_qubit(psi, _HADAMARD, n)
    m_x = 0.5 * (n - 2 * _popcounts(n))
    psi = psi * np.exp(-0.5j * theta * m_x**2)
    return _apply_on_every_qubit(psi, _HADAMARD, n)


def _collective_apply(psi: np.ndarray, n: int, axis_label: str) -> np.ndarray:
    """J_a |psi> with J_a = (1/2) sum_k sigma_ka, evaluated qubit by qubit."""
    if axis_label == "z":
        weights = 0.5 * (n - 2 * _popcounts(n))
        return weights * psi
    arr = psi.reshape((2,) * n)
    out = np.zeros_like(arr)
    for q in range(n):
        flipped = np.take(arr, [1, 0], axis=q)
        if axis_label == "x":
            out = out + flipped
        else:  # y: new|0> = -i old|1>, new|1> = +i old|0>
            shape = [1] * n
            shape[q] = 2
            phase = np.array([-1.0j, 1.0j]).reshape(shape)
            out = out + phase * flipped
    return 0.5 * out.reshape(-1)


def _collective_moments(psi: np.ndarray, n: int) -> CollectiveMoments:
    vecs = [_collective_apply(psi, n, a) for a in ("x", "y", "z")]
    mean = np.array([np.vdot(psi, v).real for v in vecs])
    corr = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            corr[i, j] = np.vdot(vecs[i], vecs[j]).real
    j2 = float(np.trace(corr))
    cov = corr - np.outer(mean, mean)
    gamma = (n - 1) * cov + corr
    return CollectiveMoments(mean_j=mean, corr=corr, cov=cov, j2=j2, gamma_matrix=gamma)


def _min_transverse_variance(moments: CollectiveMoments) -> float:
    """Minimize the spin variance over directions orthogonal to the mean spin.

    Along the circle d(phi) = cos(phi) e1 + sin(phi) e2 the variance is an
    exact second harmonic, a + b cos(2 phi) + c sin(2 phi), so sampling it at
    0, pi/4 and pi/2 determines the minimum a - hypot(b, c) without any
    iterative search; a coarse scan cross-checks that no lower value exists.
    """
    norm = float(np.linalg.norm(moments.mean_j))
    if norm < 1e-12:
        raise ValueError("mean spin vanishes; the transverse plane is undefined")
    n_hat = moments.mean_j / norm
    probe = np.array([0.0, 0.0, 1.0]) if abs(n_hat[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = probe - np.dot(probe, n_hat) * n_hat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n_hat, e1)

    def variance(phi: float) -> float:
        d = math.cos(phi) * e1 + math.sin(phi) * e2
        return float(d @ moments.corr @ d - (d @ moments.mean_j) ** 2)

    v0, v45, v90 = variance(0.0), variance(0.25 * math.pi), variance(0.5 * math.pi)
    a = 0.5 * (v0 + v90)
    b = 0.5 * (v0 - v90)
    c = v45 - a
    v_min = a - math.hypot(b, c)
    scan = min(variance(p) for p in np.linspace(0.0, math.pi, 181))
    if scan < v_min - 1e-9 * max(1.0, abs(v_min)):
        raise RuntimeError("transverse variance scan undercut the harmonic minimum")
    return v_min


def brute_force_twisted(n_spins: int, theta: float) -> TwistedReference:
    """Build the twisted N-qubit statevector and measure everything directly.

    Pair quantities come from the explicit partial trace over spins 3..N;
    the squeezing parameters come from their collective definitions (scanned
    transverse variance, smallest eigenvalue of the (N-1)*cov + corr
    matrix); the concurrence from the general spin-flip spectrum.
    """
    if not 2 <= n_spins <= MAX_BRUTE_FORCE_SPINS:
        raise ValueError(
            f"statevector reference supports 2..{MAX_BRUTE_FORCE_SPINS} spins, got {n_spins}"
        )
    psi = _twisted_state(n_spins, theta)
    block = psi.reshape(4, -1)
    rho_std = block @ block.conj().T
    rho_pair = to_pair_order(rho_std)

    sz = float(np.trace(rho_std @ np.kron(SIGMA_Z, IDENTITY_2)).real)
    szz = float(np.trace(rho_std @ np.kron(SIGMA_Z, SIGMA_Z)).real)
    y = complex(np.trace(rho_std @ np.kron(SIGMA_PLUS, SIGMA_MINUS)))
    u = complex(np.trace(rho_std @ np.kron(SIGMA_MINUS, SIGMA_MINUS)))

    moments = _collective_moments(psi, n_spins)
    xi_ku = 4.0 * _min_transverse_variance(moments) / n_spins
    lam_min = float(np.linalg.eigvalsh(moments.gamma_matrix)[0])
    xi_t = lam_min / (moments.j2 - 0.5 * n_spins)
    return TwistedReference(
        n_spins=n_spins, theta=theta, state=psi, rho_pair=rho_pair,
        sz=sz, szz=szz, y=y, u=u, moments=moments,
        xi_ku_sq=xi_ku, xi_t_sq=xi_t,
        concurrence=concurrence_wootters(rho_pair),
    )


def dephasing_envelope(expansion: MatsubaraExpansion, t):
    """|coherence(t)/coherence(0)| for one qubit coupled through sigma_z.

    For the exponential kernel C(t) = sum c_n exp(-nu_n t) the decay is
    exactly exp(-Gamma(t)) with

        Gamma(t) = 4 sum_n Re(c_n) (nu_n t - 1 + exp(-nu_n t)) / nu_n^2,

    i.e. the double time integral of 4 Re C; populations stay constant.
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.0):
        raise ValueError("the dephasing envelope is defined for t >= 0")
    nu = expansion.nu[:, None]
    phase = nu * tt.reshape(-1)
    gamma = 4.0 * np.sum(
        expansion.c.real[:, None] * (phase - 1.0 + np.exp(-phase)) / nu**2, axis=0
    )
    out = np.exp(-gamma).reshape(tt.shape)
    return out if out.ndim else float(out)


def _destroy(fock: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, fock, dtype=float)), 1).astype(complex)


def _thermal_mode(omega: float, beta: float, fock: int) -> np.ndarray:
    weights = np.exp(-beta * omega * np.arange(fock))
    return np.diag(weights / weights.sum()).astype(complex)


def _embed(ops_by_site: dict[int, np.ndarray], dims) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for site, d in enumerate(dims):
        factor = ops_by_site.get(site, np.eye(d, dtype=complex))
        out = np.kron(out, factor)
    return out


def _evolved(h: np.ndarray, rho: np.ndarray, t: float) -> np.ndarray:
    energies, vectors = np.linalg.eigh(h)
    phase = np.exp(-1.0j * energies * t)
    inner = vectors.conj().T @ rho @ vectors
    inner = inner * np.outer(phase, phase.conj())
    return vectors @ inner @ vectors.conj().T


def _random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1.0j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def reduction_theorem_check(rng: np.random.Generator, fock_cutoff: int = 5,
                            t_final: float = 1.5,
                            entangled_system: bool = False) -> float:
    """Max deviation between the pair state of a full three-qubit/three-mode
    model and of the two-qubit/two-mode submodel, both evolved exactly.

    Each qubit couples transversally to its own boson mode and the site
    parameters are drawn independently, so agreement cannot come from
    symmetry; any deviation beyond eigensolver roundoff is a bug in the
    factorization argument, regardless of the Fock cutoff.
    """
    omega_q = rng.uniform(0.5, 1.5, size=3)
    omega_m = rng.uniform(0.8, 1.6, size=3)
    coupling = rng.uniform(0.1, 0.3, size=3)
    beta = rng.uniform(0.8, 2.5, size=3)

    if entangled_system:
        amp = rng.standard_normal(8) + 1.0j * rng.standard_normal(8)
        amp /= np.linalg.norm(amp)
        rho_s = np.outer(amp, amp.conj())
    else:
        rho_s = _random_density(rng, 8)

    f = fock_cutoff
    a = _destroy(f)
    x_mode = a + a.conj().T
    n_mode = a.conj().T @ a
    thermals = [_thermal_mode(omega_m[i], beta[i], f) for i in range(3)]

    def local_terms(i: int, dims, qubit_site: int, mode_site: int) -> np.ndarray:
        return (
            0.5 * omega_q[i] * _embed({qubit_site: SIGMA_Z}, dims)
            + omega_m[i] * _embed({mode_site: n_mode}, dims)
            + coupling[i] * _embed({qubit_site: SIGMA_X, mode_site: x_mode}, dims)
        )

    dims_full = (2, 2, 2, f, f, f)
    h_full = sum(local_terms(i, dims_full, i, 3 + i) for i in range(3))
    rho_full = rho_s
    for th in thermals:
        rho_full = np.kron(rho_full, th)
    pair_full = ptrace(_evolved(h_full, rho_full, t_final), dims_full, keep=(0, 1))

    dims_sub = (2, 2, f, f)
    h_sub = sum(local_terms(i, dims_sub, i, 2 + i) for i in range(2))
    rho_sub = ptrace(rho_s, (2, 2, 2), keep=(0, 1))
    for th in thermals[:2]:
        rho_sub = np.kron(rho_sub, th)
    pair_sub = ptrace(_evolved(h_sub, rho_sub, t_final), dims_sub, keep=(0, 1))

    return float(np.max(np.abs(pair_full - pair_sub)))


def partial_trace_identity_check(rng: np.random.Generator) -> float:
    """Deviation of Tr_2[(A1 x A2) rho (B1 x B2)] from
    Tr_2[(A1 x B2 A2) rho (B1 x I)] on one random operator tuple."""
    def rand_op() -> np.ndarray:
        return rng.standard_normal((2, 2)) + 1.0j * rng.standard_normal((2, 2))

    a1, a2, b1, b2 = (rand_op() for _ in range(4))
    rho = _random_density(rng, 4)
    lhs = ptrace(np.kron(a1, a2) @ rho @ np.kron(b1, b2), (2, 2), keep=(0,))
    rhs = ptrace(np.kron(a1, b2 @ a2) @ rho @ np.kron(b1, IDENTITY_2), (2, 2), keep=(0,))
    return float(np.max(np.abs(lhs - rhs)))
