"""Auxiliary-operator hierarchy for one or two qubits with independent baths.

Every auxiliary matrix is labelled by a multi-index over (bath, expansion
term); the index's component sum is its tier, and tier 0 is the physical
reduced density matrix.  The state is stored as one dense complex array of
shape (count, d, d) ordered by tier and then by descending lexicographic
order within a tier, so the zero index always sits first.  Neighbor lookups
(index -/+ one unit in a channel) are tabulated once and baked, together
with every coupling coefficient, into a single sparse matrix acting on the
flattened stack: the right-hand side is evaluated thousands of times per
run and must stay one matrix-vector product.

The equation of motion implemented here, per auxiliary matrix rho_n:

    d rho_n / dt =
        -i [H, rho_n] - (n . nu) rho_n
        - delta * sum_a [V_a, [V_a, rho_n]]
        - i sum_{a,k} n_{ak} ( c_k V_a rho_{n - e_ak} - c_k* rho_{n - e_ak} V_a )
        - i sum_{a,k} [V_a, rho_{n + e_ak}]

with missing neighbors treated as zero and ``delta`` the truncation-tail
coefficient of the bath expansion, applied once per bath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix

from .bath import MatsubaraExpansion
from .qops import IDENTITY_2, SIGMA_X, SIGMA_Z, pair_op

__all__ = [
    "SystemModel",
    "HierarchyLayout",
    "build_layout",
    "initialize_state",
    "HeomOperator",
    "heom_rhs",
]


@dataclass(frozen=True)
class SystemModel:
    """Qubit register and its bath coupling operators.

    ``coupling_axis`` selects V_a = sigma_ax (transverse, the physical
    model) or sigma_az (pure dephasing, exactly solvable and used to
    validate the kernel).
    """

    omega0: float = 1.0
    n_qubits: int = 2
    coupling_axis: str = "x"

    def __post_init__(self):
        if self.n_qubits not in (1, 2):
            raise ValueError(f"the solver handles 1 or 2 system qubits, got {self.n_qubits}")
        if self.coupling_axis not in ("x", "z"):
            raise ValueError(f"coupling axis must be 'x' or 'z', got {self.coupling_axis!r}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def hamiltonian(self) -> np.ndarray:
        """H = sum_a (omega0/2) sigma_az, pair-ordered for two qubits."""
        if self.n_qubits == 1:
            return 0.5 * self.omega0 * SIGMA_Z
        return 0.5 * self.omega0 * (pair_op(SIGMA_Z, IDENTITY_2) + pair_op(IDENTITY_2, SIGMA_Z))

    def coupling_ops(self) -> list[np.ndarray]:
        base = SIGMA_X if self.coupling_axis == "x" else SIGMA_Z
        if self.n_qubits == 1:
            return [base.copy()]
        return [pair_op(base, IDENTITY_2), pair_op(IDENTITY_2, base)]


@dataclass(frozen=True)
class HierarchyLayout:
    """Enumerated index set with per-channel neighbor tables.

    ``lower[i, ch]``/``upper[i, ch]`` give the flat position of the index
    one unit below/above ``indices[i]`` in channel ``ch``, or -1 when that
    neighbor falls outside the truncation.
    """

    n_terms: int
    depth: int
    n_baths: int
    indices: np.ndarray
    tiers: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def count(self) -> int:
        return self.indices.shape[0]

    @property
    def n_channels(self) -> int:
        return self.indices.shape[1]


def _compositions(total: int, length: int):
    # Descending first component: within a tier the enumeration follows
    # graded lexicographic order, e.g. (1,0) before (0,1).
    if length == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, length - 1):
            yield (head,) + rest


def build_layout(n_terms: int, depth: int, n_baths: int = 2,
                 max_ados: int = 2_000_000) -> HierarchyLayout:
    """Enumerate all multi-indices with component sum <= ``depth``.

    The count is binomial(n_channels + depth, depth) with
    n_channels = n_baths * (n_terms + 1); layouts larger than ``max_ados``
    are rejected before any allocation happens.
    """
    if n_terms < 0:
        raise ValueError(f"number of expansion terms must be >= 0, got {n_terms}")
    if depth < 0:
        raise ValueError(f"hierarchy depth must be >= 0, got {depth}")
    if n_baths not in (1, 2):
        raise ValueError(f"the solver handles 1 or 2 baths, got {n_baths}")
    n_channels = n_baths * (n_terms + 1)
    count = math.comb(n_channels + depth, depth)
    if count > max_ados:
        raise ValueError(
            f"hierarchy would hold {count} auxiliary matrices, above the "
            f"budget of {max_ados}; reduce the depth or the expansion size"
        )
    index_list: list[tuple[int, ...]] = []
    for tier in range(depth + 1):
        index_list.extend(_compositions(tier, n_channels))
    position = {vec: i for i, vec in enumerate(index_list)}
    indices = np.array(index_list, dtype=np.int64)
    tiers = indices.sum(axis=1)
    lower = np.full((count, n_channels), -1, dtype=np.int64)
    upper = np.full((count, n_channels), -1, dtype=np.int64)
    for i, vec in enumerate(index_list):
        tier = tiers[i]
        for ch in range(n_channels):
            if vec[ch] > 0:
                lower[i, ch] = position[vec[:ch] + (vec[ch] - 1,) + vec[ch + 1:]]
            if tier < depth:
                upper[i, ch] = position[vec[:ch] + (vec[ch] + 1,) + vec[ch + 1:]]
    return HierarchyLayout(n_terms=n_terms, depth=depth, n_baths=n_baths,
                           indices=indices, tiers=tiers, lower=lower, upper=upper)


def initialize_state(layout: HierarchyLayout, rho0: np.ndarray,
                     atol: float = 1e-10) -> np.ndarray:
    """Factorized initial condition: tier 0 holds ``rho0``, everything else 0."""
    rho0 = np.asarray(rho0, dtype=complex)
    d = 2**layout.n_baths
    if rho0.shape != (d, d):
        raise ValueError(f"initial state must be {d}x{d} for this layout, got {rho0.shape}")
    herm = float(np.max(np.abs(rho0 - rho0.conj().T)))
    if herm > atol:
        raise ValueError(f"initial state is not Hermitian (deviation {herm:.3e})")
    tr = complex(np.trace(rho0))
    if abs(tr - 1.0) > atol:
        raise ValueError(f"initial state has trace {tr:.12g}, expected 1")
    ados = np.zeros((layout.count, d, d), dtype=complex)
    ados[0] = rho0
    return ados


def _left_mul(a: np.ndarray) -> np.ndarray:
    # vec(A X) = (A kron I) vec(X) for row-major flattening
    return np.kron(a, np.eye(a.shape[0], dtype=complex))


def _right_mul(b: np.ndarray) -> np.ndarray:
    # vec(X B) = (I kron B^T) vec(X)
    return np.kron(np.eye(b.shape[0], dtype=complex), b.T)


class HeomOperator:
    """Precompiled right-hand side of the hierarchy equations.

    ``bath_scales`` multiplies each bath's coupling operator (0 decouples
    that bath entirely, terminator included); ``include_terminator=False``
    drops the truncation-tail correction, which isolates the bare expansion
    in kernel-validation runs.
    """

    def __init__(self, model: SystemModel, expansion: MatsubaraExpansion,
                 layout: HierarchyLayout, bath_scales=None,
                 include_terminator: bool = True):
        if layout.n_baths != model.n_qubits:
            raise ValueError(
                f"layout has {layout.n_baths} baths but the model has "
                f"{model.n_qubits} qubits; each qubit carries its own bath"
            )
        if layout.n_terms != expansion.n_terms:
            raise ValueError(
                f"layout was built for {layout.n_terms} expansion terms, "
                f"got an expansion with {expansion.n_terms}"
            )
        scales = np.ones(layout.n_baths) if bath_scales is None else np.asarray(bath_scales, dtype=float)
        if scales.shape != (layout.n_baths,):
            raise ValueError(f"need one coupling scale per bath, got shape {scales.shape}")
        self.model = model
        self.expansion = expansion
        self.layout = layout
        self.h = model.hamiltonian()
        self.v_ops = [s * v for s, v in zip(scales, model.coupling_ops())]
        self.delta = complex(expansion.delta) if include_terminator else 0.0j
        nu_ext = np.tile(expansion.nu, layout.n_baths)
        self.damping = layout.indices @ nu_ext

        # The whole derivative is one sparse matrix acting on the row-major
        # flattening of the stack; assembling it once turns each evaluation
        # into a single matrix-vector product with a fixed summation order.
        d = model.dim
        dd = d * d
        count = layout.count
        rows: list[np.ndarray] = []
        cols: list[np.ndarray] = []
        vals: list[np.ndarray] = []

        def add_block(dest: np.ndarray, src: np.ndarray, op: np.ndarray,
                      weight: np.ndarray | None = None):
            wr, wc = np.nonzero(op)
            for r, c in zip(wr, wc):
                rows.append(dest * dd + r)
                cols.append(src * dd + c)
                v = np.full(dest.shape, op[r, c])
                vals.append(v * weight if weight is not None else v)

        every = np.arange(count)
        diag = -1.0j * (_left_mul(self.h) - _right_mul(self.h))
        if self.delta != 0.0:
            for v in self.v_ops:
                vv = v @ v
                diag -= self.delta * (_left_mul(vv) - 2.0 * np.kron(v, v.T)
                                      + _right_mul(vv))
        add_block(every, every, diag)
        rows.append(np.arange(count * dd))
        cols.append(np.arange(count * dd))
        vals.append(-np.repeat(self.damping, dd).astype(complex))

        per_bath = expansion.n_terms + 1
        for ch in range(layout.n_channels):
            v = self.v_ops[ch // per_bath]
            ck = complex(expansion.c[ch % per_bath])
            op_dn = -1.0j * (ck * _left_mul(v) - np.conj(ck) * _right_mul(v))
            op_up = -1.0j * (_left_mul(v) - _right_mul(v))
            lower = layout.lower[:, ch]
            upper = layout.upper[:, ch]
            rows_dn = np.nonzero(lower >= 0)[0]
            rows_up = np.nonzero(upper >= 0)[0]
            if rows_dn.size:
                add_block(rows_dn, lower[rows_dn], op_dn,
                          weight=layout.indices[rows_dn, ch].astype(complex))
            if rows_up.size:
                add_block(rows_up, upper[rows_up], op_up)

        matrix = coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(count * dd, count * dd),
        )
        self._matrix = matrix.tocsr()
        self._matrix.sum_duplicates()

    def rhs(self, ados: np.ndarray) -> np.ndarray:
        """Time derivative of the full auxiliary stack (pure function)."""
        count = self.layout.count
        d = self.model.dim
        flat = np.ascontiguousarray(ados).reshape(count * d * d)
        return (self._matrix @ flat).reshape(count, d, d)


def heom_rhs(ados: np.ndarray, model: SystemModel, expansion: MatsubaraExpansion,
             layout: HierarchyLayout, include_terminator: bool = True) -> np.ndarray:
    """One-shot derivative evaluation; builds the operator tables each call,
    so repeated stepping should construct a ``HeomOperator`` once instead."""
    op = HeomOperator(model, expansion, layout, include_terminator=include_terminator)
    return op.rhs(np.asarray(ados, dtype=complex))
