"""Small dense-operator helpers shared by the solver and the reference checks.

Two-qubit matrices in this package are ordered in the parity-sorted basis
{|00>, |11>, |01>, |10>} with |1> the spin-down state; ``PAIR_ORDER`` maps
that ordering onto the plain row-major Kronecker ordering {|00>,|01>,|10>,|11>}.
"""

from __future__ import annotations

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |0><1|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0|
IDENTITY_2 = np.eye(2, dtype=complex)

PAIR_ORDER = (0, 3, 1, 2)
_PAIR_INVERSE = tuple(np.argsort(PAIR_ORDER))


def to_pair_order(mat: np.ndarray) -> np.ndarray:
    """Reorder a Kronecker-ordered 4x4 matrix into the pair basis."""
    return np.asarray(mat)[np.ix_(PAIR_ORDER, PAIR_ORDER)]


def from_pair_order(mat: np.ndarray) -> np.ndarray:
    """Reorder a pair-basis 4x4 matrix back to Kronecker ordering."""
    return np.asarray(mat)[np.ix_(_PAIR_INVERSE, _PAIR_INVERSE)]


def pair_op(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two single-qubit operators, in the pair basis."""
    return to_pair_order(np.kron(a, b))


def ptrace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace keeping the subsystems listed in ``keep``.

    Parameters
    ----------
    rho : ndarray
        Square matrix on the tensor product of ``dims``.
    dims : sequence of int
        Dimension of each subsystem, in tensor order.
    keep : sequence of int
        Indices (into ``dims``) of the subsystems to keep.
    """
    dims = tuple(int(d) for d in dims)
    keep = tuple(sorted(int(k) for k in keep))
    n = len(dims)
    arr = np.asarray(rho).reshape(dims + dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(arr, row + col, out)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)
