"""Index layout, neighbor tables and the hierarchy right-hand side."""

import itertools
import math

import numpy as np
import pytest

from spinheom.bath import BathSpectrum, build_expansion
from spinheom.ensemble import correlators_to_matrix, twisted_correlators
from spinheom.hierarchy import (
    HeomOperator,
    SystemModel,
    build_layout,
    heom_rhs,
    initialize_state,
)
from spinheom.propagate import IntegrationConfig, integrate
from spinheom.qops import ptrace, from_pair_order

SPEC = BathSpectrum(0.03, 0.15, 4.0)
MODEL2 = SystemModel(omega0=1.0, n_qubits=2, coupling_axis="x")


def test_model_validation():
    with pytest.raises(ValueError):
        SystemModel(n_qubits=3)
    with pytest.raises(ValueError):
        SystemModel(coupling_axis="y")


def test_two_qubit_hamiltonian_spectrum():
    h = MODEL2.hamiltonian()
    assert np.max(np.abs(h - h.conj().T)) == 0.0
    assert np.allclose(sorted(np.linalg.eigvalsh(h)), [-1.0, 0.0, 0.0, 1.0])
    # diagonal in the pair basis with the double-flip gap first
    assert np.allclose(np.diag(h), [1.0, -1.0, 0.0, 0.0])


def test_minimal_layout_enumeration():
    lay = build_layout(0, 1, n_baths=2)
    assert [tuple(v) for v in lay.indices] == [(0, 0), (1, 0), (0, 1)]


@pytest.mark.parametrize("n_terms,depth,count", [(1, 2, 15), (2, 4, 210)])
def test_layout_counts(n_terms, depth, count):
    lay = build_layout(n_terms, depth, n_baths=2)
    assert lay.count == count
    # exhaustive cross-check by direct enumeration
    channels = 2 * (n_terms + 1)
    brute = [v for v in itertools.product(range(depth + 1), repeat=channels)
             if sum(v) <= depth]
    assert lay.count == len(brute)
    assert set(map(tuple, lay.indices)) == set(brute)
    assert lay.count == math.comb(channels + depth, depth)


def test_neighbor_tables_are_mutually_inverse():
    lay = build_layout(1, 3, n_baths=2)
    for i in range(lay.count):
        for ch in range(lay.n_channels):
            up = lay.upper[i, ch]
            if up >= 0:
                assert lay.lower[up, ch] == i
                assert lay.tiers[up] == lay.tiers[i] + 1
            dn = lay.lower[i, ch]
            if dn >= 0:
                assert lay.upper[dn, ch] == i
            else:
                assert lay.indices[i, ch] == 0


def test_layout_budget_guard():
    with pytest.raises(ValueError, match="budget"):
        build_layout(3, 8, n_baths=2, max_ados=1000)


def test_initialize_state_checks_input():
    lay = build_layout(0, 1, n_baths=2)
    ados = initialize_state(lay, np.eye(4, dtype=complex) / 4.0)
    assert np.array_equal(ados[0], np.eye(4) / 4.0)
    assert np.all(ados[1:] == 0.0)
    with pytest.raises(ValueError, match="trace"):
        initialize_state(lay, np.eye(4, dtype=complex) / 4.0 * 0.9)
    bad = np.eye(4, dtype=complex) / 4.0
    bad[0, 1] = 0.1
    with pytest.raises(ValueError, match="Hermitian"):
        initialize_state(lay, bad)
    with pytest.raises(ValueError, match="4x4"):
        initialize_state(lay, np.eye(2, dtype=complex) / 2.0)


def test_free_limit_is_pure_precession():
    expansion = build_expansion(BathSpectrum(0.0, 0.15, 4.0), 0)
    lay = build_layout(0, 2, n_baths=2)
    rho0 = correlators_to_matrix(twisted_correlators(10, math.pi / 10))
    ados = initialize_state(lay, rho0)
    deriv = heom_rhs(ados, MODEL2, expansion, lay)
    h = MODEL2.hamiltonian()
    assert np.max(np.abs(deriv[0] - (-1j) * (h @ rho0 - rho0 @ h))) == 0.0
    assert np.max(np.abs(deriv[1:])) == 0.0


def test_physical_trace_is_conserved_by_the_generator():
    rng = np.random.default_rng(2)
    expansion = build_expansion(SPEC, 2)
    lay = build_layout(2, 3, n_baths=2)
    op = HeomOperator(MODEL2, expansion, lay)
    stack = rng.standard_normal((lay.count, 4, 4)) + 1j * rng.standard_normal((lay.count, 4, 4))
    assert abs(np.trace(op.rhs(stack)[0])) < 1e-14


def test_generator_is_linear():
    rng = np.random.default_rng(4)
    expansion = build_expansion(SPEC, 1)
    lay = build_layout(1, 3, n_baths=2)
    op = HeomOperator(MODEL2, expansion, lay)
    x = rng.standard_normal((lay.count, 4, 4)) + 1j * rng.standard_normal((lay.count, 4, 4))
    y = rng.standard_normal((lay.count, 4, 4)) + 1j * rng.standard_normal((lay.count, 4, 4))
    a, b = 0.7 - 0.2j, -1.3 + 0.5j
    combined = op.rhs(a * x + b * y)
    split = a * op.rhs(x) + b * op.rhs(y)
    assert np.max(np.abs(combined - split)) < 1e-12


def test_truncation_locality():
    expansion = build_expansion(SPEC, 1)
    lay = build_layout(1, 3, n_baths=2)
    op = HeomOperator(MODEL2, expansion, lay)
    top = int(np.nonzero(lay.tiers == lay.depth)[0][0])
    stack = np.zeros((lay.count, 4, 4), complex)
    stack[top, 0, 1] = 1.0
    deriv = op.rhs(stack)
    touched = np.nonzero(np.abs(deriv).max(axis=(1, 2)) > 0.0)[0]
    assert np.all(np.isin(lay.tiers[touched], [lay.depth - 1, lay.depth]))


def test_dephasing_mode_freezes_populations():
    model = SystemModel(omega0=1.0, n_qubits=1, coupling_axis="z")
    expansion = build_expansion(SPEC, 2)
    lay = build_layout(2, 6, n_baths=1)
    rho0 = np.array([[0.3, 0.2 + 0.1j], [0.2 - 0.1j, 0.7]], complex)
    cfg = IntegrationConfig(dt=0.01, t_max=3.0, sample_stride=30, error_check_stride=100)
    points = integrate(initialize_state(lay, rho0), model, expansion, lay, cfg)
    for p in points:
        assert abs(p.rho[0, 0] - 0.3) < 1e-12
        assert abs(p.rho[1, 1] - 0.7) < 1e-12


def test_decoupled_second_bath_reduces_to_single_qubit_run():
    # zeroing the second qubit's coupling must make the first qubit's
    # reduced dynamics equal a one-qubit integration from the reduced state
    expansion = build_expansion(SPEC, 1)
    lay2 = build_layout(1, 4, n_baths=2)
    rho0 = correlators_to_matrix(twisted_correlators(10, math.pi / 10))
    op2 = HeomOperator(MODEL2, expansion, lay2, bath_scales=(1.0, 0.0))
    cfg = IntegrationConfig(dt=0.01, t_max=5.0, sample_stride=50, error_check_stride=200)
    pts2 = integrate(initialize_state(lay2, rho0), MODEL2, expansion, lay2, cfg,
                     operator=op2)

    model1 = SystemModel(omega0=1.0, n_qubits=1, coupling_axis="x")
    lay1 = build_layout(1, 4, n_baths=1)
    rho0_q1 = ptrace(from_pair_order(rho0), (2, 2), keep=(0,))
    pts1 = integrate(initialize_state(lay1, rho0_q1), model1, expansion, lay1, cfg)

    worst = 0.0
    for p2, p1 in zip(pts2, pts1):
        reduced = ptrace(from_pair_order(p2.rho), (2, 2), keep=(0,))
        worst = max(worst, float(np.max(np.abs(reduced - p1.rho))))
    assert worst < 1e-8


def test_operator_rejects_mismatched_inputs():
    expansion = build_expansion(SPEC, 1)
    lay = build_layout(1, 2, n_baths=1)
    with pytest.raises(ValueError, match="bath"):
        HeomOperator(MODEL2, expansion, lay)
    lay2 = build_layout(2, 2, n_baths=2)
    with pytest.raises(ValueError, match="terms"):
        HeomOperator(MODEL2, expansion, lay2)
