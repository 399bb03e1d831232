"""Spectral density, expansion coefficients and tail coefficient."""

import numpy as np
import pytest
from scipy.integrate import quad

from spinheom.bath import (
    BathSpectrum,
    build_expansion,
    correlation_function,
    spectral_density,
)

SPEC = BathSpectrum(lam=0.03, gamma=0.15, beta=4.0)

# frozen from 40-digit arithmetic: c0 = lam*gamma*(cot(beta*gamma/2) - i)
C0 = 0.014547276646946224 - 0.0045j
NU1 = 1.5707963267948966
C1 = 0.0028911531308115732
DELTA_M0 = 0.0030181556870251746


def test_spectral_density_vanishes_at_zero():
    assert spectral_density(0.0, SPEC) == 0.0


def test_spectral_density_peak_value():
    # at omega = gamma the density equals lam/pi
    assert spectral_density(SPEC.gamma, SPEC) == pytest.approx(SPEC.lam / np.pi, rel=1e-14)
    assert spectral_density(-SPEC.gamma, SPEC) == pytest.approx(-SPEC.lam / np.pi, rel=1e-14)


def test_spectral_density_is_odd():
    rng = np.random.default_rng(3)
    omega = rng.uniform(-50.0, 50.0, size=100)
    assert np.allclose(spectral_density(-omega, SPEC), -spectral_density(omega, SPEC),
                       rtol=0, atol=1e-18)


def test_parameter_validation():
    with pytest.raises(ValueError):
        BathSpectrum(-0.1, 0.15, 4.0)
    with pytest.raises(ValueError):
        BathSpectrum(0.03, 0.0, 4.0)
    with pytest.raises(ValueError):
        BathSpectrum(0.03, 0.15, -1.0)
    BathSpectrum(0.0, 0.15, 4.0)  # decoupled limit is allowed


def test_expansion_frozen_values():
    e0 = build_expansion(SPEC, 0)
    assert e0.nu[0] == SPEC.gamma
    assert e0.c[0] == pytest.approx(C0, rel=1e-14)
    assert e0.delta == pytest.approx(DELTA_M0, rel=1e-13, abs=1e-18)
    assert e0.delta.imag == pytest.approx(0.0, abs=1e-18)

    e1 = build_expansion(SPEC, 1)
    assert e1.nu[1] == pytest.approx(NU1, rel=1e-15)
    assert e1.c[1] == pytest.approx(C1, rel=1e-14)


def test_expansion_rejects_negative_term_count():
    with pytest.raises(ValueError):
        build_expansion(SPEC, -1)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_resonance_rejected(k):
    beta = 2.0 * np.pi * k / SPEC.gamma
    with pytest.raises(ValueError, match="resonance"):
        build_expansion(BathSpectrum(0.03, SPEC.gamma, beta), 2)


def test_correlation_at_zero_matches_c0():
    e0 = build_expansion(SPEC, 0)
    assert correlation_function(0.0, e0) == pytest.approx(C0, rel=1e-14)


def test_correlation_decays_and_rejects_negative_time():
    e2 = build_expansion(SPEC, 2)
    assert abs(correlation_function(400.0, e2)) < 1e-20
    with pytest.raises(ValueError):
        correlation_function(-0.1, e2)


def test_correlation_vanishes_when_decoupled():
    e = build_expansion(BathSpectrum(0.0, 0.15, 4.0), 3)
    t = np.linspace(0.0, 10.0, 7)
    assert np.all(np.abs(correlation_function(t, e)) == 0.0)


def test_terminator_is_real_for_random_parameters():
    rng = np.random.default_rng(11)
    for _ in range(50):
        spec = BathSpectrum(rng.uniform(0.0, 1.0), rng.uniform(0.05, 2.0),
                            rng.uniform(0.1, 6.0))
        if spec.beta * spec.gamma % (2 * np.pi) < 1e-3:
            continue
        e = build_expansion(spec, int(rng.integers(0, 8)))
        assert abs(e.delta.imag) < 1e-15
        assert np.all(e.c[1:].imag == 0.0)


def test_terminator_decreases_monotonically_to_zero():
    deltas = [build_expansion(SPEC, m).delta.real for m in range(51)]
    assert all(d >= 0.0 for d in deltas)
    assert all(a >= b for a, b in zip(deltas, deltas[1:]))
    assert deltas[50] < 5e-5


def test_series_is_converged_at_moderate_term_count():
    # for beta*gamma <= 1 the tail beyond 40 terms is invisible at t >= 0.5
    t = np.array([0.5, 1.0, 5.0])
    for beta in (1.0, 4.0, 6.5):
        spec = BathSpectrum(0.03, 0.15, beta)
        c40 = correlation_function(t, build_expansion(spec, 40))
        c60 = correlation_function(t, build_expansion(spec, 60))
        assert np.max(np.abs(c40 - c60)) < 1e-8


def test_expansion_against_spectral_quadrature():
    # C(t) = (1/pi) int_0^inf J(w) [coth(beta w/2) cos(wt) - i sin(wt)] dw,
    # evaluated by oscillatory-weight quadrature, must match the pole series.
    spec = SPEC
    flat = 4.0 * spec.lam / (np.pi * spec.beta * spec.gamma)  # w -> 0 limit

    def coth_kernel(w):
        if w < 1e-12:
            return flat
        return spectral_density(w, spec) / np.tanh(w * spec.beta / 2.0)

    e = build_expansion(spec, 400)
    for t in (0.3, 1.0, 4.0):
        re = quad(coth_kernel, 0.0, np.inf, weight="cos", wvar=t,
                  limit=500, limlst=200)[0]
        im = -quad(lambda w: spectral_density(w, spec), 0.0, np.inf,
                   weight="sin", wvar=t, limit=500, limlst=200)[0]
        series = correlation_function(t, e)
        assert series == pytest.approx(complex(re, im), abs=5e-10)
