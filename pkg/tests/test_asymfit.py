import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orthoasym.asymfit import (
    FitError,
    fit_envelope,
    fit_model,
    fit_phase,
    local_signal,
    plancherel_rotach_check,
    psi_sequence,
    verify_universal,
)
from orthoasym.jacobi import JacobiCoefficients
from orthoasym.spectral import diagonalize_truncation, estimate_density


def synthetic(N, r, s, om, phase0=0.3, amp=1.7):
    n = np.arange(N + 1, dtype=float)
    with np.errstate(divide="ignore"):
        env = amp * np.where(n > 0, n, 1.0) ** -r
    return env * np.cos(om * n ** s + phase0)


@given(st.floats(min_value=0.05, max_value=0.6), st.floats(min_value=0.4, max_value=1.0))
@settings(max_examples=20, deadline=None)
def test_envelope_exponent_synthetic(r, s):
    # unit phase increment at n = 1000
    x = synthetic(20000, r, s, 1000 ** (1 - s) / s)
    fit = fit_envelope(x)
    assert abs(fit.r_hat - r) < 0.01
    assert fit.amplitude_hat == pytest.approx(1.7, rel=0.05)


def test_local_signal_increment():
    om = 1.1
    x = synthetic(4000, 0.0, 1.0, om)
    sig = local_signal(x)
    inner = sig.increment[50:-50]
    assert np.allclose(inner, om, atol=1e-6)
    assert np.allclose(sig.amplitude[50:-50], 1.7, rtol=1e-6)


def test_fit_phase_exponent_single_sequence():
    fit = fit_phase(synthetic(20000, 0.25, 0.5, 1.4))
    assert abs(fit.exponent - 0.5) < 0.01
    assert fit.omega_prime is None


def test_non_oscillating_rejected():
    with pytest.raises(FitError):
        fit_envelope(np.linspace(1, 2, 5000))


@pytest.fixture(scope="module")
def hermite_model():
    lams = np.linspace(0.2, 1.0, 5)
    return fit_model(JacobiCoefficients.hermite(), lams, N=20000)


def test_hermite_fit(hermite_model):
    m = hermite_model
    assert abs(m.r - 0.25) < 0.02 and abs(m.s - 0.5) < 0.02
    # omega = sqrt(2) lam up to a constant
    assert np.allclose(m.omega_prime, math.sqrt(2), rtol=0.02)
    kap = 2 ** -0.75 * math.pi ** -0.25 * np.exp(m.lambdas ** 2 / 2)
    assert np.allclose(m.kappa, kap, rtol=0.05)


def test_verify_universal_grids(hermite_model):
    sd = diagonalize_truncation(JacobiCoefficients.hermite(), 2000)
    dens = estimate_density(sd, hermite_model.lambdas)
    rep = verify_universal(hermite_model, dens)
    assert rep.passed(0.03, 0.05)
    with pytest.raises(ValueError, match="grids differ"):
        verify_universal(hermite_model, estimate_density(sd, hermite_model.lambdas + 0.01))


def test_psi_sequence_closed_form():
    c = JacobiCoefficients.power_model(0.5, 0.5)
    psi = psi_sequence(c, 4)
    ref = [0.0] + list(np.cumsum([1 / (2 * 0.5 * math.sqrt(m + 1)) for m in range(4)]))
    assert np.allclose(psi, ref)


def test_plancherel_rotach_half():
    rep = plancherel_rotach_check(JacobiCoefficients.power_model(1 / math.sqrt(2), 0.5), [-0.5, 0.0, 0.5], N=20000)
    assert abs(rep.r_fit - 0.25) < 0.02 and abs(rep.s_fit - 0.5) < 0.02
    assert np.max(rep.amplitude_error) < 0.05
