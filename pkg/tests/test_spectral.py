import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial.hermite import hermgauss
from scipy.special import factorial2

from orthoasym.jacobi import JacobiCoefficients
from orthoasym.spectral import (
    apply_U,
    builtin_density,
    diagonalize_truncation,
    estimate_density,
    l2_norm_sq,
    sturm_count,
    synthesize,
    tridiagonal_eigen_first,
)


def hermite_moment(k):
    # int lam^k pi^{-1/2} exp(-lam^2)
    return 0.0 if k % 2 else float(factorial2(k - 1)) / 2 ** (k // 2) if k else 1.0


def chebyshev_u_moment(k):
    # int lam^k (2/pi) sqrt(1 - lam^2) = Catalan(k/2) / 2^k
    if k % 2:
        return 0.0
    m = k // 2
    return math.comb(2 * m, m) / (m + 1) / 2 ** k


def test_hermite_two_point_rule():
    sd = diagonalize_truncation(JacobiCoefficients.hermite(), 2)
    assert np.allclose(sd.nodes, [-2 ** -0.5, 2 ** -0.5], atol=1e-12, rtol=0)
    assert np.allclose(sd.weights, [0.5, 0.5], atol=1e-12, rtol=0)


@pytest.mark.parametrize("N", [3, 7, 20, 40])
def test_hermite_rule_matches_numpy(N):
    sd = diagonalize_truncation(JacobiCoefficients.hermite(), N)
    x, w = hermgauss(N)
    assert np.allclose(sd.nodes, x, atol=1e-12)
    assert np.allclose(sd.weights, w / math.sqrt(math.pi), atol=1e-13)


@pytest.mark.parametrize("N", [1, 2, 5, 12, 20])
def test_moment_exactness(N):
    h = diagonalize_truncation(JacobiCoefficients.hermite(), N)
    u = diagonalize_truncation(JacobiCoefficients.chebyshev_u(), N)
    lg = diagonalize_truncation(JacobiCoefficients.laguerre(0.0), N)
    for k in range(2 * N):
        # odd moments cancel; measure against the absolute moment
        scale = max(1.0, float(np.sum(h.weights * np.abs(h.nodes) ** k)))
        assert abs(h.moment(k) - hermite_moment(k)) <= 1e-10 * scale
        assert abs(u.moment(k) - chebyshev_u_moment(k)) <= 1e-10
        assert abs(lg.moment(k) / math.factorial(k) - 1) <= 1e-10


@given(st.integers(min_value=1, max_value=200))
@settings(max_examples=30, deadline=None)
def test_weights_are_a_probability(N):
    sd = diagonalize_truncation(JacobiCoefficients.laguerre(0.5), N)
    # far-tail weights underflow to zero
    assert np.all(sd.weights >= 0)
    assert abs(np.sum(sd.weights) - 1) < 1e-12
    assert np.all(np.diff(sd.nodes) > 0)


def test_eigen_first_against_dense():
    rng = np.random.default_rng(3)
    d, e = rng.normal(size=30), rng.uniform(0.2, 2, size=29)
    lam, z = tridiagonal_eigen_first(d, e)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    ref, V = np.linalg.eigh(T)
    assert np.allclose(lam, ref, atol=1e-12)
    assert np.allclose(np.abs(z), np.abs(V[0]), atol=1e-12)


@pytest.mark.parametrize("x", [-2.0, -0.31, 0.0, 0.5, 3.0])
def test_sturm_count_matches_nodes(x):
    c = JacobiCoefficients.hermite()
    sd = diagonalize_truncation(c, 25)
    assert sturm_count(c, 25, x) == int(np.sum(sd.nodes < x))


def test_density_estimate_close_to_weight():
    for c, grid in [(JacobiCoefficients.hermite(), np.linspace(-1, 1, 9)),
                    (JacobiCoefficients.chebyshev_u(), np.linspace(-0.8, 0.8, 9))]:
        tau, _ = builtin_density(c)
        est = estimate_density(diagonalize_truncation(c, 2000), grid)
        assert np.max(np.abs(est.tau / tau(grid) - 1)) < 0.01


def test_apply_U_and_synthesize_roundtrip():
    # f = P_2 sqrt(tau) has coefficients e_2
    c = JacobiCoefficients.hermite()
    tau, _ = builtin_density(c)
    f = lambda lam: (2 * lam ** 2 - 1) / math.sqrt(2) * np.sqrt(tau(lam))
    u = apply_U(c, None, f, 6, (-12.0, 12.0))
    assert np.allclose(u, [0, 0, 1, 0, 0, 0, 0], atol=1e-12)
    g = synthesize(c, None, u, np.array([-0.7, 0.3]))
    assert np.allclose(g, f(np.array([-0.7, 0.3])), atol=1e-12)
    assert l2_norm_sq(lambda lam: np.ones_like(lam), (0.0, 2.0)) == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(ValueError):
        apply_U(JacobiCoefficients.chebyshev_u(), None, f, 3, (-2.0, 0.0))
