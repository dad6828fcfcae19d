import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orthoasym.opnorm import (
    C0,
    SemidiscreteOperatorSpec,
    boundedness_verdict,
    compactness_check,
    gaussian_trials,
    gram_section,
    hilbert_schmidt_check,
    load_operator_spec,
    reduce_change_of_variables,
    sobolev_ratio,
    sobolev_verify,
    top_eigen,
    window_sums,
)


def sqrt_spec():
    return SemidiscreteOperatorSpec("sqrt_n", {"tag": "n^p", "p": -0.25}, w_interval=(-1.0, 1.0))


def test_c0_value():
    assert C0 == pytest.approx(2 / (math.sqrt(5) - 1), rel=1e-15)


def test_gram_indicator_against_quadrature():
    # G_nm = v_n v_m int_a^b e^{i (x_n - x_m) lam} dlam
    spec = sqrt_spec()
    G = gram_section(spec, 12)
    n = spec.indices(12)
    x, v = spec.x(n), spec.v(n)
    lam, w = np.polynomial.legendre.leggauss(80)
    E = np.exp(1j * np.outer(x, lam))
    ref = (v[:, None] * v[None, :]) * ((E * w) @ E.conj().T)
    assert np.allclose(G, ref, atol=1e-12)


@given(st.integers(min_value=4, max_value=120), st.floats(min_value=0.1, max_value=5.0))
@settings(max_examples=25, deadline=None)
def test_gram_properties(N, c):
    spec = sqrt_spec()
    G = gram_section(spec, N)
    assert np.allclose(G, G.conj().T, atol=1e-13)
    ev = np.linalg.eigvalsh(G)
    assert ev[0] > -1e-10 * ev[-1]
    lam, _, _ = top_eigen(G)
    assert lam == pytest.approx(ev[-1], rel=1e-8)
    # nested sections: monotone top eigenvalue
    lam_half, _, _ = top_eigen(G[: N // 2, : N // 2])
    assert lam_half <= lam * (1 + 1e-10)
    # v -> c v scales the Gram matrix by c^2
    scaled = SemidiscreteOperatorSpec("sqrt_n", {"tag": "n^p", "p": -0.25, "c": c}, w_interval=(-1.0, 1.0))
    lam_c, _, _ = top_eigen(gram_section(scaled, N))
    assert math.sqrt(lam_c) == pytest.approx(c * math.sqrt(lam), rel=1e-12)


def test_parseval_sections():
    spec = SemidiscreteOperatorSpec("n", "const", w_interval=(-math.pi, math.pi))
    for N in (8, 64, 256):
        lam, _, _ = top_eigen(gram_section(spec, N))
        assert lam == pytest.approx(2 * math.pi, abs=1e-10)


def test_hilbert_schmidt_geometric():
    spec = SemidiscreteOperatorSpec("n", {"tag": "geometric", "q": 2 ** -0.5}, w_interval=(0.0, 1.0))
    hs = hilbert_schmidt_check(spec, 200)
    # sum 2^{-n} = 2 and |w|^2 = 1
    assert hs["is_hs"] and hs["hs_norm_sq"] == pytest.approx(2.0, rel=1e-12)
    assert not hilbert_schmidt_check(sqrt_spec(), 4096)["is_hs"]


def test_window_sums_limit():
    n = np.arange(1, 40001, dtype=float)
    R, M = window_sums(np.sqrt(n), n ** -0.25)
    # about 2R indices with v^2 = 1/R in [R, R+1)
    assert M[-1] == pytest.approx(2.0, rel=0.01)


def test_verdicts():
    est = boundedness_verdict(sqrt_spec(), [256, 512, 1024, 2048])
    assert est.verdict == "BoundedPlateau" and est.consistent
    grow = SemidiscreteOperatorSpec("ln_n", "const", w_interval=(-1.0, 1.0))
    est = boundedness_verdict(grow, [256, 512, 1024, 2048])
    assert est.verdict == "Growing"
    with pytest.raises(ValueError):
        boundedness_verdict(sqrt_spec(), [64, 128])


def test_compactness():
    assert compactness_check(sqrt_spec(), 1024).verdict == "NotCompact"
    decay = SemidiscreteOperatorSpec("sqrt_n", {"tag": "n^p", "p": -0.75}, w_interval=(-1.0, 1.0))
    assert compactness_check(decay, 2048).verdict == "Compact"


def test_reduce_cubic():
    spec = SemidiscreteOperatorSpec("n", "const", w=lambda lam: np.ones_like(lam), w_support=(0.5, 2.0),
                                    omega=lambda lam: lam ** 3, omega_prime=lambda lam: 3 * lam ** 2,
                                    omega_domain=(0.5, 2.0))
    red = reduce_change_of_variables(spec)
    # w~(mu) = w(lam) / sqrt(3 lam^2) at lam = 1
    assert red.w(np.array([1.0]))[0] == pytest.approx(1 / math.sqrt(3), rel=1e-10)
    assert red.w_support == pytest.approx((0.125, 8.0))


def test_load_operator_spec(tmp_path):
    spec = load_operator_spec({"x": "sqrt_n", "v": {"tag": "n^p", "p": -0.25}, "w": {"indicator": [-1, 1]}})
    assert spec.w_interval == (-1.0, 1.0) and spec.start == 1
    with pytest.raises(KeyError):
        load_operator_spec({"x": "n", "bogus": 1})
    g = load_operator_spec({"x": "n", "v": {"tag": "geometric", "q": 0.5}, "w": {"gaussian": 1.0}})
    assert g.w_norm_sq() == pytest.approx(math.sqrt(math.pi), rel=1e-8)


def test_sobolev_exponential():
    # x_n = n, u = e^{-x}: the finite ratio is exactly 1 / (1 - e^{-2})
    x = np.arange(0.0, 30.0)
    r = sobolev_ratio(x, lambda s: np.exp(-s), lambda s: -np.exp(-s))
    assert r == pytest.approx(1 / (1 - math.exp(-2)), rel=1e-10)
    assert r < C0


def test_sobolev_single_gap():
    # one gap [0, 1]: |u(0)|^2 = 1 against int_0^1 2 e^{-2x} = 1 - e^{-2}
    r = sobolev_ratio(np.array([0.0, 1.0]), lambda s: np.exp(-s), lambda s: -np.exp(-s))
    assert 1.0 <= C0 * (1 - math.exp(-2))
    assert r == pytest.approx(1 / (1 - math.exp(-2)), rel=1e-12)


def test_sobolev_random_and_spacing_guard():
    rng = np.random.default_rng(0)
    x = np.sqrt(np.arange(0, 20000, dtype=float))
    rep = sobolev_verify(x, gaussian_trials(rng, 30, (5, 100), (1, 20)))
    assert rep.holds and rep.worst_ratio < rep.bound
    with pytest.raises(ValueError):
        sobolev_verify(x, [], delta=0.5)
