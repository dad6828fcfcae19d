import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orthoasym.oscillatory import (
    OutOfWindow,
    PhaseSpec,
    batch_eval,
    batch_to_csv,
    bump,
    classify,
    direct_quadrature_oracle,
    find_stationary_point,
    smooth_bump,
    stationary_phase_batch,
    stationary_phase_eval,
)


def quad_spec(center=2.0, half_width=1.0, delta=(0.5, 3.5), **kw):
    return PhaseSpec(lambda m: np.asarray(m) ** 2 / 2, lambda m: np.asarray(m, dtype=float), delta,
                     bump(center, half_width), theta_pp=lambda m: np.ones_like(np.asarray(m, dtype=float)),
                     support=(center - half_width, center + half_width), **kw)


def test_bump_values():
    b = bump(2.0, 1.0)
    assert b(2.0) == 1.0 and b(3.0) == 0.0 and b(0.5) == 0.0
    s = smooth_bump(0.0, 1.0)
    assert s(0.0) == pytest.approx(1.0) and s(1.0) == 0.0


def test_stationary_point_quadratic():
    spec = quad_spec()
    assert find_stationary_point(spec, 200.0, 100.0) == pytest.approx(2.0, abs=1e-12)
    res = stationary_phase_eval(spec, 200.0, 100.0)
    assert res.in_window
    # |lead| = sqrt(2 pi) t^{-1/2} F(2) with h' = 1 and F(2) = 1
    assert abs(res.leading) == pytest.approx(math.sqrt(2 * math.pi) / 10, rel=1e-12)
    assert res.Psi == pytest.approx(2.0 * 200 - 2.0 * 100, rel=1e-12)


def test_stationary_point_exponential():
    spec = PhaseSpec(np.exp, np.exp, (0.5, 2.0), bump(1.2, 0.4), theta_pp=np.exp, support=(0.8, 1.6))
    assert find_stationary_point(spec, 300.0, 100.0) == pytest.approx(math.log(3), abs=1e-12)


def test_stationary_point_with_linear_phi():
    # x + phi' - theta' t = 0 with phi' = 10 gives mu* = (x + 10) / t
    spec = quad_spec(phi=lambda n, m: 10 * np.asarray(m), phi_p=lambda n, m: 10 + 0 * np.asarray(m))
    assert find_stationary_point(spec, 300.0, 100.0) == pytest.approx(3.1, abs=1e-12)


def test_out_of_window():
    spec = quad_spec()
    assert classify(spec, 5.0) == "outside"
    assert classify(spec, 0.5) == "boundary"
    r = find_stationary_point(spec, 500.0, 100.0)
    assert isinstance(r, OutOfWindow) and not r
    res = stationary_phase_eval(spec, 500.0, 100.0)
    assert not res.in_window and res.leading == 0


def test_spec_validation():
    with pytest.raises(ValueError):
        PhaseSpec(lambda m: -np.asarray(m), lambda m: -np.ones_like(m), (0.0, 1.0), bump(0.5, 0.2))
    with pytest.raises(ValueError):
        # F does not vanish at the ends of delta
        quad_spec(center=1.0, half_width=1.0, delta=(0.5, 3.5))


def test_batch_matches_scalar():
    spec = quad_spec()
    t = 400.0
    xs = np.array([300.0, 700.0, 1100.0, 2000.0])
    mu, psi, lead, inside = stationary_phase_batch(spec, np.zeros(4, dtype=int), xs, t)
    for k, x in enumerate(xs):
        r = stationary_phase_eval(spec, x, t)
        assert r.in_window == inside[k]
        assert lead[k] == pytest.approx(r.leading, rel=1e-10, abs=1e-300)


def test_oracle_small_t_limit():
    # G(0) = int F = (32/35) * half_width for F = (1 - u^2)^3
    spec = quad_spec()
    assert direct_quadrature_oracle(spec, 0.0, 1e-12) == pytest.approx(32 / 35, rel=1e-10)


@given(st.floats(min_value=50, max_value=3000), st.floats(min_value=0.6, max_value=3.4))
@settings(max_examples=20, deadline=None)
def test_oracle_panel_doubling(t, xi):
    spec = quad_spec()
    q = direct_quadrature_oracle(spec, xi * t, t, tol=1e-10)
    q2 = direct_quadrature_oracle(spec, xi * t, t, tol=1e-10, min_panels=64)
    assert abs(q - q2) <= 1e-10 * max(abs(q), 1e-3)


def test_oracle_rejects_tight_tol():
    with pytest.raises(ValueError):
        direct_quadrature_oracle(quad_spec(), 100.0, 100.0, tol=1e-13)


def test_leading_term_converges():
    spec = quad_spec()
    gaps = []
    for t in (100.0, 400.0, 1600.0):
        r = batch_eval(spec, [0], [2.3 * t], [t])[0]
        gaps.append(r.rel_err)
    assert gaps[2] < 0.35 * gaps[1] < 0.35 ** 2 * gaps[0] * 1.5


def test_batch_csv(tmp_path):
    rows = batch_eval(quad_spec(), [0, 0], [200.0, 500.0], [100.0])
    batch_to_csv(rows, tmp_path / "b.csv")
    lines = (tmp_path / "b.csv").read_text().splitlines()
    assert lines[0] == "n,t,x_over_t,in_window,re,im,abs,oracle_re,oracle_im,rel_err"
    assert len(lines) == 3
