import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import eval_chebyu, eval_hermite, eval_laguerre

from orthoasym.jacobi import (
    DegenerateBasisError,
    JacobiCoefficients,
    RecurrenceOverflowError,
    carleman_report,
    eval_polynomials,
    jost_solve,
    load_coefficients_csv,
    polynomial_matrix,
    polynomial_solution,
    solve_recurrence,
    wronskian,
    wronskian_profile,
)


def test_builtin_coefficients():
    n = np.arange(6)
    h = JacobiCoefficients.hermite()
    assert np.allclose(h.a(n), np.sqrt((n + 1) / 2))
    assert np.allclose(h.b(n), 0)
    lg = JacobiCoefficients.laguerre(0.5)
    assert np.allclose(lg.a(n), np.sqrt((n + 1) * (n + 1.5)))
    assert np.allclose(lg.b(n), 2 * n + 1.5)
    u = JacobiCoefficients.chebyshev_u()
    assert np.allclose(u.a(n), 0.5)
    pm = JacobiCoefficients.power_model(0.7, 0.5)
    assert np.allclose(pm.a(n), 0.7 * (n + 1) ** 0.5)


@pytest.mark.parametrize("lam", [-1.7, -0.3, 0.0, 0.8, 2.4])
def test_hermite_matches_scipy(lam):
    P = eval_polynomials(JacobiCoefficients.hermite(), lam, 30).values
    ref = [eval_hermite(n, lam) / math.sqrt(2.0 ** n * math.factorial(n)) for n in range(31)]
    assert np.allclose(P, ref, rtol=1e-11, atol=1e-13)


@pytest.mark.parametrize("lam", [0.2, 1.3, 4.0])
def test_laguerre_matches_scipy(lam):
    # orthonormal and positive leading coefficient: (-1)^n L_n
    P = eval_polynomials(JacobiCoefficients.laguerre(0.0), lam, 25).values
    ref = [(-1) ** n * eval_laguerre(n, lam) for n in range(26)]
    assert np.allclose(P, ref, rtol=1e-10, atol=1e-12)


@given(st.floats(min_value=-0.99, max_value=0.99))
@settings(max_examples=50, deadline=None)
def test_chebyshev_u_matches_scipy(lam):
    P = eval_polynomials(JacobiCoefficients.chebyshev_u(), lam, 40).values
    ref = eval_chebyu(np.arange(41), lam)
    assert np.allclose(P, ref, atol=1e-10)


# subnormal λ makes odd-degree values subnormal, with too few bits for a relative residual
@given(st.floats(min_value=-3, max_value=3, allow_subnormal=False), st.integers(min_value=2, max_value=500))
@settings(max_examples=40, deadline=None)
def test_recurrence_residual_small(lam, N):
    tab = eval_polynomials(JacobiCoefficients.hermite(), lam, N)
    assert np.max(tab.residuals()) < 1e-13


def test_eval_rejects_bad_N():
    with pytest.raises(ValueError):
        eval_polynomials(JacobiCoefficients.hermite(), 0.3, 0)


def test_overflow_reported_at_first_index():
    with pytest.raises(RecurrenceOverflowError):
        polynomial_matrix(JacobiCoefficients.chebyshev_u(), [50.0], 400)


def test_rescaled_solution_survives_overflow():
    c = JacobiCoefficients.chebyshev_u()
    s = polynomial_solution(c, 50.0, 400)
    # U_n(50) grows like (50 + sqrt(2499))^n
    rate = math.log(50 + math.sqrt(2499))
    k = s.exponent[-1] * 500 * math.log(2) + math.log(abs(s.mantissa[-1]))
    assert abs(k / 400 - rate) < 0.01
    assert np.max(s.residuals()[1:]) < 1e-12


def test_custom_validation(tmp_path):
    with pytest.raises(ValueError, match="positive"):
        JacobiCoefficients.custom([1.0, -1.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        JacobiCoefficients.laguerre(-1.0)
    p = tmp_path / "c.csv"
    p.write_text("a,b\n0.5,0\n0.5,0\n0.5,0\n0.5,0\n")
    c = load_coefficients_csv(p)
    v = polynomial_matrix(c, [0.3], 3)[:, 0]
    assert np.allclose(v, eval_chebyu(np.arange(4), 0.3))


def test_carleman_verdicts():
    assert carleman_report(JacobiCoefficients.hermite(), 1000).verdict == "Diverges"
    assert carleman_report(JacobiCoefficients.power_model(1.0, 1.5), 1000).verdict == "Converges"


@given(st.floats(min_value=-2.5, max_value=2.5))
@settings(max_examples=15, deadline=None)
def test_wronskian_of_polynomial_pair_is_constant(lam):
    c = JacobiCoefficients.hermite()
    P = polynomial_solution(c, lam, 2000)
    Q = solve_recurrence(c, lam, 0, 0.0, 1.0, 2000)
    _, W = wronskian_profile(P, Q)
    assert np.max(np.abs(W - W[0])) <= 1e-10 * abs(W[0])


def test_wronskian_rejects_mismatched_z():
    c = JacobiCoefficients.hermite()
    with pytest.raises(ValueError):
        wronskian(polynomial_solution(c, 0.1, 10), polynomial_solution(c, 0.2, 10), 3)


def test_jost_pair_wronskian_constant():
    c = JacobiCoefficients.power_model(1.0, 1.5)
    fp, fm = jost_solve(c, 0.3 + 0.2j, 4000)
    _, W = wronskian_profile(fp, fm)
    assert np.max(np.abs(W - W[-1])) <= 1e-10 * abs(W[-1])
    with pytest.raises(ValueError):
        jost_solve(JacobiCoefficients.hermite(), 0.3, 100)
    assert issubclass(DegenerateBasisError, ValueError)
