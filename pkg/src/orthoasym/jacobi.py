"""Jacobi recurrence coefficients, orthonormal polynomials and recurrence solutions.

The recurrence is

    a_{n-1} u_{n-1} + b_n u_n + a_n u_{n+1} = z u_n,   a_{-1} = 0,

and the orthonormal polynomials are the solution with P_0 = 1.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

KINDS = ("hermite", "laguerre", "chebyshev_u", "power", "custom")

# rescaling step for long recurrences: multiplying by 2**STEP is exact
_STEP = 500
_BIG = 2.0 ** _STEP
_HI = 1e150
_LO = 1e-150


class RecurrenceOverflowError(ArithmeticError):
    """A recurrence produced a non-finite value; ``index`` is the first bad n."""

    def __init__(self, index: int, msg: str | None = None):
        self.index = int(index)
        super().__init__(msg or f"non-finite recurrence value at n={index}")


class DegenerateBasisError(ValueError):
    """Two solutions are numerically linearly dependent."""


@dataclass(frozen=True)
class JacobiCoefficients:
    """Off-diagonal ``a_n > 0`` and diagonal ``b_n`` of a Jacobi matrix.

    Use the constructors :meth:`hermite`, :meth:`laguerre`, :meth:`chebyshev_u`,
    :meth:`power_model`, :meth:`custom` or :func:`load_coefficients_csv`.
    """

    kind: str
    alpha: Optional[float] = None
    ell: Optional[float] = None
    a_table: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    b_table: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if self.kind == "laguerre":
            if self.alpha is None or not self.alpha > -1:
                raise ValueError("Laguerre requires alpha > -1")
        if self.kind == "power":
            if self.alpha is None or not self.alpha > 0:
                raise ValueError("PowerModel requires alpha > 0")
            if self.ell is None or not self.ell > 0:
                raise ValueError("PowerModel requires ell > 0")
        if self.kind == "custom":
            a, b = self.a_table, self.b_table
            if a is None or b is None or len(a) != len(b) or len(a) == 0:
                raise ValueError("custom coefficients need equal-length a and b tables")
            if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
                raise ValueError("custom coefficients must be finite")
            bad = np.nonzero(a <= 0)[0]
            if bad.size:
                raise ValueError(f"custom a_n must be positive; a[{bad[0]}] = {a[bad[0]]}")

    # constructors
    @classmethod
    def hermite(cls) -> "JacobiCoefficients":
        return cls("hermite")

    @classmethod
    def laguerre(cls, alpha: float = 0.0) -> "JacobiCoefficients":
        return cls("laguerre", alpha=float(alpha))

    @classmethod
    def chebyshev_u(cls) -> "JacobiCoefficients":
        return cls("chebyshev_u")

    @classmethod
    def power_model(cls, alpha: float, ell: float) -> "JacobiCoefficients":
        return cls("power", alpha=float(alpha), ell=float(ell))

    @classmethod
    def custom(cls, a: Sequence[float], b: Sequence[float]) -> "JacobiCoefficients":
        a = np.array(a, dtype=float)
        b = np.array(b, dtype=float)
        a.setflags(write=False)
        b.setflags(write=False)
        return cls("custom", a_table=a, b_table=b)

    @property
    def max_index(self) -> Optional[int]:
        """Largest n with known coefficients (``None`` when unbounded)."""
        return None if self.kind != "custom" else len(self.a_table) - 1

    def label(self) -> str:
        if self.kind == "laguerre":
            return f"laguerre(alpha={self.alpha:g})"
        if self.kind == "power":
            return f"power(alpha={self.alpha:g}, ell={self.ell:g})"
        return self.kind

    def _check_range(self, n: np.ndarray) -> None:
        if self.kind == "custom" and n.size and n.max() > self.max_index:
            raise IndexError(
                f"custom coefficients known for n <= {self.max_index}, requested n={int(n.max())}"
            )

    def a(self, n):
        """Off-diagonal coefficients; ``a(-1) = 0``."""
        n_arr = np.asarray(n)
        scalar = n_arr.ndim == 0
        n_arr = np.atleast_1d(n_arr).astype(np.int64)
        self._check_range(n_arr)
        nf = n_arr.astype(float)
        if self.kind == "hermite":
            out = np.sqrt((nf + 1.0) / 2.0)
        elif self.kind == "laguerre":
            out = np.sqrt((nf + 1.0) * (nf + 1.0 + self.alpha))
        elif self.kind == "chebyshev_u":
            out = np.full(nf.shape, 0.5)
        elif self.kind == "power":
            out = self.alpha * (nf + 1.0) ** self.ell
        else:
            out = self.a_table[np.clip(n_arr, 0, None)].astype(float)
        out = np.where(n_arr < 0, 0.0, out)
        return float(out[0]) if scalar else out

    def b(self, n):
        """Diagonal coefficients."""
        n_arr = np.asarray(n)
        scalar = n_arr.ndim == 0
        n_arr = np.atleast_1d(n_arr).astype(np.int64)
        if np.any(n_arr < 0):
            raise IndexError("b(n) is defined for n >= 0")
        self._check_range(n_arr)
        nf = n_arr.astype(float)
        if self.kind == "laguerre":
            out = 2.0 * nf + self.alpha + 1.0
        elif self.kind == "custom":
            out = self.b_table[n_arr].astype(float)
        else:
            out = np.zeros(nf.shape)
        return float(out[0]) if scalar else out

    def arrays(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """``(a_0..a_N, b_0..b_N)``."""
        n = np.arange(N + 1)
        return self.a(n), self.b(n)


def load_coefficients_csv(path: str | Path) -> JacobiCoefficients:
    """Read custom coefficients from a CSV with header ``a,b`` (row n gives a_n, b_n)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["a", "b"]:
        raise ValueError(f"{path}: expected header 'a,b'")
    a, b = [], []
    for i, row in enumerate(rows[1:]):
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"{path}: row {i} has {len(row)} columns")
        a.append(float(row[0]))
        b.append(float(row[1]))
    return JacobiCoefficients.custom(a, b)


# polynomials


@dataclass(frozen=True)
class PolynomialTable:
    """Values ``P_0(lam) .. P_N(lam)`` of the orthonormal polynomials."""

    lam: float
    values: np.ndarray
    coeffs: JacobiCoefficients

    @property
    def N(self) -> int:
        return len(self.values) - 1

    def residuals(self) -> np.ndarray:
        """Relative recurrence residuals for n = 0..N-1."""
        return recurrence_residuals(self.coeffs, self.lam, self.values, n_lo=0, boundary=True)


def recurrence_residuals(
    coeffs: JacobiCoefficients, z, u: np.ndarray, n_lo: int = 0, boundary: bool = False
) -> np.ndarray:
    """Relative recurrence residual at every interior index of ``u``.

    ``u[k]`` holds u_{n_lo+k}. With ``boundary=True`` (only for ``n_lo == 0``)
    the row n = 0 with u_{-1} = 0 is included as well.
    """
    u = np.asarray(u)
    if boundary:
        if n_lo != 0:
            raise ValueError("the boundary row exists only for n_lo = 0")
        prev = np.concatenate([[0.0], u[:-2]])
        cur, nxt = u[:-1], u[1:]
        n = np.arange(0, len(u) - 1)
    else:
        prev, cur, nxt = u[:-2], u[1:-1], u[2:]
        n = np.arange(n_lo + 1, n_lo + len(u) - 1)
    t1 = coeffs.a(n - 1) * prev
    t2 = coeffs.b(n) * cur
    t3 = coeffs.a(n) * nxt
    res = np.abs(t1 + t2 + t3 - z * cur)
    scale = np.abs(t1) + np.abs(t2) + np.abs(t3)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(scale > 0, res / scale, res)


def eval_polynomials(coeffs: JacobiCoefficients, lam: float, N: int) -> PolynomialTable:
    """Orthonormal polynomials ``P_0..P_N`` at ``lam`` by forward recurrence.

    Raises
    ------
    ValueError
        If ``N < 1``.
    RecurrenceOverflowError
        At the first index where a value stops being finite.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"N must be an integer >= 1, got {N}")
    N = int(N)
    vals = polynomial_matrix(coeffs, np.array([float(lam)]), N)[:, 0]
    return PolynomialTable(float(lam), vals, coeffs)


def polynomial_matrix(coeffs: JacobiCoefficients, lams, N: int) -> np.ndarray:
    """``P_n(lam_j)`` for n = 0..N as an array of shape ``(N+1, len(lams))``."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    a, b = coeffs.arrays(N)
    out = np.empty((N + 1, lams.size))
    out[0] = 1.0
    if N >= 1:
        out[1] = (lams - b[0]) / a[0]
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, N):
            out[n + 1] = ((lams - b[n]) * out[n] - a[n - 1] * out[n - 1]) / a[n]
    bad = ~np.isfinite(out)
    if bad.any():
        first = int(np.nonzero(bad.any(axis=1))[0][0])
        raise RecurrenceOverflowError(first)
    return out


def iter_polynomials(coeffs: JacobiCoefficients, lams, N: int):
    """Yield ``(n, P_n(lams))`` for n = 0..N without storing the whole table."""
    lams = np.asarray(lams, dtype=float)
    a, b = coeffs.arrays(N)
    prev = np.zeros_like(lams)
    cur = np.ones_like(lams)
    yield 0, cur
    for n in range(N):
        nxt = ((lams - b[n]) * cur - (a[n - 1] if n > 0 else 0.0) * prev) / a[n]
        if not np.all(np.isfinite(nxt)):
            raise RecurrenceOverflowError(n + 1)
        prev, cur = cur, nxt
        yield n + 1, cur


# Carleman


@dataclass(frozen=True)
class CarlemanReport:
    partial_sum: float
    verdict: str  # "Diverges" | "Converges" | "Undetermined"
    N: int


def carleman_report(coeffs: JacobiCoefficients, N: int) -> CarlemanReport:
    """Partial sum of ``1/a_n`` up to ``N`` and the known verdict for the family."""
    if N < 10:
        raise ValueError("carleman_report needs N >= 10")
    a = coeffs.a(np.arange(N + 1))
    partial = float(np.sum(1.0 / a))
    if coeffs.kind in ("hermite", "laguerre", "chebyshev_u"):
        verdict = "Diverges"
    elif coeffs.kind == "power":
        verdict = "Diverges" if coeffs.ell <= 1 else "Converges"
    else:
        verdict = "Undetermined"
    return CarlemanReport(partial, verdict, int(N))


# general solutions


@dataclass(frozen=True)
class RecurrenceSolution:
    """A solution on the window ``[n_lo, n_hi]``.

    Values are stored as ``mantissa * 2**(500*exponent)`` so that long
    recurrences never overflow; use :attr:`values` for plain numbers.
    """

    z: complex
    n_lo: int
    mantissa: np.ndarray
    exponent: np.ndarray
    label: str  # "Forward" | "Backward" | "JostPlus" | "JostMinus"
    coeffs: JacobiCoefficients = field(compare=False, repr=False)

    @property
    def n_hi(self) -> int:
        return self.n_lo + len(self.mantissa) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_lo, self.n_hi + 1)

    @property
    def values(self) -> np.ndarray:
        return _ldexp_c(self.mantissa, _STEP * self.exponent)

    def value(self, n: int) -> complex:
        k = self._pos(n)
        return complex(_ldexp_c(self.mantissa[k], _STEP * int(self.exponent[k])))

    def _pos(self, n: int) -> int:
        if not self.n_lo <= n <= self.n_hi:
            raise IndexError(f"n={n} outside solution window [{self.n_lo}, {self.n_hi}]")
        return n - self.n_lo

    def residuals(self) -> np.ndarray:
        """Relative residual at interior indices, each triple rescaled to its largest exponent."""
        m, e = self.mantissa, self.exponent
        top = np.maximum(np.maximum(e[:-2], e[1:-1]), e[2:])
        trip = [_ldexp_c(m[k:len(m) - 2 + k], _STEP * (e[k:len(e) - 2 + k] - top)) for k in range(3)]
        n = np.arange(self.n_lo + 1, self.n_hi)
        t1 = self.coeffs.a(n - 1) * trip[0]
        t2 = self.coeffs.b(n) * trip[1]
        t3 = self.coeffs.a(n) * trip[2]
        res = np.abs(t1 + t2 + t3 - self.z * trip[1])
        scale = np.abs(t1) + np.abs(t2) + np.abs(t3)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(scale > 0, res / scale, res)


def _ldexp_c(m, e):
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return np.ldexp(m.real, e) + 1j * np.ldexp(m.imag, e)
    return np.ldexp(m, e)


def solve_recurrence(
    coeffs: JacobiCoefficients,
    z: complex,
    n0: int,
    u_n0: complex,
    u_n0p1: complex,
    n_end: int,
    label: str | None = None,
) -> RecurrenceSolution:
    """Solve the recurrence from the pair ``(u_{n0}, u_{n0+1})``.

    Runs forward when ``n_end > n0 + 1`` and backward when ``n_end < n0``.
    """
    z = complex(z)
    forward = n_end > n0
    if forward:
        lo, hi = n0, max(n_end, n0 + 1)
    else:
        if n_end < 0:
            raise ValueError("backward recurrence cannot go below n = 0")
        lo, hi = n_end, n0 + 1
    a, b = coeffs.arrays(hi)
    m = np.zeros(hi - lo + 1, dtype=complex)
    e = np.zeros(hi - lo + 1, dtype=np.int64)
    cur_e = 0
    if forward:
        p, c = complex(u_n0), complex(u_n0p1)
        m[0], m[1] = p, c
        for n in range(n0 + 1, hi):
            nxt = ((z - b[n]) * c - a[n - 1] * p) / a[n]
            p, c = c, nxt
            big = max(abs(p), abs(c))
            if not math.isfinite(big):
                raise RecurrenceOverflowError(n + 1)
            if big > _HI:
                p, c, cur_e = p / _BIG, c / _BIG, cur_e + 1
                m[n - lo] /= _BIG  # keep the stored pair on one scale
                e[n - lo] = cur_e
            elif 0 < big < _LO:
                p, c, cur_e = p * _BIG, c * _BIG, cur_e - 1
                m[n - lo] *= _BIG
                e[n - lo] = cur_e
            m[n + 1 - lo] = c
            e[n + 1 - lo] = cur_e
        lab = label or "Forward"
    else:
        c, nx = complex(u_n0), complex(u_n0p1)
        m[-2], m[-1] = c, nx
        for n in range(n0, lo, -1):
            prv = ((z - b[n]) * c - a[n] * nx) / a[n - 1]
            nx, c = c, prv
            big = max(abs(nx), abs(c))
            if not math.isfinite(big):
                raise RecurrenceOverflowError(n - 1)
            if big > _HI:
                nx, c, cur_e = nx / _BIG, c / _BIG, cur_e + 1
                m[n - lo] /= _BIG
                e[n - lo] = cur_e
            elif 0 < big < _LO:
                nx, c, cur_e = nx * _BIG, c * _BIG, cur_e - 1
                m[n - lo] *= _BIG
                e[n - lo] = cur_e
            m[n - 1 - lo] = c
            e[n - 1 - lo] = cur_e
        lab = label or "Backward"
    return RecurrenceSolution(z, lo, m, e, lab, coeffs)


def polynomial_solution(coeffs: JacobiCoefficients, z: complex, N: int) -> RecurrenceSolution:
    """Orthonormal polynomial solution at complex ``z`` on ``[0, N]``."""
    return solve_recurrence(coeffs, z, 0, 1.0, (complex(z) - coeffs.b(0)) / coeffs.a(0), N)


def wronskian(u: RecurrenceSolution, v: RecurrenceSolution, n: int) -> complex:
    """``a_n (u_n v_{n+1} - u_{n+1} v_n)``."""
    if u.coeffs != v.coeffs:
        raise ValueError("solutions belong to different coefficient families")
    if abs(u.z - v.z) > 1e-14 * (1 + abs(u.z)):
        raise ValueError("solutions have different spectral parameters")
    i0, i1 = u._pos(n), u._pos(n + 1)
    j0, j1 = v._pos(n), v._pos(n + 1)
    t1 = u.mantissa[i0] * v.mantissa[j1]
    e1 = int(u.exponent[i0] + v.exponent[j1])
    t2 = u.mantissa[i1] * v.mantissa[j0]
    e2 = int(u.exponent[i1] + v.exponent[j0])
    top = max(e1, e2)
    d = complex(_ldexp_c(t1, _STEP * (e1 - top))) - complex(_ldexp_c(t2, _STEP * (e2 - top)))
    return complex(_ldexp_c(u.coeffs.a(n) * d, _STEP * top))


def wronskian_profile(u: RecurrenceSolution, v: RecurrenceSolution) -> tuple[np.ndarray, np.ndarray]:
    """Wronskian at every index shared by both windows."""
    lo, hi = max(u.n_lo, v.n_lo), min(u.n_hi, v.n_hi) - 1
    ns = np.arange(lo, hi + 1)
    return ns, np.array([wronskian(u, v, int(k)) for k in ns])


# solutions with prescribed behaviour at infinity


def _superlinear(coeffs: JacobiCoefficients, N: int) -> bool:
    a_hi, a_mid = coeffs.a(N), coeffs.a(N // 2)
    return math.log2(a_hi / a_mid) > 1.0


def jost_solve(
    coeffs: JacobiCoefficients, z: complex, N_anchor: int, n_lo: int = 0
) -> tuple[RecurrenceSolution, RecurrenceSolution]:
    """Solutions ``f^(+), f^(-)`` with ``f_n ~ a_n^{-1/2} exp(+-i pi n / 2)``.

    Built by backward recurrence from the leading behaviour at ``N_anchor`` and
    ``N_anchor + 1``; valid for superlinearly growing ``a_n`` (power law with
    exponent above one).
    """
    if coeffs.kind == "power":
        if coeffs.ell <= 1:
            raise ValueError("Jost anchors need ell > 1")
    elif coeffs.kind == "custom":
        if coeffs.max_index is None or coeffs.max_index < N_anchor + 1:
            raise ValueError("custom table too short for the anchor")
        if not _superlinear(coeffs, N_anchor):
            raise ValueError("custom a_n do not grow faster than linearly near the anchor")
    else:
        raise ValueError(f"Jost anchors not admissible for {coeffs.kind}")
    if not 0 <= n_lo < N_anchor:
        raise ValueError("need 0 <= n_lo < N_anchor")
    sols = []
    for sign, lab in ((1, "JostPlus"), (-1, "JostMinus")):
        u0 = coeffs.a(N_anchor) ** -0.5 * np.exp(sign * 0.5j * np.pi * (N_anchor % 4))
        u1 = coeffs.a(N_anchor + 1) ** -0.5 * np.exp(sign * 0.5j * np.pi * ((N_anchor + 1) % 4))
        s = solve_recurrence(coeffs, z, N_anchor, u0, u1, n_lo, label=lab)
        # trim the helper index N_anchor + 1
        sols.append(RecurrenceSolution(s.z, s.n_lo, s.mantissa[:-1], s.exponent[:-1], lab, coeffs))
    fp, fm = sols
    if abs(wronskian(fp, fm, N_anchor - 1)) < 1e-13:
        raise DegenerateBasisError("Jost solutions are linearly dependent")
    return fp, fm


def local_angle(coeffs: JacobiCoefficients, lam: float, n) -> np.ndarray:
    """Local phase increment ``arccos((lam - b_n) / (2 sqrt(a_{n-1} a_n)))`` for n >= 1."""
    n = np.asarray(n)
    c = (lam - coeffs.b(n)) / (2.0 * np.sqrt(coeffs.a(n - 1) * coeffs.a(n)))
    if np.any(np.abs(c) >= 1):
        raise ValueError(f"lambda={lam} is not in the oscillatory region at some requested n")
    return np.arccos(c)


def wkb_pair(
    coeffs: JacobiCoefficients, lam: float, n_hi: int, n_lo: int = 0, anchor: int | None = None
) -> tuple[RecurrenceSolution, RecurrenceSolution]:
    """Complex-conjugate oscillating solutions at a real ``lam``.

    Anchored at ``anchor`` (default ``2 * n_hi``) with local amplitude
    ``(a_n sin theta_n)^{-1/2}`` and local increment ``theta_n``, then continued
    backward; returned on ``[n_lo, n_hi]``.
    """
    N = int(anchor if anchor is not None else 2 * n_hi)
    if N <= n_hi:
        raise ValueError("anchor must exceed n_hi")
    th = local_angle(coeffs, lam, np.array([N, N + 1]))
    amp = (coeffs.a(np.array([N, N + 1])) * np.sin(th)) ** -0.5
    ph1 = 0.5 * (th[0] + th[1])
    out = []
    for sign in (1, -1):
        s = solve_recurrence(coeffs, lam, N, amp[0], amp[1] * np.exp(sign * 1j * ph1), n_lo)
        k = n_hi - s.n_lo + 1
        out.append(RecurrenceSolution(s.z, s.n_lo, s.mantissa[:k], s.exponent[:k], "Backward", coeffs))
    return out[0], out[1]


@dataclass(frozen=True)
class WronskianLimitReport:
    mode: str
    window: tuple[int, int]
    mean: float
    drift: float
    verdict: bool
    varpi: float
    v_exponent: float
    v_vs_a_exponent: float
    amplitude_product_drift: float


def wronskian_limit_check(
    coeffs: JacobiCoefficients,
    u_plus: RecurrenceSolution,
    u_minus: RecurrenceSolution,
    mode: str = "generic",
    N_int: int = 0,
    omega_n: Callable[[np.ndarray], np.ndarray] | None = None,
    drift_tol: float = 0.02,
    min_points: int = 10,
) -> WronskianLimitReport:
    """Check the limit behaviour of amplitude products of a solution pair.

    With ``v_n = |u+_n u-_n|^{1/2}`` and phase ``Omega_n = arg(u+_n / u-_n) / 2``:

    * ``generic``: ``a_n v_n v_{n+1}`` has a nonzero limit and the limiting
      increment ``varpi`` is not a multiple of pi;
    * ``degenerate``: ``a_n v_n v_{n+1} omega_n`` has a nonzero limit, where
      ``omega_n = Omega_{n+1} - Omega_n - pi N_int`` unless ``omega_n`` is given.

    Limits are judged on the last window ``[0.9 n_hi, n_hi]``; drift is
    ``(max - min) / |mean|`` there.
    """
    if mode not in ("generic", "degenerate"):
        raise ValueError(f"unknown mode {mode!r}")
    lo = max(u_plus.n_lo, u_minus.n_lo)
    hi = min(u_plus.n_hi, u_minus.n_hi)
    ns = np.arange(lo, hi + 1)
    up = u_plus.values[ns - u_plus.n_lo]
    um = u_minus.values[ns - u_minus.n_lo]
    v = np.sqrt(np.abs(up * um))
    Om = 0.5 * np.unwrap(np.angle(up / um))
    dOm = np.diff(Om)
    n_last = hi - 1
    w_lo = int(math.ceil(0.9 * n_last))
    sel = np.arange(max(w_lo, lo), n_last + 1) - lo
    if sel.size < min_points:
        raise ValueError(f"insufficient window length ({sel.size} points, need {min_points})")
    a = coeffs.a(ns[:-1])
    q = a * v[:-1] * v[1:]
    if mode == "degenerate":
        om = omega_n(ns[:-1]) if omega_n is not None else dOm - np.pi * N_int
        q = q * om
    qw = q[sel]
    mean = float(np.mean(qw))
    drift = float((qw.max() - qw.min()) / abs(mean)) if mean != 0 else math.inf
    varpi = float(np.angle(np.exp(1j * np.mean(dOm[sel]))))
    prod = a[sel] * v[sel] ** 2
    prod_drift = float((prod.max() - prod.min()) / np.mean(prod))
    fit = np.arange(max(lo, hi // 10, 1), hi + 1) - lo
    ln_n = np.log(ns[fit].astype(float))
    ln_v = np.log(v[fit])
    v_exp = float(np.polyfit(ln_n, ln_v, 1)[0])
    ln_a = np.log(coeffs.a(ns[fit]))
    v_a = float(np.polyfit(ln_a, ln_v, 1)[0]) if np.ptp(ln_a) > 1e-12 else float("nan")
    ok = bool(abs(mean) > 0 and drift <= drift_tol)
    if mode == "generic":
        ok = ok and abs(np.sin(varpi)) > 1e-6
    return WronskianLimitReport(mode, (int(ns[sel[0]]), int(ns[sel[-1]])), mean, drift, ok,
                                varpi, v_exp, v_a, prod_drift)
