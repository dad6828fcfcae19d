"""Gauss quadrature for the spectral measure, density estimates and the map U.

``U`` sends a function f on the absolutely continuous spectrum to the sequence
``u_n = int P_n(lam) sqrt(tau(lam)) f(lam) dlam``; it is isometric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from numba import njit

from ._io import write_csv
from .jacobi import JacobiCoefficients, iter_polynomials
from .quad import composite_gauss


class NonConvergenceError(RuntimeError):
    """The tridiagonal eigensolver hit its iteration cap at ``index``."""

    def __init__(self, index: int):
        self.index = int(index)
        super().__init__(f"QL iteration did not converge for eigenvalue index {index}")


@njit(cache=True)
def _tql_first(d, e, z, max_iter):
    # implicit-shift QL on a symmetric tridiagonal matrix; e[i] couples i and i+1,
    # z is the first row of the accumulated eigenvector matrix
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.220446049250313e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def tridiagonal_eigen_first(diag, offdiag, max_iter: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and first eigenvector components of a symmetric tridiagonal matrix."""
    d = np.array(diag, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = np.asarray(offdiag, dtype=float)[: n - 1]
    z = np.zeros(n)
    z[0] = 1.0
    flag = _tql_first(d, e, z, max_iter)
    if flag >= 0:
        raise NonConvergenceError(flag)
    order = np.argsort(d, kind="stable")
    return d[order], z[order]


@dataclass(frozen=True)
class SpectralData:
    """Gauss rule of the N x N truncation: ``sum_j w_j g(lam_j)`` approximates ``int g drho``."""

    nodes: np.ndarray
    weights: np.ndarray
    N: int

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.nodes ** k))

    def to_csv(self, path) -> None:
        write_csv(path, ["lambda", "weight"], zip(self.nodes, self.weights))


def truncation(coeffs: JacobiCoefficients, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal ``b_0..b_{N-1}`` and off-diagonal ``a_0..a_{N-2}`` of the N x N section."""
    a, b = coeffs.arrays(N - 1)
    return b.astype(float), a[: N - 1].astype(float)


def diagonalize_truncation(coeffs: JacobiCoefficients, N: int) -> SpectralData:
    """Gauss nodes and weights from the ``N x N`` section (Golub-Welsch)."""
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    N = int(N)
    d, e = truncation(coeffs, N)
    nodes, z = tridiagonal_eigen_first(d, e)
    w = z ** 2
    return SpectralData(nodes, w, N)


def sturm_count(coeffs: JacobiCoefficients, N: int, x: float) -> int:
    """Number of eigenvalues of the N x N section below ``x`` (zeros of P_N below x)."""
    d, e = truncation(coeffs, N)
    count = 0
    q = d[0] - x
    for i in range(N):
        if i > 0:
            q = d[i] - x - e[i - 1] ** 2 / q
        if q == 0.0:
            q = -1e-300
        if q < 0:
            count += 1
    return count


# densities


@dataclass(frozen=True)
class DensityEstimate:
    """Samples of the spectral density on a grid."""

    grid: np.ndarray
    tau: np.ndarray

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < self.grid[0]) or np.any(lam > self.grid[-1]):
            raise ValueError("evaluation outside the density grid")
        return np.interp(lam, self.grid, self.tau)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    def to_csv(self, path) -> None:
        write_csv(path, ["lambda", "tau"], zip(self.grid, self.tau))


def estimate_density(sd: SpectralData, grid, bandwidth_rule: Optional[int] = None) -> DensityEstimate:
    """Weight-per-spacing density estimate interpolated to ``grid``.

    ``tau(lam_j) ~ w_j / ((lam_{j+1} - lam_{j-1}) / 2)`` at interior nodes.

    Parameters
    ----------
    bandwidth_rule
        Optional half-width (in nodes) of a moving average applied to the
        node-level estimates; ``None`` means no smoothing.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if sd.N < 3:
        raise ValueError("density estimate needs at least 3 nodes")
    lo, hi = sd.nodes[0], sd.nodes[-1]
    out = (grid <= lo) | (grid >= hi)
    if np.any(out):
        raise ValueError(f"grid point {grid[out][0]} outside node range ({lo}, {hi})")
    x = sd.nodes[1:-1]
    tau = sd.weights[1:-1] / (0.5 * (sd.nodes[2:] - sd.nodes[:-2]))
    if bandwidth_rule:
        k = int(bandwidth_rule)
        ker = np.ones(2 * k + 1) / (2 * k + 1)
        tau = np.convolve(np.pad(tau, k, mode="edge"), ker, mode="valid")
    vals = np.interp(grid, x, tau)
    return DensityEstimate(grid, vals)


def builtin_density(coeffs: JacobiCoefficients) -> tuple[Callable, tuple[float, float]]:
    """Closed-form spectral density and its absolutely continuous interval."""
    k = coeffs.kind
    if k == "hermite":
        return (lambda x: np.exp(-np.asarray(x) ** 2) / math.sqrt(math.pi)), (-math.inf, math.inf)
    if k == "laguerre":
        al = coeffs.alpha
        c = 1.0 / math.gamma(al + 1.0)

        def tau(x):
            x = np.asarray(x, dtype=float)
            return c * np.where(x > 0, np.abs(x) ** al * np.exp(-x), 0.0)

        return tau, (0.0, math.inf)
    if k == "chebyshev_u":
        return (lambda x: (2 / math.pi) * np.sqrt(np.clip(1 - np.asarray(x) ** 2, 0, None))), (-1.0, 1.0)
    if k == "power" and coeffs.ell == 1.0:
        two_al = 2.0 * coeffs.alpha
        return (lambda x: 1.0 / (two_al * np.cosh(math.pi * np.asarray(x) / two_al))), (-math.inf, math.inf)
    raise ValueError(f"no closed-form density for {coeffs.label()}")


Weight = Union[None, DensityEstimate, SpectralData, Callable]


def _resolve_weight(coeffs, weight, spectrum, support=None):
    if weight is None:
        return builtin_density(coeffs)
    if isinstance(weight, SpectralData):
        lo, hi = support if support is not None else (weight.nodes[1], weight.nodes[-2])
        grid = np.linspace(lo, hi, 4001)
        weight = estimate_density(weight, grid)
    if isinstance(weight, DensityEstimate):
        return weight, weight.support
    if callable(weight):
        if spectrum is None:
            raise ValueError("a callable weight needs an explicit spectrum interval")
        return weight, tuple(spectrum)
    raise TypeError(f"unsupported weight {type(weight).__name__}")


def _panel_count(coeffs, N, support, min_panels):
    zeros = sturm_count(coeffs, N + 1, support[1]) - sturm_count(coeffs, N + 1, support[0])
    # phase of P_N advances about pi per zero; keep under pi/4 per panel
    return max(min_panels, 4 * zeros + 4)


def apply_U(
    coeffs: JacobiCoefficients,
    weight: Weight,
    f: Callable,
    N: int,
    support: tuple[float, float],
    spectrum: tuple[float, float] | None = None,
    order: int = 10,
    min_panels: int = 16,
) -> np.ndarray:
    """Coefficients ``u_0..u_N`` of ``f`` in the orthonormal polynomial basis.

    Parameters
    ----------
    weight
        ``None`` for the closed-form density of a built-in family, a
        :class:`DensityEstimate`, a :class:`SpectralData` (density estimated on
        the fly) or a callable together with ``spectrum``.
    f
        Vectorized function, vanishing outside ``support``.
    support
        Interval containing the support of ``f``; must lie inside the spectrum.
    """
    tau, spec = _resolve_weight(coeffs, weight, spectrum, support)
    c1, c2 = float(support[0]), float(support[1])
    if not c1 < c2:
        raise ValueError("empty support")
    if c1 < spec[0] or c2 > spec[1]:
        raise ValueError(f"support ({c1}, {c2}) exceeds the spectrum interval {spec}")
    panels = _panel_count(coeffs, N, (c1, c2), min_panels)
    x, w = composite_gauss(c1, c2, panels, order)
    g = w * np.sqrt(tau(x)) * np.asarray(f(x), dtype=float)
    u = np.empty(N + 1)
    if not np.any(g):
        u[:] = 0.0
        return u
    for n, p in iter_polynomials(coeffs, x, N):
        u[n] = float(np.dot(p, g))
    return u


def l2_norm_sq(f: Callable, support: tuple[float, float], panels: int = 400, order: int = 10) -> float:
    """``int |f|^2`` over ``support`` by composite Gauss-Legendre."""
    x, w = composite_gauss(support[0], support[1], panels, order)
    return float(np.sum(w * np.abs(f(x)) ** 2))


def synthesize(coeffs: JacobiCoefficients, weight: Weight, u: np.ndarray, grid, spectrum=None) -> np.ndarray:
    """``sum_n u_n P_n(lam) sqrt(tau(lam))`` on ``grid`` (the adjoint map applied to ``u``)."""
    grid = np.asarray(grid, dtype=float)
    tau, _ = _resolve_weight(coeffs, weight, spectrum)
    acc = np.zeros_like(grid)
    for n, p in iter_polynomials(coeffs, grid, len(u) - 1):
        acc += u[n] * p
    return acc * np.sqrt(tau(grid))
