"""Stationary-phase evaluation of

    G_n(t) = int_Delta exp(i (mu x_n + phi_n(mu) - theta(mu) t)) F(mu) dmu

and a direct adaptive quadrature oracle for the same integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from ._io import write_csv
from .quad import panel_rule


class NewtonDivergenceError(RuntimeError):
    pass


class PanelBudgetError(RuntimeError):
    pass


def _fd2(f: Callable, mu, rel: float = 1e-5):
    # central second difference of a first derivative
    mu = np.asarray(mu, dtype=float)
    h = rel * np.maximum(1.0, np.abs(mu))
    return (f(mu + h) - f(mu - h)) / (2 * h)


def _zero(n, mu):
    return np.zeros(np.broadcast(np.asarray(n), np.asarray(mu)).shape)


@dataclass(frozen=True)
class PhaseSpec:
    """Phase data of the oscillatory integral.

    Parameters
    ----------
    theta, theta_p : callables
        ``theta`` and its first derivative (vectorized).
    delta : (mu1, mu2)
        Integration interval.
    F : callable
        Amplitude, compactly supported in ``delta``.
    phi, phi_p : callables ``(n, mu)``, optional
        Perturbation ``phi_n`` and its mu-derivative; default zero.
    theta_pp, phi_pp : optional
        Second derivatives; finite differences of the first derivatives otherwise.
    support : (a, b), optional
        Interval containing the support of F (default ``delta``); quadrature
        panels start at its endpoints.
    """

    theta: Callable
    theta_p: Callable
    delta: tuple[float, float]
    F: Callable
    phi: Optional[Callable] = None
    phi_p: Optional[Callable] = None
    theta_pp: Optional[Callable] = None
    phi_pp: Optional[Callable] = None
    support: Optional[tuple[float, float]] = None
    tau_sign: int = field(init=False, default=0)

    def __post_init__(self):
        m1, m2 = map(float, self.delta)
        if not m1 < m2:
            raise ValueError("delta must be a nonempty interval")
        grid = np.linspace(m1, m2, 1000)
        tp = np.asarray(self.theta_p(grid), dtype=float)
        if np.any(tp <= 0):
            raise ValueError("theta' must be positive on delta")
        tpp = self.d2theta(grid)
        if np.any(tpp == 0) or not (np.all(tpp > 0) or np.all(tpp < 0)):
            raise ValueError("theta'' must have a fixed nonzero sign on delta")
        if abs(complex(self.F(m1))) > 1e-12 or abs(complex(self.F(m2))) > 1e-12:
            raise ValueError("F must vanish at the ends of delta")
        sup = self.support if self.support is not None else (m1, m2)
        if sup[0] < m1 or sup[1] > m2 or not sup[0] < sup[1]:
            raise ValueError("support must lie inside delta")
        object.__setattr__(self, "support", (float(sup[0]), float(sup[1])))
        object.__setattr__(self, "tau_sign", 1 if tpp[0] > 0 else -1)

    def d2theta(self, mu):
        if self.theta_pp is not None:
            return np.asarray(self.theta_pp(mu), dtype=float)
        return _fd2(self.theta_p, mu)

    def phi_n(self, n, mu):
        return _zero(n, mu) if self.phi is None else self.phi(n, mu)

    def dphi_n(self, n, mu):
        return _zero(n, mu) if self.phi_p is None else self.phi_p(n, mu)

    def d2phi_n(self, n, mu):
        if self.phi_p is None:
            return _zero(n, mu)
        if self.phi_pp is not None:
            return self.phi_pp(n, mu)
        return _fd2(lambda m: self.phi_p(n, m), mu)

    @property
    def window(self) -> tuple[float, float]:
        """``theta'(delta)`` as an ordered interval."""
        a, b = float(self.theta_p(self.delta[0])), float(self.theta_p(self.delta[1]))
        return (a, b) if a < b else (b, a)

    def h(self, xi: float) -> float:
        """Inverse of ``theta'`` on delta."""
        lo, hi = self.window
        if not lo <= xi <= hi:
            raise ValueError(f"{xi} outside theta'(delta) = ({lo}, {hi})")
        return brentq(lambda m: float(self.theta_p(m)) - xi, *self.delta, xtol=1e-15, rtol=1e-15)

    def h_vec(self, xi) -> np.ndarray:
        """Vectorized :meth:`h` (monotone table lookup then Newton polish)."""
        xi = np.asarray(xi, dtype=float)
        grid = np.linspace(*self.delta, 4001)
        tp = np.asarray(self.theta_p(grid), dtype=float)
        order = np.argsort(tp)
        mu = np.interp(xi, tp[order], grid[order])
        for _ in range(50):
            step = (np.asarray(self.theta_p(mu)) - xi) / self.d2theta(mu)
            mu = np.clip(mu - step, *self.delta)
            if np.all(np.abs(step) <= 1e-15 * (1 + np.abs(mu))):
                break
        return mu

    def amplitude_vec(self, xi) -> np.ndarray:
        """Vectorized :meth:`amplitude`; zero outside ``theta'(delta)``."""
        xi = np.asarray(xi, dtype=float)
        lo, hi = self.window
        inside = (xi > lo) & (xi < hi)
        mu = self.h_vec(np.clip(xi, lo, hi))
        return np.where(inside, np.sqrt(np.abs(1.0 / self.d2theta(mu))) * self.F(mu), 0.0)

    def h_prime(self, xi: float) -> float:
        return 1.0 / float(self.d2theta(self.h(xi)))

    def amplitude(self, xi: float) -> float:
        """``sqrt(|h'(xi)|) F(h(xi))``."""
        mu = self.h(xi)
        return math.sqrt(abs(1.0 / float(self.d2theta(mu)))) * self.F(mu)


@dataclass(frozen=True)
class OutOfWindow:
    """Marker for ``x_n / t`` outside (or on the edge of) ``theta'(delta)``."""

    xi: float
    boundary: bool = False

    def __bool__(self):
        return False


@dataclass(frozen=True)
class StationaryPhaseResult:
    mu_star: Optional[float]
    Psi: Optional[float]
    leading: complex
    in_window: bool


def classify(spec: PhaseSpec, xi: float) -> str:
    """``"inside"``, ``"boundary"`` or ``"outside"`` relative to ``theta'(delta)``."""
    lo, hi = spec.window
    band = 1e-6 * (1 + abs(xi))
    if abs(xi - lo) < band or abs(xi - hi) < band:
        return "boundary"
    return "inside" if lo < xi < hi else "outside"


def find_stationary_point(spec: PhaseSpec, x: float, t: float, n: int = 0, max_iter: int = 100):
    """Root of ``x + phi_n'(mu) - theta'(mu) t`` by Newton from ``h(x/t)``.

    Returns a float, or :class:`OutOfWindow` when ``x/t`` is not inside
    ``theta'(delta)``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    xi = x / t
    where = classify(spec, xi)
    if where != "inside":
        return OutOfWindow(xi, boundary=where == "boundary")
    mu = spec.h(xi)
    tol = (abs(x) + t) * 1e-12
    for _ in range(max_iter):
        g = x + float(spec.dphi_n(n, mu)) - float(spec.theta_p(mu)) * t
        if abs(g) <= tol:
            return float(mu)
        dg = float(spec.d2phi_n(n, mu)) - float(spec.d2theta(mu)) * t
        mu -= g / dg
        if not math.isfinite(mu):
            break
    raise NewtonDivergenceError(f"stationary point iteration diverged for n={n}, x={x}, t={t}")


def stationary_phase_eval(spec: PhaseSpec, x: float, t: float, n: int = 0) -> StationaryPhaseResult:
    """Leading stationary-phase term of ``G_n(t)``.

    ``sqrt(2 pi) exp(-i pi tau / 4) exp(i Psi) t^{-1/2} sqrt(|h'(x/t)|) F(h(x/t))``
    with ``Psi = mu* x + phi_n(mu*) - theta(mu*) t``; zero out of window.
    """
    mu = find_stationary_point(spec, x, t, n)
    if isinstance(mu, OutOfWindow):
        return StationaryPhaseResult(None, None, 0j, False)
    psi = mu * x + float(spec.phi_n(n, mu)) - float(spec.theta(mu)) * t
    amp = spec.amplitude(x / t)
    lead = math.sqrt(2 * math.pi) * np.exp(-0.25j * math.pi * spec.tau_sign + 1j * psi) * amp / math.sqrt(t)
    return StationaryPhaseResult(mu, psi, complex(lead), True)


def stationary_phase_batch(spec: PhaseSpec, ns, xs, t: float, max_iter: int = 100):
    """Vectorized :func:`stationary_phase_eval` over sequences of ``(n, x_n)``.

    Returns ``(mu_star, Psi, leading, in_window)`` arrays; out-of-window
    entries have NaN for ``mu_star`` and ``Psi`` and zero ``leading``.
    """
    ns = np.asarray(ns)
    xs = np.asarray(xs, dtype=float)
    xi = xs / t
    lo, hi = spec.window
    band = 1e-6 * (1 + np.abs(xi))
    inside = (xi > lo + band) & (xi < hi - band)
    mu = np.full(xs.shape, np.nan)
    psi = np.full(xs.shape, np.nan)
    lead = np.zeros(xs.shape, dtype=complex)
    if not inside.any():
        return mu, psi, lead, inside
    xin, nin = xs[inside], ns[inside]
    hxi = spec.h_vec(xin / t)
    m = hxi.copy()
    tol = (np.abs(xin) + t) * 1e-12
    for _ in range(max_iter):
        g = xin + spec.dphi_n(nin, m) - np.asarray(spec.theta_p(m)) * t
        if np.all(np.abs(g) <= tol):
            break
        dg = spec.d2phi_n(nin, m) - spec.d2theta(m) * t
        m = m - np.where(np.abs(g) <= tol, 0.0, g / dg)
    else:
        raise NewtonDivergenceError("stationary point iteration diverged")
    p = m * xin + spec.phi_n(nin, m) - np.asarray(spec.theta(m)) * t
    amp = np.sqrt(np.abs(1.0 / spec.d2theta(hxi))) * spec.F(hxi)
    mu[inside] = m
    psi[inside] = p
    lead[inside] = math.sqrt(2 * math.pi / t) * np.exp(-0.25j * math.pi * spec.tau_sign + 1j * p) * amp
    return mu, psi, lead, inside


def direct_quadrature_oracle(
    spec: PhaseSpec,
    x: float,
    t: float,
    n: int = 0,
    tol: float = 1e-10,
    min_panels: int = 8,
    max_panels: int = 2 ** 20,
    order: int = 10,
) -> complex:
    """``G_n(t)`` by composite Gauss-Legendre quadrature.

    Panels are first made narrow enough that the phase changes by less than
    pi/2 across each, then all panels are halved until two successive sums
    agree to ``tol`` relative (with a floor of a few hundred ulps of
    ``int |F|``, below which no double-precision rule can resolve).
    """
    if tol < 1e-10:
        raise ValueError("tol must be >= 1e-10")
    a, b = spec.support

    def integrate(edges):
        mu, w = panel_rule(edges, order)
        ph = mu * x + spec.phi_n(n, mu) - np.asarray(spec.theta(mu)) * t
        f = np.asarray(spec.F(mu))
        return complex(np.sum(w * np.exp(1j * ph) * f)), float(np.sum(w * np.abs(f)))

    # local phase speed limits the panel width
    probe = np.linspace(a, b, 2001)
    speed = np.abs(x + spec.dphi_n(n, probe) - np.asarray(spec.theta_p(probe)) * t)
    panels = max(min_panels, int(math.ceil(float(np.max(speed)) * (b - a) / (0.5 * math.pi))))
    edges = np.linspace(a, b, panels + 1)
    q, mass = integrate(edges)
    floor = 200 * np.finfo(float).eps * mass
    while True:
        if 2 * (len(edges) - 1) > max_panels:
            raise PanelBudgetError(f"panel budget {max_panels} exceeded")
        mid = 0.5 * (edges[1:] + edges[:-1])
        edges = np.sort(np.concatenate([edges, mid]))
        q2, _ = integrate(edges)
        if abs(q2 - q) <= max(tol * abs(q2), floor):
            return q2
        q = q2


@dataclass(frozen=True)
class BatchRow:
    n: int
    t: float
    x_over_t: float
    in_window: bool
    leading: complex
    oracle: Optional[complex]

    @property
    def rel_err(self) -> float:
        if self.oracle is None or self.oracle == 0:
            return float("nan")
        return abs(self.oracle - self.leading) / abs(self.oracle)


def batch_eval(spec: PhaseSpec, ns, xs, ts, with_oracle: bool = True, tol: float = 1e-10) -> list[BatchRow]:
    """Leading terms (and oracle values) for every ``(n, x_n)`` and every t."""
    rows = []
    for t in ts:
        for n, x in zip(ns, xs):
            r = stationary_phase_eval(spec, float(x), float(t), int(n))
            o = direct_quadrature_oracle(spec, float(x), float(t), int(n), tol) if with_oracle else None
            rows.append(BatchRow(int(n), float(t), float(x) / float(t), r.in_window, r.leading, o))
    return rows


def batch_to_csv(rows: list[BatchRow], path) -> None:
    header = ["n", "t", "x_over_t", "in_window", "re", "im", "abs", "oracle_re", "oracle_im", "rel_err"]
    out = []
    for r in rows:
        o = r.oracle if r.oracle is not None else complex("nan+nanj")
        out.append([r.n, r.t, r.x_over_t, r.in_window, r.leading.real, r.leading.imag,
                    abs(r.leading), o.real, o.imag, r.rel_err])
    write_csv(path, header, out)


def bump(center: float, half_width: float, power: int = 3) -> Callable:
    """``(1 - ((mu - c)/w)^2)^power`` on ``|mu - c| < w``, zero outside (C^{power-1})."""

    def F(mu):
        u = (np.asarray(mu, dtype=float) - center) / half_width
        return np.where(np.abs(u) < 1, np.clip(1 - u * u, 0, None) ** power, 0.0)

    return F


def smooth_bump(center: float, half_width: float) -> Callable:
    """``exp(1 - 1/(1 - u^2))`` with ``u = (mu - c)/w``; infinitely smooth, peak value 1."""

    def F(mu):
        u = (np.asarray(mu, dtype=float) - center) / half_width
        inside = np.abs(u) < 1
        den = np.where(inside, 1 - u * u, 1.0)
        return np.where(inside, np.exp(1 - 1 / den), 0.0)

    return F
