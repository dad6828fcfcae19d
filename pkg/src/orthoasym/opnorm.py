"""Semidiscrete Fourier operators

    (V f)_n = v_n int e^{i x_n lam} w(lam) f(lam) dlam

and their norms, estimated through the Gram sections ``G = V_N V_N^*``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from ._io import write_csv
from .quad import composite_gauss

C0 = (math.sqrt(5.0) + 1.0) / 2.0  # = 2 / (sqrt(5) - 1)

_TAGS = ("n", "sqrt_n", "ln_n", "n^p", "geometric", "const")


@dataclass(frozen=True)
class SequenceDef:
    """``c * g(n)`` for a tagged closed form ``g``, or explicit values.

    Tags: ``n``, ``sqrt_n``, ``ln_n``, ``n^p`` (parameter ``p``),
    ``geometric`` (``q^n``) and ``const`` (``1``).
    """

    tag: str = "const"
    p: float = 1.0
    q: float = 0.5
    c: float = 1.0
    values: Optional[tuple] = None

    def __post_init__(self):
        if self.values is None and self.tag not in _TAGS:
            raise ValueError(f"unknown sequence tag {self.tag!r}; expected one of {_TAGS}")

    @property
    def singular_at_zero(self) -> bool:
        return self.values is None and (self.tag == "ln_n" or (self.tag == "n^p" and self.p < 0))

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n)
        if self.values is not None:
            vals = np.asarray(self.values, dtype=float)
            if np.max(n) >= len(vals):
                raise IndexError(f"explicit sequence has only {len(vals)} terms")
            return self.c * vals[n]
        nf = n.astype(float)
        g = {
            "n": lambda: nf,
            "sqrt_n": lambda: np.sqrt(nf),
            "ln_n": lambda: np.log(nf),
            "n^p": lambda: nf ** self.p,
            "geometric": lambda: self.q ** nf,
            "const": lambda: np.ones_like(nf),
        }[self.tag]()
        return self.c * g


def _as_sequence(obj) -> SequenceDef:
    if isinstance(obj, SequenceDef):
        return obj
    if isinstance(obj, str):
        return SequenceDef(obj)
    if isinstance(obj, dict):
        d = dict(obj)
        tag = d.pop("tag")
        unknown = set(d) - {"p", "q", "c"}
        if unknown:
            raise KeyError(f"unknown sequence keys: {sorted(unknown)}")
        return SequenceDef(tag, **d)
    return SequenceDef(values=tuple(float(v) for v in obj))


@dataclass(frozen=True)
class SemidiscreteOperatorSpec:
    """Data of ``V``.

    ``w`` is either the indicator of ``w_interval`` (closed-form Gram
    entries) or a callable supported in ``w_support``.  ``omega`` (with
    ``omega_prime`` and a ``omega_domain``) marks the form
    ``v_n int e^{i x_n omega(lam)} w(lam) f(lam) dlam``, reducible by
    :func:`reduce_change_of_variables`.
    """

    x: SequenceDef
    v: SequenceDef
    w_interval: Optional[tuple[float, float]] = None
    w: Optional[Callable] = None
    w_support: Optional[tuple[float, float]] = None
    w_decay: Optional[float] = None  # beta in |w| <= C (1+|lam|)^-beta
    omega: Optional[Callable] = None
    omega_prime: Optional[Callable] = None
    omega_domain: Optional[tuple[float, float]] = None
    start: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "x", _as_sequence(self.x))
        object.__setattr__(self, "v", _as_sequence(self.v))
        if (self.w_interval is None) == (self.w is None):
            raise ValueError("give exactly one of w_interval and w")
        if self.start is None:
            s0 = 1 if (self.x.singular_at_zero or self.v.singular_at_zero) else 0
            object.__setattr__(self, "start", s0)
        x = self.x(np.arange(self.start, self.start + 64))
        if np.any(np.diff(x) <= 0):
            raise ValueError("x_n must be strictly increasing")
        if self.omega is not None:
            if self.omega_prime is None or self.omega_domain is None:
                raise ValueError("omega needs omega_prime and omega_domain")
            if np.any(~(np.asarray(self.omega_prime(_sample(self.omega_domain))) > 0)):
                raise ValueError("omega' must be positive on its domain")

    def indices(self, N: int) -> np.ndarray:
        return np.arange(self.start, self.start + N)

    def w_norm_sq(self) -> float:
        """``int |w|^2``; ``inf`` when the declared envelope is not square integrable."""
        if self.w_interval is not None:
            a, b = self.w_interval
            return float(b - a)
        if self.w_support is None or not all(map(math.isfinite, self.w_support)):
            if self.w_decay is None or self.w_decay <= 0.5:
                return math.inf
            raise ValueError("unbounded w support needs a finite w_support cutoff for quadrature")
        x, wq = composite_gauss(*self.w_support, 256, 10)
        return float(np.sum(wq * np.abs(self.w(x)) ** 2))


def _sample(domain, k: int = 1000) -> np.ndarray:
    a, b = domain
    if math.isfinite(a) and math.isfinite(b):
        return np.linspace(a, b, k + 2)[1:-1]
    # map (-1, 1) onto the domain
    t = np.linspace(-1, 1, k + 2)[1:-1]
    if not math.isfinite(a) and not math.isfinite(b):
        return np.tan(0.5 * math.pi * t)
    if math.isfinite(a):
        return a + np.tan(0.25 * math.pi * (t + 1))
    return b - np.tan(0.25 * math.pi * (t + 1))


def load_operator_spec(src: Union[str, dict]) -> SemidiscreteOperatorSpec:
    """Spec from a JSON file or dict.

    Keys: ``x``, ``v`` (tags, ``{"tag": ..., "p": ...}`` or arrays),
    ``w`` (``{"indicator": [a, b]}``, ``{"gaussian": sigma}`` or
    ``{"power_decay": beta, "cutoff": L}``) and optional ``start``.
    """
    if isinstance(src, str):
        with open(src) as fh:
            src = json.load(fh)
    d = dict(src)
    unknown = set(d) - {"x", "v", "w", "start"}
    if unknown:
        raise KeyError(f"unknown operator keys: {sorted(unknown)}")
    w = d.get("w", {"indicator": [-1, 1]})
    kw = {}
    if "indicator" in w:
        kw["w_interval"] = tuple(map(float, w["indicator"]))
    elif "gaussian" in w:
        s = float(w["gaussian"])
        kw.update(w=lambda lam: np.exp(-0.5 * (np.asarray(lam) / s) ** 2), w_support=(-12 * s, 12 * s))
    elif "power_decay" in w:
        beta = float(w["power_decay"])
        L = float(w.get("cutoff", 1e3))
        kw.update(w=lambda lam: (1 + np.abs(np.asarray(lam))) ** -beta, w_support=(-L, L), w_decay=beta)
    else:
        raise KeyError(f"unknown w kind: {sorted(w)}")
    return SemidiscreteOperatorSpec(d["x"], d["v"], start=d.get("start"), **kw)


def _kernel_indicator(D: np.ndarray, a: float, b: float) -> np.ndarray:
    """``int_a^b e^{i D lam} dlam`` (real when ``a = -b``)."""
    if a == -b:
        out = np.empty_like(D)
        small = np.abs(D) < 1e-8
        out[~small] = 2 * np.sin(b * D[~small]) / D[~small]
        out[small] = 2 * b * (1 - (b * D[small]) ** 2 / 6)
        return out
    Dc = D.astype(complex)
    out = np.empty(D.shape, dtype=complex)
    small = np.abs(D) < 1e-8
    out[~small] = (np.exp(1j * Dc[~small] * b) - np.exp(1j * Dc[~small] * a)) / (1j * Dc[~small])
    out[small] = (b - a) + 0.5j * (b * b - a * a) * D[small]
    return out


def _quadrature_factor(spec: SemidiscreteOperatorSpec, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``A`` with ``G = A A^*`` for a general weight (panels resolve the phase)."""
    if not math.isfinite(spec.w_norm_sq()):
        raise ValueError("|w|^2 is not integrable")
    a, b = spec.w_support
    span = float(x[-1] - x[0]) if len(x) > 1 else 0.0
    panels = max(64, int(math.ceil(span * (b - a) / (0.5 * math.pi))))
    lam, wq = composite_gauss(a, b, panels, 10)
    amp = np.sqrt(wq) * np.abs(spec.w(lam))
    return (v[:, None] * np.exp(1j * np.outer(x, lam))) * amp[None, :]


def gram_section(spec: SemidiscreteOperatorSpec, N: int) -> np.ndarray:
    """``G_nm = v_n v_m int e^{i (x_n - x_m) lam} |w(lam)|^2 dlam`` for the first N indices."""
    n = spec.indices(N)
    x = spec.x(n)
    v = spec.v(n)
    if spec.w_interval is not None:
        D = x[:, None] - x[None, :]
        return v[:, None] * v[None, :] * _kernel_indicator(D, *spec.w_interval)
    A = _quadrature_factor(spec, x, v)
    return A @ A.conj().T


def top_eigen(G: np.ndarray, y0: Optional[np.ndarray] = None, tol: float = 1e-10,
              max_iter: int = 20000) -> tuple[float, np.ndarray, int]:
    """Largest eigenvalue of a Hermitian PSD matrix by power iteration.

    Stops when the Rayleigh quotient changes by less than ``tol`` relative.
    Returns ``(eigenvalue, vector, iterations)``.
    """
    N = G.shape[0]
    if not np.any(G):
        return 0.0, np.ones(N) / math.sqrt(N), 0
    y = np.ones(N, dtype=G.dtype) if y0 is None else np.asarray(y0, dtype=G.dtype).copy()
    if not np.any(y):
        y = np.ones(N, dtype=G.dtype)
    y /= np.linalg.norm(y)
    rho = 0.0
    for k in range(1, max_iter + 1):
        z = G @ y
        new = float(np.real(np.vdot(y, z)))
        nz = np.linalg.norm(z)
        if nz == 0:
            return 0.0, y, k
        y = z / nz
        if k > 1 and abs(new - rho) <= tol * abs(new):
            return new, y, k
        rho = new
    raise RuntimeError(f"power iteration did not converge in {max_iter} steps")


def window_sums(x: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``M_R = sum_{x_n in [R, R+1)} v_n^2`` for ``R = x_k`` with ``x_k + 1 <= x_last``."""
    c = np.concatenate([[0.0], np.cumsum(v ** 2)])
    full = x + 1 <= x[-1]
    R = x[full]
    lo = np.searchsorted(x, R, side="left")
    hi = np.searchsorted(x, R + 1, side="left")
    return R, c[hi] - c[lo]


@dataclass
class NormEstimate:
    sizes: list
    top_eigen: list  # of the Gram sections
    top_singular: list  # sqrt of top_eigen, i.e. |V_N|
    verdict: str
    window_sups: list
    sigma_tails: list
    growth: list = field(default_factory=list)
    analytic: str = "undecided"
    consistent: Optional[bool] = None
    sigma: Optional[np.ndarray] = field(default=None, repr=False)
    iterations: list = field(default_factory=list)

    @property
    def window_sup(self) -> float:
        return self.window_sups[-1]

    def to_dict(self) -> dict:
        return {
            "sizes": self.sizes, "top_eigen": self.top_eigen, "top_singular": self.top_singular,
            "verdict": self.verdict, "growth": self.growth, "window_sup": self.window_sups,
            "sigma_tail": self.sigma_tails, "analytic": self.analytic, "consistent": self.consistent,
        }

    def to_csv(self, path) -> None:
        rows = [[N, s, ws, st] for N, s, ws, st in zip(self.sizes, self.top_singular, self.window_sups, self.sigma_tails)]
        write_csv(path, ["N", "top_singular", "window_sup", "sigma_tail"], rows)


def sigma_sequence(spec: SemidiscreteOperatorSpec, N: int) -> np.ndarray:
    """``sigma_n = v_n^2 / (x_{n+1} - x_n)`` for the first N indices."""
    n = spec.indices(N)
    return spec.v(n) ** 2 / (spec.x(n + 1) - spec.x(n))


def _analytic_regime(sig: np.ndarray) -> str:
    """Trend of ``sigma_n`` over the computed range."""
    m = len(sig)
    q1 = float(np.mean(sig[m // 4: m // 2]))
    q2 = float(np.mean(sig[3 * m // 4:]))
    if q2 > 1.5 * q1 and q2 > q1 + 1:
        return "sigma_unbounded"
    if q2 <= 1.05 * q1 + 1e-12:
        return "sigma_bounded"
    return "undecided"


def hilbert_schmidt_check(spec: SemidiscreteOperatorSpec, N: int = 4096) -> dict:
    """Hilbert-Schmidt test: ``sum v_n^2 < inf`` and ``int |w|^2 < inf``.

    The series is judged convergent when its tail over ``[N/2, N)`` falls below
    ``1e-8`` of the partial sum.
    """
    wn = spec.w_norm_sq()
    v2 = spec.v(spec.indices(N)) ** 2
    total = float(np.sum(v2))
    tail = float(np.sum(v2[N // 2:]))
    summable = total == 0 or tail <= 1e-8 * total
    is_hs = bool(summable and math.isfinite(wn))
    return {"is_hs": is_hs, "hs_norm_sq": total * wn if is_hs else math.inf,
            "v_sum_sq": total if summable else math.inf, "w_norm_sq": wn}


def boundedness_verdict(spec: SemidiscreteOperatorSpec, ladder: Sequence[int],
                        plateau: float = 0.05, growing: float = 0.30) -> NormEstimate:
    """Top singular values of nested sections along a doubling ladder.

    ``HilbertSchmidt`` when :func:`hilbert_schmidt_check` passes;
    ``BoundedPlateau`` when the last doubling grows by at most ``plateau`` and
    the window sums stop growing; ``Growing`` when the last two doublings each
    grow by at least ``growing``; otherwise ``Inconclusive``.
    """
    ladder = sorted(int(N) for N in ladder)
    if len(ladder) < 4:
        raise ValueError("need a ladder of at least 4 sizes")
    Nmax = ladder[-1]
    Gfull = gram_section(spec, Nmax)
    n = spec.indices(Nmax)
    x, v = spec.x(n), spec.v(n)
    sig = sigma_sequence(spec, Nmax)
    eigs, sings, wsup, stail, its = [], [], [], [], []
    y = None
    for N in ladder:
        G = Gfull[:N, :N]
        y0 = None if y is None else np.concatenate([y, np.zeros(N - len(y), dtype=y.dtype)])
        lam, y, k = top_eigen(G, y0)
        eigs.append(lam)
        sings.append(math.sqrt(max(lam, 0.0)))
        its.append(k)
        _, M = window_sums(x[:N], v[:N])
        wsup.append(float(np.max(M)) if len(M) else float("nan"))
        stail.append(float(np.mean(sig[int(0.9 * N):N])))
    growth = [sings[i + 1] / sings[i] - 1 if sings[i] > 0 else 0.0 for i in range(len(sings) - 1)]
    hs = hilbert_schmidt_check(spec, Nmax)
    ws_stable = len(wsup) < 2 or not (wsup[-1] > (1 + plateau) * wsup[-2])
    if hs["is_hs"]:
        verdict = "HilbertSchmidt"
    elif growth[-1] <= plateau and ws_stable:
        verdict = "BoundedPlateau"
    elif all(g >= growing for g in growth[-2:]):
        verdict = "Growing"
    else:
        verdict = "Inconclusive"
    analytic = _analytic_regime(sig)
    consistent = None
    if analytic == "sigma_bounded":
        consistent = verdict in ("BoundedPlateau", "HilbertSchmidt")
    elif analytic == "sigma_unbounded" and spec.w_interval is not None:
        consistent = verdict == "Growing"
    return NormEstimate(ladder, eigs, sings, verdict, wsup, stail, growth, analytic, consistent, sig, its)


@dataclass
class CompactnessReport:
    R: np.ndarray
    M: np.ndarray
    slope: float
    tail_singular: list
    verdict: str

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "slope": self.slope, "M_last": float(self.M[-1]),
                "M_max": float(np.max(self.M)), "tail_singular": self.tail_singular}


def compactness_check(spec: SemidiscreteOperatorSpec, N: int = 4096, n_tail_sections: int = 3) -> CompactnessReport:
    """Decay of the window sums ``M_R`` and of the tail sections ``x_n > R``.

    ``Compact`` when ``log M_R`` falls with slope at most -1/2 against
    ``log R`` over the upper half of the range (or the operator is
    Hilbert-Schmidt), ``NotCompact`` when the slope is above -0.1.
    """
    n = spec.indices(N)
    x, v = spec.x(n), spec.v(n)
    R, M = window_sums(x, v)
    hs = hilbert_schmidt_check(spec, N)
    sel = (R >= 0.5 * R[-1]) & (R > 0) & (M > 0)
    slope = float(np.polyfit(np.log(R[sel]), np.log(M[sel]), 1)[0]) if sel.sum() >= 3 else float("nan")
    G = gram_section(spec, N)
    tails = []
    for k in range(n_tail_sections):
        i0 = int(N * (1 - 0.5 ** (k + 1)))
        lam, _, _ = top_eigen(G[i0:, i0:])
        tails.append(math.sqrt(max(lam, 0.0)))
    if hs["is_hs"] or slope <= -0.5:
        verdict = "Compact"
    elif slope > -0.1:
        verdict = "NotCompact"
    else:
        verdict = "Inconclusive"
    return CompactnessReport(R, M, slope, tails, verdict)


def _inverse(spec: SemidiscreteOperatorSpec) -> Callable:
    a, b = spec.omega_domain
    lo = a if math.isfinite(a) else -1.0
    hi = b if math.isfinite(b) else 1.0

    def inv(mu):
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        out = np.empty_like(mu)
        for i, m in enumerate(mu):
            l, h = lo, hi
            while not math.isfinite(a) and spec.omega(l) > m:
                l = 2 * l - 1 if l < 0 else -1.0
            while not math.isfinite(b) and spec.omega(h) < m:
                h = 2 * h + 1
            if math.isfinite(a) and m <= spec.omega(a + 0.0):
                out[i] = a
                continue
            out[i] = brentq(lambda t: spec.omega(t) - m, l, h, xtol=1e-14, rtol=1e-14)
        return out

    return inv


def reduce_change_of_variables(spec: SemidiscreteOperatorSpec) -> SemidiscreteOperatorSpec:
    """Standard form with ``w~(mu) = omega'(lam)^{-1/2} w(lam)``, ``mu = omega(lam)``.

    The unitary substitution ``lam = omega^{-1}(mu)`` leaves x and v unchanged.
    """
    if spec.omega is None:
        return spec
    grid = _sample(spec.omega_domain)
    om = np.asarray(spec.omega(grid), dtype=float)
    if np.any(np.diff(om) <= 0):
        raise ValueError("omega is not strictly increasing on its domain")
    inv = _inverse(spec)
    if spec.w_interval is not None:
        w0 = (lambda lam, a=spec.w_interval[0], b=spec.w_interval[1]:
              ((np.asarray(lam) > a) & (np.asarray(lam) < b)).astype(float))
        sup = spec.w_interval
    else:
        w0 = spec.w
        sup = spec.w_support if spec.w_support is not None else spec.omega_domain
    sup = (max(sup[0], spec.omega_domain[0]), min(sup[1], spec.omega_domain[1]))

    def w_tilde(mu):
        lam = inv(mu)
        return np.asarray(w0(lam), dtype=float) / np.sqrt(np.asarray(spec.omega_prime(lam), dtype=float))

    new_sup = (float(spec.omega(sup[0])) if math.isfinite(sup[0]) else -math.inf,
               float(spec.omega(sup[1])) if math.isfinite(sup[1]) else math.inf)
    return replace(spec, w_interval=None, w=w_tilde, w_support=new_sup, omega=None,
                   omega_prime=None, omega_domain=None)


@dataclass
class SobolevReport:
    ratios: list
    worst_ratio: float
    bound: float
    delta: float
    holds: bool
    literal_ratios: Optional[list] = None
    literal_bound: Optional[float] = None

    def to_dict(self) -> dict:
        d = {"worst_ratio": self.worst_ratio, "bound": self.bound, "delta": self.delta, "holds": self.holds,
             "trials": len(self.ratios)}
        if self.literal_ratios is not None:
            d.update(literal_worst_ratio=max(self.literal_ratios), literal_bound=self.literal_bound,
                     literal_holds=max(self.literal_ratios) < self.literal_bound)
        return d


def sobolev_ratio(x: np.ndarray, u: Callable, du: Callable, weights: Optional[np.ndarray] = None,
                  panels_per_unit: int = 8) -> float:
    """``sum_{n < last} c_n |u(x_n)|^2 / int_{x_0}^{x_last} (|u'|^2 + |u|^2)``.

    ``c_n = x_{n+1} - x_n`` unless ``weights`` are given.
    """
    x = np.asarray(x, dtype=float)
    c = np.diff(x) if weights is None else np.asarray(weights, dtype=float)[:-1]
    lhs = float(np.sum(c * np.abs(u(x[:-1])) ** 2))
    panels = max(64, int(math.ceil((x[-1] - x[0]) * panels_per_unit)))
    # panel edges at the sample points keep kinks of u at x_0 harmless
    t, w = composite_gauss(x[0], x[-1], panels, 10)
    rhs = float(np.sum(w * (np.abs(du(t)) ** 2 + np.abs(u(t)) ** 2)))
    if rhs == 0:
        return 0.0
    return lhs / rhs


def sobolev_verify(x, trials: Sequence[tuple[Callable, Callable]], delta: Optional[float] = None,
                   literal_weights: Optional[np.ndarray] = None) -> SobolevReport:
    """Check ``sum (x_{n+1}-x_n)|u(x_n)|^2 <= c0 max{1, delta^2} int (|u'|^2 + |u|^2)``.

    ``c0 = (sqrt(5)+1)/2``.  Each trial is ``(u, u')``.  With
    ``literal_weights`` (e.g. ``n^{s-1}``) the weighted sum is also checked
    against ``c0 max{1, delta^2} max_n(weight_n / (x_{n+1}-x_n))``.
    """
    x = np.asarray(x, dtype=float)
    gaps = np.diff(x)
    if np.any(gaps <= 0):
        raise ValueError("x must be strictly increasing")
    if delta is None:
        delta = float(np.max(gaps)) * (1 + 1e-12)
    elif np.any(gaps >= delta):
        raise ValueError(f"spacing bound violated: max gap {np.max(gaps):.6g} >= delta {delta:.6g}")
    bound = C0 * max(1.0, delta ** 2)
    ratios = [sobolev_ratio(x, u, du) for u, du in trials]
    lit = lit_bound = None
    if literal_weights is not None:
        lw = np.asarray(literal_weights, dtype=float)
        lit = [sobolev_ratio(x, u, du, lw) for u, du in trials]
        lit_bound = bound * float(np.max(lw[:-1] / gaps))
    worst = max(ratios) if ratios else 0.0
    return SobolevReport(ratios, worst, bound, delta, worst < bound or worst == 0.0, lit, lit_bound)


def gaussian_trials(rng: np.random.Generator, k: int, center_range, width_range):
    """``k`` random Gaussians ``exp(-((x-c)/w)^2 / 2)`` with their derivatives."""
    out = []
    for _ in range(k):
        c = float(rng.uniform(*center_range))
        w = float(rng.uniform(*width_range))
        out.append((lambda x, c=c, w=w: np.exp(-0.5 * ((x - c) / w) ** 2),
                    lambda x, c=c, w=w: -(x - c) / w ** 2 * np.exp(-0.5 * ((x - c) / w) ** 2)))
    return out
