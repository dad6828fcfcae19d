"""Closed-form asymptotic data of the built-in families.

For each family the orthonormal polynomials behave like

    P_n(lam) ~ 2 kappa(lam) v_n cos(omega(lam) x_n + Phi_n(lam)),

with ``x_n = n^s`` (or ``ln n``) and ``v_n = n^{-r}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .jacobi import JacobiCoefficients


@dataclass(frozen=True)
class ClosedForm:
    """Known asymptotic parameters of one family.

    Callables are vectorized; ``tau`` and ``phi`` may be ``None`` when no
    closed form is available.
    """

    name: str
    r: float
    s: float
    x_text: str
    omega_text: str
    kappa_text: str
    tau_text: str
    omega: Callable
    omega_prime: Callable
    omega_inv: Callable
    kappa: Callable
    tau: Optional[Callable]
    phi: Optional[Callable]  # phi(n, lam)
    phi_prime: Optional[Callable] = None  # d/dlam phi(n, lam)
    x_kind: str = "power"  # "power" | "log"
    spectrum: tuple[float, float] = (-math.inf, math.inf)

    def x(self, n):
        n = np.asarray(n, dtype=float)
        if self.x_kind == "log":
            return np.log(n)
        return n ** self.s

    def v(self, n):
        return np.asarray(n, dtype=float) ** (-self.r)

    def leading(self, n, lam):
        """``2 kappa v_n cos(omega x_n + Phi_n)`` (needs ``phi``)."""
        if self.phi is None:
            raise ValueError(f"{self.name}: no closed-form phase residual")
        return 2 * self.kappa(lam) * self.v(n) * np.cos(self.omega(lam) * self.x(n) + self.phi(n, lam))

    def row(self) -> dict:
        return {
            "family": self.name,
            "r": self.r,
            "s": self.s,
            "x_n": self.x_text,
            "omega": self.omega_text,
            "kappa": self.kappa_text,
            "tau": self.tau_text,
        }


def _hermite() -> ClosedForm:
    c = 2 ** -0.75 * math.pi ** -0.25
    return ClosedForm(
        "hermite", 0.25, 0.5, "n^(1/2)", "sqrt(2)*lambda",
        "2^(-3/4) pi^(-1/4) exp(lambda^2/2)", "pi^(-1/2) exp(-lambda^2)",
        omega=lambda lam: math.sqrt(2) * np.asarray(lam),
        omega_prime=lambda lam: math.sqrt(2) + 0 * np.asarray(lam, dtype=float),
        omega_inv=lambda mu: np.asarray(mu) / math.sqrt(2),
        kappa=lambda lam: c * np.exp(np.asarray(lam) ** 2 / 2),
        tau=lambda lam: np.exp(-np.asarray(lam) ** 2) / math.sqrt(math.pi),
        # sqrt(2n+1) lam = sqrt(2) lam sqrt(n) + sqrt(2) lam (sqrt(n+1/2) - sqrt(n))
        phi=lambda n, lam: (math.sqrt(2) * np.asarray(lam)
                            * (np.sqrt(np.asarray(n) + 0.5) - np.sqrt(np.asarray(n)))
                            - 0.5 * math.pi * np.asarray(n)),
        phi_prime=lambda n, lam: (math.sqrt(2) * (np.sqrt(np.asarray(n) + 0.5) - np.sqrt(np.asarray(n)))
                                  + 0 * np.asarray(lam, dtype=float)),
    )


def _laguerre(alpha: float) -> ClosedForm:
    g = math.sqrt(math.gamma(alpha + 1.0))
    half = 0.5 * (alpha + 1.0)

    def kappa(lam):
        lam = np.asarray(lam, dtype=float)
        return 0.5 / math.sqrt(math.pi) * g * np.exp(lam / 2) * lam ** (-alpha / 2 - 0.25)

    def phi(n, lam):
        n = np.asarray(n, dtype=float)
        return (2 * np.sqrt(lam) * (np.sqrt(n + half) - np.sqrt(n))
                + math.pi * n - (2 * alpha + 1) * math.pi / 4)

    def phi_prime(n, lam):
        n = np.asarray(n, dtype=float)
        return (np.sqrt(n + half) - np.sqrt(n)) / np.sqrt(lam)

    return ClosedForm(
        f"laguerre(alpha={alpha:g})", 0.25, 0.5, "n^(1/2)", "2*sqrt(lambda)",
        "(1/2) pi^(-1/2) Gamma(alpha+1)^(1/2) lambda^(-alpha/2-1/4) exp(lambda/2)",
        "lambda^alpha exp(-lambda) / Gamma(alpha+1)",
        omega=lambda lam: 2 * np.sqrt(lam),
        omega_prime=lambda lam: 1 / np.sqrt(lam),
        omega_inv=lambda mu: (np.asarray(mu) / 2) ** 2,
        kappa=kappa,
        tau=lambda lam: np.asarray(lam) ** alpha * np.exp(-np.asarray(lam)) / math.gamma(alpha + 1),
        phi=phi,
        phi_prime=phi_prime,
        spectrum=(0.0, math.inf),
    )


def _chebyshev_u() -> ClosedForm:
    return ClosedForm(
        "chebyshev_u", 0.0, 1.0, "n", "arcsin(lambda)",
        "(1/2) (1-lambda^2)^(-1/2)", "(2/pi) (1-lambda^2)^(1/2)",
        omega=np.arcsin,
        omega_prime=lambda lam: 1 / np.sqrt(1 - np.asarray(lam) ** 2),
        omega_inv=np.sin,
        kappa=lambda lam: 0.5 / np.sqrt(1 - np.asarray(lam) ** 2),
        tau=lambda lam: 2 / math.pi * np.sqrt(1 - np.asarray(lam) ** 2),
        # sin((n+1) theta) / sin(theta) with theta = pi/2 - arcsin(lam)
        phi=lambda n, lam: np.arcsin(lam) - 0.5 * math.pi * np.asarray(n),
        phi_prime=lambda n, lam: 1 / np.sqrt(1 - np.asarray(lam) ** 2) + 0 * np.asarray(n, dtype=float),
        spectrum=(-1.0, 1.0),
    )


def _power(alpha: float, ell: float) -> ClosedForm:
    if ell < 1:
        w = 1.0 / (2 * alpha * (1 - ell))

        def kappa_from_tau(tau):
            return lambda lam: 0.5 / np.sqrt(math.pi * alpha * tau(lam))

        return ClosedForm(
            f"power(alpha={alpha:g}, ell={ell:g})", ell / 2, 1 - ell, f"n^{1 - ell:g}",
            "lambda / (2 alpha (1-ell))", "(1/2) pi^(-1/2) alpha^(-1/2) tau(lambda)^(-1/2)",
            "no closed form (estimate numerically)",
            omega=lambda lam: w * np.asarray(lam),
            omega_prime=lambda lam: w + 0 * np.asarray(lam, dtype=float),
            omega_inv=lambda mu: np.asarray(mu) / w,
            kappa=kappa_from_tau,  # needs a density; see power_kappa
            tau=None,
            phi=None,
        )
    if ell == 1:
        two_al = 2 * alpha

        def tau(lam):
            return 1.0 / (two_al * np.cosh(math.pi * np.asarray(lam) / two_al))

        return ClosedForm(
            f"power(alpha={alpha:g}, ell=1)", 0.5, 0.0, "ln n", "lambda / (2 alpha)",
            "(1/2) pi^(-1/2) alpha^(-1/2) tau(lambda)^(-1/2)",
            "1 / (2 alpha cosh(pi lambda / (2 alpha)))",
            omega=lambda lam: np.asarray(lam) / two_al,
            omega_prime=lambda lam: 1 / two_al + 0 * np.asarray(lam, dtype=float),
            omega_inv=lambda mu: np.asarray(mu) * two_al,
            kappa=lambda lam: 0.5 / np.sqrt(math.pi * alpha * tau(lam)),
            tau=tau,
            phi=None,
            x_kind="log",
        )
    raise ValueError("power models with ell > 1 have no oscillatory bulk asymptotics")


def closed_form(coeffs: JacobiCoefficients) -> ClosedForm:
    """Closed-form asymptotic data for a built-in coefficient family."""
    if coeffs.kind == "hermite":
        return _hermite()
    if coeffs.kind == "laguerre":
        return _laguerre(coeffs.alpha)
    if coeffs.kind == "chebyshev_u":
        return _chebyshev_u()
    if coeffs.kind == "power":
        return _power(coeffs.alpha, coeffs.ell)
    raise ValueError("custom coefficients have no closed form")


def builtin_table() -> list[dict]:
    """Catalog rows of the built-in families with their expected parameters."""
    rows = [_hermite().row(), _laguerre(0.0).row(), _chebyshev_u().row()]
    r = _power(1.0, 0.5).row()
    r.update(family="power(alpha, ell<1)", r="ell/2", s="1-ell", x_n="n^(1-ell)")
    rows.append(r)
    r = _power(1.0, 1.0).row()
    r.update(family="power(alpha, ell=1)", tau="1 / (2 alpha cosh(pi lambda / (2 alpha)))")
    rows.append(r)
    rows.append({"family": "power(alpha, ell>1)", "r": "-", "s": "-", "x_n": "-",
                 "omega": "-", "kappa": "-",
                 "tau": "no absolutely continuous spectrum; Jost solutions a_n^(-1/2) e^(+-i pi n/2)"})
    return rows
