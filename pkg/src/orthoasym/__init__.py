"""Numerical verification of the asymptotic structure of orthonormal polynomials.

Modules
-------
jacobi       three-term recurrences, Jost and WKB solutions, Wronskians
spectral     Gauss quadrature, spectral densities and the map U
catalog      closed-form asymptotic data of the built-in families
asymfit      fitting of amplitude and phase asymptotics, universal relations
oscillatory  stationary-phase evaluation of oscillatory integrals
evolution    wave-packet evolution exp(-i Theta(J) t) u
opnorm       semidiscrete Fourier operators and sampling inequalities
cli          experiment runner
"""
__version__ = "0.1.0"

from .jacobi import JacobiCoefficients, eval_polynomials  # noqa: E402,F401
