"""Bessel functions J0 and J1.

The fast path delegates to ``scipy.special``; :func:`jp_integral_oracle`
evaluates the Poisson integral

    J_p(x) = (x/2)^p / (Gamma(p + 1/2) sqrt(pi)) * int_0^pi sin^(2p)(phi) exp(-i x cos phi) dphi

by adaptive quadrature and is meant for cross-checking only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from ._quadrature import adaptive_integrate
from .exceptions import NumericalError, ValidationError

# Absolute accuracy of the cephes kernels on |x| <= 1e4, with margin.
_FAST_PATH_ABS_ERROR = 1e-14


@dataclass(frozen=True)
class BesselEval:
    value: float
    abs_error_estimate: float


def j0(x):
    """Bessel function of the first kind, order 0. Accepts scalars or arrays."""
    return scipy.special.j0(x)


def j1(x):
    """Bessel function of the first kind, order 1. Accepts scalars or arrays."""
    return scipy.special.j1(x)


def bessel_eval(order: int, x: float) -> BesselEval:
    if order not in (0, 1):
        raise ValidationError(f"fast path supports orders 0 and 1, got {order}")
    if not math.isfinite(x):
        raise ValidationError("x must be finite")
    value = float(j0(x) if order == 0 else j1(x))
    return BesselEval(value, _FAST_PATH_ABS_ERROR * max(1.0, math.sqrt(abs(x))))


def jp_integral_oracle(p: float, x: float, tol: float = 1e-10) -> float:
    """Slow, independent evaluation of J_p(x) from its integral definition."""
    if not 0.0 <= p <= 4.0:
        raise ValidationError(f"oracle order must lie in [0, 4], got {p}")
    if not abs(x) <= 1e3:
        raise ValidationError(f"oracle argument must satisfy |x| <= 1e3, got {x}")
    if x < 0 and p != int(p):
        raise ValidationError("negative x requires an integer order")
    if x == 0:
        return 1.0 if p == 0 else 0.0

    def integrand(phi):
        return np.sin(phi) ** (2 * p) * np.exp(-1j * x * np.cos(phi))

    prefactor = (x / 2.0) ** p / (math.gamma(p + 0.5) * math.sqrt(math.pi))
    # tighten the integral tolerance so the scaled result meets ``tol``
    integral, _ = adaptive_integrate(integrand, 0.0, math.pi, tol=tol / max(1.0, abs(prefactor)))
    value = prefactor * integral
    if abs(value.imag) > 1e-10:
        raise NumericalError(f"imaginary part {value.imag:.3g} of J_{p}({x}) exceeds 1e-10")
    return float(value.real)
