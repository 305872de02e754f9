"""Haar volume of ``{phi in T^m : |sum_k a_k exp(i phi_k)| <= r}``.

Three routes:

* closed forms for one and two links (:func:`w1_step`, :func:`w2_closed_form`),
* the Bessel-integral representation
  ``W_m(r) = r * int_0^inf J1(r rho) prod_k J0(a_k rho) drho`` (:func:`w_bww`),
* seeded Monte Carlo sampling of the torus (:func:`w_monte_carlo`).

The boundary ``|z| = r`` counts as inside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from ._quadrature import gauss_legendre, panel_nodes
from .bessel import j0, j1
from .exceptions import QuadratureError, ValidationError

METHODS = ("step", "closed_form_w2", "bww_quadrature", "monte_carlo")

# Smallest Bessel argument at which the tail is replaced by its Hankel expansion.
_ASYMPTOTIC_START = 40.0
# Number of 1/rho correction orders kept in the tail expansion.
_TAIL_ORDERS = 8
_MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class QuadratureConfig:
    tol: float = 1e-8
    max_panels: int = 200_000
    panel_order: int = 15

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.max_panels < 100:
            raise ValidationError(f"max_panels must be >= 100, got {self.max_panels}")
        if self.panel_order < 3:
            raise ValidationError(f"panel_order must be >= 3, got {self.panel_order}")


@dataclass(frozen=True)
class TorusVolumeResult:
    value: float
    method: str
    error_estimate: float
    detail: dict = field(default_factory=dict)


def check_amplitudes(amps: Sequence[float]) -> np.ndarray:
    a = np.atleast_1d(np.asarray(amps, dtype=float)).reshape(-1)
    if a.size == 0:
        raise ValidationError("need at least one amplitude")
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ValidationError(f"amplitudes must be finite and positive, got {a.tolist()}")
    return a


def _check_r(r: float) -> float:
    r = float(r)
    if not (math.isfinite(r) and r >= 0):
        raise ValidationError(f"r must be finite and non-negative, got {r}")
    return r


def w1_step(r: float, a: float) -> TorusVolumeResult:
    r = _check_r(r)
    (a,) = check_amplitudes([a])
    return TorusVolumeResult(1.0 if a <= r else 0.0, "step", 0.0)


def w2_closed_form(r: float, a1: float, a2: float) -> TorusVolumeResult:
    r = _check_r(r)
    # sorted so the result is exactly symmetric in the two links
    a1, a2 = np.sort(check_amplitudes([a1, a2]))
    q = (r * r - a1 * a1 - a2 * a2) / (2.0 * a1 * a2)
    if q >= 1.0:
        value = 1.0
    elif q <= -1.0:
        value = 0.0
    else:
        value = 1.0 - math.acos(q) / math.pi
    return TorusVolumeResult(float(value), "closed_form_w2", 4.0 * np.finfo(float).eps, {"q": float(q)})


def w_bww(r: float, amps: Sequence[float], cfg: QuadratureConfig | None = None) -> TorusVolumeResult:
    """Torus volume from the Bessel-integral formula.

    ``[0, P]`` is covered by equal panels narrow enough to resolve the
    fastest oscillation ``r + sum(a)``. Beyond ``P`` every Bessel factor is in
    its large-argument regime, the integrand is expanded into a finite sum of
    terms ``rho^-alpha exp(i w rho)`` and each is integrated exactly with the
    upper incomplete gamma function. ``P`` is doubled until the size of the
    last kept expansion order is below ``cfg.tol``.
    """
    cfg = cfg or QuadratureConfig()
    r = _check_r(r)
    a = check_amplitudes(amps)
    if a.size < 2:
        raise ValidationError("w_bww needs at least two amplitudes; use w1_step for one")
    if r == 0:
        raise ValidationError("w_bww needs r > 0")
    # outside the annulus reachable by z the answer is exact
    if r >= a.sum():
        return TorusVolumeResult(1.0, "bww_quadrature", 0.0, {"saturated": True})
    if r < 2.0 * a.max() - a.sum():
        return TorusVolumeResult(0.0, "bww_quadrature", 0.0, {"saturated": True})

    width = math.pi / (2.0 * (r + a.sum()))
    c_min = min(r, a.min())
    n_panels = max(int(math.ceil(_ASYMPTOTIC_START / c_min / width)), 16)
    while True:
        if n_panels > cfg.max_panels:
            n_panels = cfg.max_panels
            value, resid, tail, tail_err = _bww_pieces(r, a, width, n_panels, cfg.panel_order)
            raise QuadratureError(
                f"tail bound {tail_err:.3g} not reached within max_panels={cfg.max_panels}",
                best_value=value,
                residual=resid + tail_err,
            )
        value, resid, tail, tail_err = _bww_pieces(r, a, width, n_panels, cfg.panel_order)
        if tail_err <= cfg.tol:
            break
        n_panels *= 2

    clamped = min(max(value, 0.0), 1.0)
    detail = {
        "panels": n_panels,
        "cutoff": n_panels * width,
        "panel_residual": resid,
        "tail": tail,
        "tail_bound": tail_err,
        "clamp_excursion": value - clamped,
    }
    return TorusVolumeResult(clamped, "bww_quadrature", resid + tail_err, detail)


def _bww_pieces(r, a, width, n_panels, order):
    edges = width * np.arange(n_panels + 1, dtype=float)
    head = _panel_integral(r, a, edges, order)
    coarse = _panel_integral(r, a, edges, order - 2)
    cutoff = edges[-1]
    tail, tail_err = _asymptotic_tail(r, a, cutoff)
    return head + tail, abs(head - coarse), tail, tail_err


def _integrand(r, a, rho):
    out = r * j1(r * rho)
    for ak in a:
        out = out * j0(ak * rho)
    return out


def _panel_integral(r, a, edges, order):
    nodes, weights = panel_nodes(edges, order)
    return float(np.sum(_integrand(r, a, nodes) * weights))


def _hankel_coefficients(nu: int, c: float, orders: int) -> np.ndarray:
    """Coefficients ``beta_k`` with ``J_nu(c rho) ~ Re[exp(i c rho) rho^-1/2 sum_k beta_k rho^-k]``."""
    mu = 4.0 * nu * nu
    ak = np.empty(orders + 1)
    ak[0] = 1.0
    for k in range(1, orders + 1):
        ak[k] = ak[k - 1] * (mu - (2 * k - 1) ** 2) / (k * 8.0)
    k = np.arange(orders + 1)
    lead = math.sqrt(2.0 / (math.pi * c)) * np.exp(-1j * (nu * math.pi / 2 + math.pi / 4))
    return lead * (1j ** k) * ak / c ** k


def _rho_power_integral(alpha: float, omega: float, cutoff: float) -> complex:
    """``int_cutoff^inf rho^-alpha exp(i omega rho) drho`` for ``alpha > 1``."""
    if omega == 0.0:
        return cutoff ** (1.0 - alpha) / (alpha - 1.0)
    z = mpmath.mpc(0.0, -omega)
    return complex(mpmath.power(z, alpha - 1.0) * mpmath.gammainc(1.0 - alpha, z * cutoff))


def _asymptotic_tail(r, a, cutoff):
    """Integral of the expanded integrand over ``[cutoff, inf)`` and an error size.

    Each factor is ``(U exp(icr) + conj(U) exp(-icr)) / 2``; expanding the
    product gives one term per sign pattern. Patterns related by a global sign
    flip are complex conjugates, so the ``J1`` factor keeps its ``+`` branch
    and the real part is doubled.
    """
    K = _TAIL_ORDERS
    n_factors = a.size + 1
    # (frequency, coefficient series) per sign pattern, J1 factor first
    omegas = np.array([r])
    series = _hankel_coefficients(1, r, K)[None, :]
    for ak in a:
        beta = _hankel_coefficients(0, ak, K)
        plus = np.array([np.convolve(s, beta)[: K + 1] for s in series])
        minus = np.array([np.convolve(s, beta.conj())[: K + 1] for s in series])
        series = np.concatenate([plus, minus])
        omegas = np.concatenate([omegas + ak, omegas - ak])

    base_alpha = n_factors / 2.0
    scale = r * 2.0 ** (1 - n_factors)
    # merge patterns with equal frequency; near-zero frequencies are exactly resonant
    key = np.round(omegas, 12)
    key[np.abs(key) < 1e-12] = 0.0
    uniq, inverse = np.unique(key, return_inverse=True)
    merged = np.zeros((uniq.size, K + 1), dtype=complex)
    np.add.at(merged, inverse, series)

    total = 0.0 + 0.0j
    last = 0.0 + 0.0j
    for omega, coefs in zip(uniq, merged):
        for j in range(K + 1):
            if coefs[j] == 0:
                continue
            term = coefs[j] * _rho_power_integral(base_alpha + j, float(omega), cutoff)
            total += term
            if j == K:
                last += term
    bound = sum(
        abs(coefs[K]) * cutoff ** (1.0 - base_alpha - K) / (base_alpha + K - 1.0) for coefs in merged
    )
    tail = scale * total.real
    err = scale * max(abs(last.real), bound)
    return float(tail), float(err)


def w_monte_carlo(r: float, amps: Sequence[float], samples: int = 1_000_000, seed: int = 0) -> TorusVolumeResult:
    """Fraction of uniformly sampled torus points with ``|z| <= r``.

    Samples are drawn in fixed-size chunks, each from its own Philox stream
    spawned from ``seed``, so the result depends only on ``(seed, samples)``.
    """
    r = _check_r(r)
    a = check_amplitudes(amps)
    samples = int(samples)
    if samples < 1000:
        raise ValidationError(f"need at least 1000 samples, got {samples}")
    if not 0 <= int(seed) < 2**64:
        raise ValidationError("seed must be an unsigned 64-bit integer")
    n_chunks = -(-samples // _MC_CHUNK)
    streams = np.random.SeedSequence(int(seed)).spawn(n_chunks)
    hits = 0
    remaining = samples
    for ss in streams:
        size = min(_MC_CHUNK, remaining)
        rng = np.random.Generator(np.random.Philox(ss))
        phi = rng.uniform(0.0, 2.0 * math.pi, size=(size, a.size))
        z = np.exp(1j * phi) @ a
        hits += int(np.count_nonzero(np.abs(z) <= r))
        remaining -= size
    value = hits / samples
    stderr = math.sqrt(value * (1.0 - value) / samples)
    return TorusVolumeResult(value, "monte_carlo", stderr, {"samples": samples, "seed": int(seed), "hits": hits})


def torus_volume(
    r: float,
    amps: Sequence[float],
    method: str = "auto",
    cfg: QuadratureConfig | None = None,
    samples: int = 1_000_000,
    seed: int | None = None,
) -> TorusVolumeResult:
    """Dispatch to one of the routes.

    ``auto`` uses the step function for one link, the closed form for two and
    the Bessel integral otherwise. ``mc`` requires an explicit ``seed``.
    """
    a = check_amplitudes(amps)
    r = _check_r(r)
    if method == "auto":
        if a.size == 1:
            return w1_step(r, a[0])
        if a.size == 2:
            return w2_closed_form(r, a[0], a[1])
        method = "bww"
    if method == "closed":
        if a.size == 1:
            return w1_step(r, a[0])
        if a.size == 2:
            return w2_closed_form(r, a[0], a[1])
        raise ValidationError(f"no closed form for {a.size} amplitudes")
    if method == "bww":
        if r == 0:
            # |z| = 0 is a null set once two or more links are present
            return TorusVolumeResult(0.0, "bww_quadrature", 0.0, {"note": "r = 0"})
        return w_bww(r, a, cfg)
    if method == "mc":
        if seed is None:
            raise ValidationError("Monte Carlo requires an explicit seed")
        return w_monte_carlo(r, a, samples, seed)
    raise ValidationError(f"unknown method {method!r}; expected auto, closed, bww or mc")
