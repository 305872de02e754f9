"""Mean motion of a finite sum of rotating vectors.

For ``z(t) = sum_k a_k exp(i lambda_k t)`` with non-resonant frequencies the
asymptotic angular velocity is ``Omega = sum_k lambda_k V_k`` where ``V_k`` is
the torus volume of the other links staying within ``|a_k|`` of the origin.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import TrajectoryError, ValidationError
from .spectral import OscillatorSum
from .torus_volume import QuadratureConfig, TorusVolumeResult, torus_volume

logger = logging.getLogger(__name__)

NON_RESONANT = "non_resonant_up_to_bound"
RESONANT = "resonant"
ALMOST_RESONANCE_ONLY = "almost_resonance_only"

DEFAULT_RESONANCE_BOUND = 10
MAX_RESONANCE_CANDIDATES = 10**8


@dataclass(frozen=True)
class ResonanceReport:
    status: str
    witness: tuple[int, ...] | None
    search_bound: int
    tolerance: float

    @property
    def non_resonant(self) -> bool:
        return self.status == NON_RESONANT


@dataclass(frozen=True, eq=False)
class MeanMotionResult:
    omega: float
    weights: np.ndarray
    weight_errors: np.ndarray
    frequencies: np.ndarray
    resonance: ResonanceReport
    methods: tuple[str, ...] = ()
    details: tuple[TorusVolumeResult, ...] = field(default=(), repr=False)

    @property
    def weight_sum(self) -> float:
        return float(self.weights.sum())

    @property
    def weight_tolerance(self) -> float:
        """Aggregate error budget for the simplex invariants."""
        return float(self.weight_errors.sum()) + 1e-12 * self.weights.size

    @property
    def omega_error(self) -> float:
        return float(self.weight_errors @ np.abs(self.frequencies))


def check_resonance(
    freqs: Sequence[float],
    L: int = DEFAULT_RESONANCE_BOUND,
    tol: float | None = None,
    max_candidates: int = MAX_RESONANCE_CANDIDATES,
) -> ResonanceReport:
    """Exhaustive search for integer relations ``sum l_k lambda_k ~ 0``, ``|l_k| <= L``.

    Among relations found, those with ``sum l_k = 0`` violate even the relaxed
    (almost non-resonant) condition and are preferred as witness. The witness
    is the one of smallest Euclidean norm, sign-normalised so that its first
    nonzero entry is positive.
    """
    lam = np.asarray(freqs, dtype=float).reshape(-1)
    if lam.size == 0:
        raise ValidationError("need at least one frequency")
    if np.unique(lam).size != lam.size:
        raise ValidationError("frequencies must be distinct")
    L = int(L)
    if L < 1:
        raise ValidationError(f"search bound L must be >= 1, got {L}")
    m = lam.size
    work = m * (2 * L + 1) ** m
    if work > max_candidates:
        raise ValidationError(
            f"resonance search over [-{L},{L}]^{m} needs {work:.3g} candidate operations "
            f"(cap {max_candidates:.3g}); use a smaller L"
        )
    if tol is None:
        tol = 1e-9 * float(np.max(np.abs(lam)))

    rng = np.arange(-L, L + 1, dtype=np.int64)
    hits = []
    # first coordinate in [0, L] covers every relation up to sign
    rest = (
        np.array(list(itertools.product(rng, repeat=m - 1)), dtype=np.int64).reshape(-1, m - 1)
        if m > 1
        else np.zeros((1, 0), dtype=np.int64)
    )
    partial = rest @ lam[1:] if m > 1 else np.zeros(1)
    for first in range(0, L + 1):
        resid = first * lam[0] + partial
        idx = np.nonzero(np.abs(resid) <= tol)[0]
        for i in idx:
            vec = np.concatenate([[first], rest[i]])
            if not vec.any():
                continue
            nz = vec[np.nonzero(vec)[0][0]]
            if nz < 0:
                vec = -vec
            hits.append(tuple(int(v) for v in vec))
    hits = sorted(set(hits), key=lambda v: (sum(x * x for x in v), v))
    if not hits:
        return ResonanceReport(NON_RESONANT, None, L, tol)
    strict = [h for h in hits if sum(h) == 0]
    if strict:
        return ResonanceReport(RESONANT, strict[0], L, tol)
    return ResonanceReport(ALMOST_RESONANCE_ONLY, hits[0], L, tol)


def _affordable_bound(m: int, L: int, cap: int) -> int:
    while L > 1 and m * (2 * L + 1) ** m > cap:
        L -= 1
    return L


def mean_motion(
    osc: OscillatorSum,
    cfg: QuadratureConfig | None = None,
    resonance_bound: int = DEFAULT_RESONANCE_BOUND,
) -> MeanMotionResult:
    """Weighted average of the frequencies with torus-volume weights.

    A resonant spectrum is reported and logged, not rejected.
    """
    lam = osc.frequencies
    mod = osc.moduli
    m = lam.size
    L = _affordable_bound(m, resonance_bound, MAX_RESONANCE_CANDIDATES)
    if m * (2 * L + 1) ** m > MAX_RESONANCE_CANDIDATES:
        resonance = ResonanceReport(NON_RESONANT, None, 0, 0.0)
        logger.warning("resonance search skipped: %d frequencies is too many", m)
    else:
        resonance = check_resonance(lam, L)
    if resonance.status != NON_RESONANT:
        logger.warning(
            "frequencies are %s (witness %s); the mean-motion formula may not apply",
            resonance.status,
            resonance.witness,
        )

    if m == 1:
        weights = np.ones(1)
        errors = np.zeros(1)
        details: tuple[TorusVolumeResult, ...] = ()
    else:
        results = []
        for k in range(m):
            others = np.delete(mod, k)
            results.append(torus_volume(mod[k], others, cfg=cfg))
        details = tuple(results)
        weights = np.array([res.value for res in results])
        errors = np.array([res.error_estimate for res in results])
    omega = float(lam @ weights)
    methods = tuple(res.method for res in details) or ("single_term",)
    return MeanMotionResult(omega, weights, errors, lam, resonance, methods, details)


def evaluate_z(osc: OscillatorSum, t):
    """``sum_k a_k exp(i lambda_k t)``; ``t`` may be a scalar or an array."""
    t_arr = np.asarray(t, dtype=float)
    z = np.exp(1j * np.multiply.outer(t_arr, osc.frequencies)) @ osc.amplitudes
    return complex(z) if t_arr.ndim == 0 else z


@dataclass(frozen=True)
class UnwrapConfig:
    h_max: float | None = None
    eps_z: float | None = None
    max_refinements: int = 40

    def __post_init__(self):
        if self.h_max is not None and not self.h_max > 0:
            raise ValidationError(f"h_max must be positive, got {self.h_max}")
        if self.max_refinements < 0:
            raise ValidationError("max_refinements must be non-negative")


class EmpiricalMeanMotion(NamedTuple):
    omega_hat: float
    min_abs_z: float
    samples: int


def empirical_mean_motion(osc: OscillatorSum, T: float, cfg: UnwrapConfig | None = None) -> EmpiricalMeanMotion:
    """``(Phi(T) - Phi(0)) / T`` from continuous tracking of ``arg z``.

    A uniform grid is refined by interval halving wherever the principal
    argument increment between neighbours reaches ``pi/2``.
    """
    cfg = cfg or UnwrapConfig()
    if not (math.isfinite(T) and T > 0):
        raise ValidationError(f"T must be positive, got {T}")
    lam_max = osc.max_frequency
    h_max = cfg.h_max if cfg.h_max is not None else (0.05 / lam_max if lam_max > 0 else T)
    h = min(h_max, 0.1 / lam_max) if lam_max > 0 else h_max
    eps_z = cfg.eps_z if cfg.eps_z is not None else 1e-9 * osc.total_amplitude
    n = max(int(math.ceil(T / h)), 1)
    t = np.linspace(0.0, T, n + 1)
    z = evaluate_z(osc, t)
    _check_origin(z, t, eps_z)
    min_abs = float(np.min(np.abs(z)))
    samples = z.size

    dphi = np.angle(z[1:] / z[:-1])
    bad = np.abs(dphi) >= math.pi / 2
    total = float(dphi[~bad].sum())
    tl, tr, zl, zr = t[:-1][bad], t[1:][bad], z[:-1][bad], z[1:][bad]
    level = 0
    while tl.size:
        if level >= cfg.max_refinements:
            raise TrajectoryError(
                f"argument increment near t = {tl[0]:.6g} not resolved after {cfg.max_refinements} halvings"
            )
        tm = 0.5 * (tl + tr)
        zm = evaluate_z(osc, tm)
        _check_origin(zm, tm, eps_z)
        min_abs = min(min_abs, float(np.min(np.abs(zm))))
        samples += zm.size
        tl, tr = np.concatenate([tl, tm]), np.concatenate([tm, tr])
        zl, zr = np.concatenate([zl, zm]), np.concatenate([zm, zr])
        dphi = np.angle(zr / zl)
        bad = np.abs(dphi) >= math.pi / 2
        total += float(dphi[~bad].sum())
        tl, tr, zl, zr = tl[bad], tr[bad], zl[bad], zr[bad]
        level += 1
    return EmpiricalMeanMotion(total / T, min_abs, samples)


def _check_origin(z, t, eps_z):
    small = np.abs(z) < eps_z
    if np.any(small):
        t0 = float(np.asarray(t)[np.argmax(small)])
        raise TrajectoryError(
            f"trajectory passes near origin (|z| < {eps_z:.3g} at t = {t0:.6g}); "
            "mean motion undefined on this path"
        )
