"""Zeros of the switching function ``m(t) = Re z(t)`` and the bang-bang loop."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import ValidationError
from .mean_motion import evaluate_z
from .spectral import LinearSystem, OscillatorSum, extract_oscillator_sum

DEFAULT_ALLOWANCE = 2.0
_LOCAL_REFINE = 64


@dataclass(frozen=True)
class ZeroConfig:
    oversample: int = 16
    tol_m: float | None = None
    tol_m_resid: float | None = None

    def __post_init__(self):
        if self.oversample < 4:
            raise ValidationError(f"oversample must be >= 4, got {self.oversample}")

    def resolved(self, osc: OscillatorSum) -> tuple[float, float]:
        total = osc.total_amplitude
        tol_m = self.tol_m if self.tol_m is not None else 1e-8 * total
        tol_resid = self.tol_m_resid if self.tol_m_resid is not None else 1e-10 * total
        return tol_m, tol_resid


@dataclass(frozen=True, eq=False)
class ZeroCountResult:
    zeros: np.ndarray
    grid_step: float
    suspect_tangencies: np.ndarray

    @property
    def count(self) -> int:
        return int(self.zeros.size)


class BoundCheck(NamedTuple):
    lower_bound: float
    holds: bool
    slack: float
    count: int


def eval_m(osc: OscillatorSum, t):
    """Switching function ``Re sum_k a_k exp(i lambda_k t)``."""
    return np.real(evaluate_z(osc, t))


def _eval_dm(osc: OscillatorSum, t):
    t = np.asarray(t, dtype=float)
    return np.real(np.exp(1j * np.multiply.outer(t, osc.frequencies)) @ (1j * osc.frequencies * osc.amplitudes))


def _bisect(f, lo, hi, flo, xtol, max_iter=200):
    """Vectorised bisection on brackets ``[lo, hi]`` with ``f(lo) = flo``."""
    lo, hi, flo = lo.astype(float).copy(), hi.astype(float).copy(), flo.copy()
    for _ in range(max_iter):
        if not lo.size or np.all(hi - lo <= xtol):
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        exact = fm == 0
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
        lo[exact] = mid[exact]
        hi[exact] = mid[exact]
    return 0.5 * (lo + hi)


def count_zeros(osc: OscillatorSum, T: float, cfg: ZeroConfig | None = None) -> ZeroCountResult:
    """Locate the zeros of ``m`` on ``[0, T]`` (both endpoints included).

    Sign changes on a grid of step ``pi / (oversample * lambda_max)`` are
    refined by bisection. Within sign-preserving grid intervals the extremum
    of ``m`` is located from the sign change of ``m'`` and checked for a hidden
    pair of crossings. Touching without a crossing is reported as a suspect
    tangency and not counted.
    """
    cfg = cfg or ZeroConfig()
    if not (math.isfinite(T) and T > 0):
        raise ValidationError(f"T must be positive, got {T}")
    lam_max = osc.max_frequency
    if not lam_max > 0:
        raise ValidationError("count_zeros needs a nonzero frequency")
    tol_m, tol_resid = cfg.resolved(osc)
    xtol = 1e-10 * T
    step = math.pi / (cfg.oversample * lam_max)
    n = max(int(math.ceil(T / step)), 1)
    t = np.linspace(0.0, T, n + 1)
    m = eval_m(osc, t)
    f = lambda s: eval_m(osc, s)

    found = []
    tangencies = []

    # strict sign changes between grid neighbours
    sc = np.nonzero(m[:-1] * m[1:] < 0)[0]
    found.append(_bisect(f, t[sc], t[sc + 1], m[sc], xtol))

    # grid points that are (numerically) zeros themselves
    near = np.nonzero(np.abs(m) <= tol_resid)[0]
    for i in near:
        if i == 0 or i == n:
            found.append(np.array([t[i]]))
        elif m[i - 1] * m[i + 1] < 0:
            found.append(np.array([t[i]]))
        elif m[i] == 0:
            tangencies.append(t[i])

    # hidden crossing pairs: extremum of m inside a sign-preserving interval
    dm = _eval_dm(osc, t)
    no_change = m[:-1] * m[1:] > 0
    crit = np.nonzero(no_change & (dm[:-1] * dm[1:] < 0))[0]
    if crit.size:
        tc = _bisect(lambda s: _eval_dm(osc, s), t[crit], t[crit + 1], dm[crit], xtol)
        mc = f(tc)
        # an extremum within the residual of zero is a touch, not a crossing pair
        flip = (np.sign(mc) != np.sign(m[crit])) & (np.abs(mc) > tol_resid)
        if np.any(flip):
            i = crit[flip]
            found.append(_bisect(f, t[i], tc[flip], m[i], xtol))
            found.append(_bisect(f, tc[flip], t[i + 1], mc[flip], xtol))
        touch = ~flip & (np.abs(mc) < tol_m)
        tangencies.extend(tc[touch].tolist())

    # small grid values without an adjacent sign change: look closer
    small = np.nonzero(np.abs(m) < tol_m)[0]
    for i in small:
        lo, hi = max(i - 1, 0), min(i + 1, n)
        if np.any(m[lo:hi] * m[lo + 1 : hi + 1] < 0):
            continue
        fine_t = np.linspace(t[lo], t[hi], _LOCAL_REFINE * (hi - lo) + 1)
        fine_m = f(fine_t)
        j = np.nonzero(fine_m[:-1] * fine_m[1:] < 0)[0]
        if j.size:
            found.append(_bisect(f, fine_t[j], fine_t[j + 1], fine_m[j], xtol))
        elif 0 < i < n and abs(m[i]) > tol_resid:
            tangencies.append(float(fine_t[np.argmin(np.abs(fine_m))]))

    zeros = _dedupe(np.concatenate(found) if found else np.array([]), 1e-9 * T)
    tang = _dedupe(np.array(tangencies, dtype=float), 1e-9 * T)
    if tang.size and zeros.size:
        dist = np.min(np.abs(tang[:, None] - zeros[None, :]), axis=1)
        tang = tang[dist > 1e-9 * T]
    return ZeroCountResult(zeros, T / n, tang)


def _dedupe(x: np.ndarray, tol: float) -> np.ndarray:
    if x.size == 0:
        return np.array([], dtype=float)
    x = np.sort(x)
    keep = np.concatenate([[True], np.diff(x) > tol])
    return x[keep]


def theorem1_bound(
    osc: OscillatorSum,
    T: float,
    omega: float,
    allowance: float = DEFAULT_ALLOWANCE,
    zeros: ZeroCountResult | None = None,
) -> BoundCheck:
    """Compare ``N(T)`` with the linear lower bound ``|omega| T / pi - allowance``."""
    if not T > 0:
        raise ValidationError(f"T must be positive, got {T}")
    if zeros is None:
        zeros = count_zeros(osc, T)
    lower = abs(omega) / math.pi * T - allowance
    slack = zeros.count - lower
    return BoundCheck(lower, slack >= 0, slack, zeros.count)


def proposition_bounds(a1: float, l1: float, a2: float, l2: float, T: float) -> tuple[float, float]:
    """Exact bracket for ``N(T)`` of ``a1 cos(l1 t) + a2 cos(l2 t)``, ``l1 > l2 > 0``."""
    if not l1 > l2 > 0:
        raise ValidationError(f"need l1 > l2 > 0, got l1={l1}, l2={l2}")
    if a1 == a2:
        raise ValidationError("Proposition inapplicable: a1 == a2")
    if a1 > a2:
        return l1 * T / math.pi, l1 * T / math.pi + 1
    return l2 * T / math.pi, l1 * T / math.pi


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    switch_times: np.ndarray

    def __iter__(self):
        return iter(zip(self.t, self.x, self.u))

    @property
    def switch_count(self) -> int:
        return int(np.count_nonzero(np.diff(self.u) != 0))


def rk4_affine(A: np.ndarray, c: np.ndarray, x0: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Classical RK4 for ``x' = A x + c`` on the given time grid; returns one state per grid point."""
    x = np.asarray(x0, dtype=float).copy()
    out = [x.copy()]
    for dt in np.diff(grid):
        k1 = A @ x + c
        k2 = A @ (x + 0.5 * dt * k1) + c
        k3 = A @ (x + 0.5 * dt * k2) + c
        k4 = A @ (x + dt * k3) + c
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(x.copy())
    return np.array(out)


def simulate_bang_bang(
    sys: LinearSystem,
    x0,
    T: float,
    h: float,
    osc: OscillatorSum | None = None,
) -> Trajectory:
    """Integrate ``x' = A x + b sgn(m(t))`` by classical RK4.

    Steps are shortened so that every zero of ``m`` is a grid point and the
    control is constant on each step.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (sys.n,):
        raise ValidationError(f"x0 must have length {sys.n}")
    if not (T > 0 and h > 0):
        raise ValidationError("T and h must be positive")
    osc = osc if osc is not None else extract_oscillator_sum(sys)
    if h * osc.max_frequency > 0.1:
        raise ValidationError(
            f"step h = {h:g} too large: h * lambda_max = {h * osc.max_frequency:.3g} > 0.1"
        )
    zeros = count_zeros(osc, T).zeros
    inner = zeros[(zeros > 0) & (zeros < T)]
    breaks = np.concatenate([[0.0], inner, [T]])

    A, b = sys.A, sys.b
    ts, xs, us = [0.0], [x0.copy()], []
    x = x0.copy()
    for s0, s1 in zip(breaks[:-1], breaks[1:]):
        u = float(np.sign(eval_m(osc, 0.5 * (s0 + s1))))
        n = max(int(math.ceil((s1 - s0) / h - 1e-12)), 1)
        grid = np.linspace(s0, s1, n + 1)
        seg = rk4_affine(A, b * u, x, grid)
        x = seg[-1]
        xs.extend(seg[1:])
        us.extend([u] * n)
        ts.extend(grid[1:].tolist())
    # control at t = 0 is the one applied on the first step
    us.insert(0, us[0])
    return Trajectory(np.array(ts), np.array(xs), np.array(us), inner)
