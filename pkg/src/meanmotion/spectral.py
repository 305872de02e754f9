"""Linear-system side of the problem.

Eigen-analysis of the dynamics matrix, matrix exponential, the Kalman rank
test, and the reduction of the switching function

    m(t) = p^T exp(-A t) b

to a finite oscillator sum ``Re sum_k a_k exp(i lambda_k t)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import AssumptionError, NumericalError, SpectralError, ValidationError

MAX_DIMENSION = 64
DEFAULT_TOL_SPEC = 1e-8
DEFAULT_TOL_RANK = 1e-10
# Relative gap below which two frequencies are considered equal.
DEFAULT_TOL_FREQ = 1e-6


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Single-input system ``x' = A x + b u`` with costate direction ``p``."""

    A: np.ndarray
    b: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        if n % 2 or not 2 <= n <= MAX_DIMENSION:
            raise ValidationError(f"dimension n must be even with 2 <= n <= {MAX_DIMENSION}, got {n}")
        if b.shape != (n,) or p.shape != (n,):
            raise ValidationError(f"b and p must have length {n}, got {b.shape[0]} and {p.shape[0]}")
        for name, arr in (("A", A), ("b", b), ("p", p)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} has non-finite entries")
        if not np.linalg.norm(b) > 0:
            raise ValidationError("b must be nonzero")
        if not np.linalg.norm(p) > 0:
            raise ValidationError("p must be nonzero")
        A.setflags(write=False)
        b.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_blocks(cls, freqs: Iterable[float], b, p) -> "LinearSystem":
        """System with ``A = diag(B_1, ..., B_k)``, ``B_k = [[0, l_k], [-l_k, 0]]``."""
        return cls(block_diagonal(freqs), b, p)

    def switching_function(self, t: float) -> float:
        """Direct evaluation of ``p^T exp(-A t) b``."""
        return float(self.p @ matrix_exponential(self.A, -t) @ self.b)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    max_real_part: float
    purely_imaginary: bool
    frequencies: np.ndarray


@dataclass(frozen=True, eq=False)
class OscillatorSum:
    """Finite sum ``z(t) = sum_k a_k exp(i lambda_k t)``.

    Terms are sorted by frequency; zero-amplitude terms are dropped.
    Phases are carried by the complex amplitudes.
    """

    amplitudes: np.ndarray
    frequencies: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex)).reshape(-1)
        lam = np.atleast_1d(np.asarray(self.frequencies, dtype=float)).reshape(-1)
        if a.shape != lam.shape:
            raise ValidationError(
                f"got {a.size} amplitudes but {lam.size} frequencies"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(lam))):
            raise ValidationError("amplitudes and frequencies must be finite")
        keep = np.abs(a) > 0
        a, lam = a[keep], lam[keep]
        if a.size == 0:
            raise ValidationError("oscillator sum needs at least one term with nonzero amplitude")
        order = np.argsort(lam, kind="stable")
        a, lam = a[order], lam[order]
        if np.any(np.diff(lam) == 0):
            raise ValidationError("frequencies must be distinct; merge equal-frequency terms first")
        a.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "frequencies", lam)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, float]]) -> "OscillatorSum":
        terms = list(terms)
        if not terms:
            raise ValidationError("oscillator sum needs at least one term")
        a, lam = zip(*terms)
        return cls(np.array(a, dtype=complex), np.array(lam, dtype=float))

    @property
    def terms(self) -> list[tuple[complex, float]]:
        return [(complex(a), float(l)) for a, l in zip(self.amplitudes, self.frequencies)]

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.amplitudes)

    @property
    def total_amplitude(self) -> float:
        return float(self.moduli.sum())

    @property
    def max_frequency(self) -> float:
        return float(np.max(np.abs(self.frequencies)))

    def __len__(self) -> int:
        return self.amplitudes.size

    def scaled(self, c: float) -> "OscillatorSum":
        return OscillatorSum(self.amplitudes * c, self.frequencies)

    def rotated(self, phases) -> "OscillatorSum":
        """Multiply each amplitude by ``exp(i phase_k)``."""
        return OscillatorSum(self.amplitudes * np.exp(1j * np.asarray(phases, dtype=float)), self.frequencies)

    def shifted(self, s: float) -> "OscillatorSum":
        """The sum ``t -> z(t + s)``."""
        return self.rotated(self.frequencies * s)


def block_diagonal(freqs: Iterable[float]) -> np.ndarray:
    freqs = np.asarray(list(freqs), dtype=float)
    n = 2 * freqs.size
    A = np.zeros((n, n))
    for k, lam in enumerate(freqs):
        A[2 * k, 2 * k + 1] = lam
        A[2 * k + 1, 2 * k] = -lam
    return A


def eigen_decompose(A, tol_spec: float = DEFAULT_TOL_SPEC) -> SpectrumReport:
    """Eigenvalues of ``A`` and the check for a purely imaginary spectrum."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"A must be square, got shape {A.shape}")
    if A.shape[0] > MAX_DIMENSION:
        raise ValidationError(f"n = {A.shape[0]} exceeds {MAX_DIMENSION}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("A has non-finite entries")
    try:
        eig = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigenvalue iteration failed to converge: {exc}") from exc
    eig = eig[np.lexsort((eig.imag, eig.real))]
    scale = np.linalg.norm(A, 2)
    thresh = tol_spec * scale
    max_re = float(np.max(np.abs(eig.real))) if eig.size else 0.0
    imaginary = bool(max_re <= thresh)
    freqs = np.array([], dtype=float)
    if imaginary:
        im = eig.imag
        pos = np.sort(im[im > thresh])
        n_zero = eig.size - 2 * pos.size
        freqs = np.concatenate([np.zeros(max(n_zero, 0) // 2), pos])
    return SpectrumReport(eig, max_re, imaginary, freqs)


def matrix_exponential(A, t: float = 1.0) -> np.ndarray:
    """``exp(A t)`` by scaling and squaring."""
    At = np.asarray(A, dtype=float) * t
    norm = np.linalg.norm(At, 1)
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(At)
    if not np.all(np.isfinite(E)):
        raise NumericalError(f"matrix exponential overflowed: ||A t||_1 = {norm:.6g}")
    return E


def kalman_matrix(A, b) -> np.ndarray:
    """``[b, A b, ..., A^(n-1) b]`` as columns."""
    A = np.asarray(A, dtype=float)
    cols = [np.asarray(b, dtype=float)]
    for _ in range(A.shape[0] - 1):
        cols.append(A @ cols[-1])
    return np.column_stack(cols)


class Controllability(NamedTuple):
    controllable: bool
    kalman_rank: int


def controllability_check(sys: LinearSystem, tol_rank: float = DEFAULT_TOL_RANK) -> Controllability:
    """Numerical Kalman rank by column-pivoted QR."""
    K = kalman_matrix(sys.A, sys.b)
    col_max = np.max(np.linalg.norm(K, axis=0))
    R = scipy.linalg.qr(K, mode="r", pivoting=True)[0]
    rank = int(np.sum(np.abs(np.diag(R)) > tol_rank * col_max))
    return Controllability(rank == sys.n, rank)


def extract_oscillator_sum(
    sys: LinearSystem,
    tol_spec: float = DEFAULT_TOL_SPEC,
    tol_freq: float = DEFAULT_TOL_FREQ,
    verify: bool = True,
) -> OscillatorSum:
    """Write ``p^T exp(-A t) b`` as ``Re sum_k a_k exp(i lambda_k t)``.

    With ``A = V diag(mu) V^-1`` the switching function is
    ``sum_j (p^T v_j)(V^-1 b)_j exp(-mu_j t)``; the eigenvalue ``-i lambda_k``
    contributes ``c exp(i lambda_k t)`` and its conjugate partner the complex
    conjugate, so ``a_k = 2 c``.
    """
    report = eigen_decompose(sys.A, tol_spec)
    if not report.purely_imaginary:
        raise AssumptionError(
            "spectrum of A is not purely imaginary "
            f"(max |Re lambda| = {report.max_real_part:.3g})"
        )
    scale = np.linalg.norm(sys.A, 2)
    freqs = report.frequencies
    gaps = np.diff(np.concatenate([[0.0], freqs]))
    if freqs.size == 0 or np.any(gaps <= tol_freq * scale):
        raise AssumptionError(f"spectrum not simple: frequencies {freqs.tolist()}")
    try:
        mu, V = np.linalg.eig(sys.A)
        coords = np.linalg.solve(V, sys.b.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigenvector basis is singular: {exc}") from exc
    coef = (sys.p @ V) * coords
    neg = mu.imag < 0
    amps = 2.0 * coef[neg]
    lams = -mu.imag[neg]
    drop = np.abs(amps) <= 1e-10 * np.linalg.norm(sys.p) * np.linalg.norm(sys.b)
    if np.all(drop):
        raise ValidationError("switching function vanishes identically (p is orthogonal to every mode)")
    osc = OscillatorSum(amps[~drop], lams[~drop])
    if verify:
        _verify_extraction(sys, osc)
    return osc


def blocks_oscillator_sum(freqs, b, p) -> OscillatorSum:
    """Exact oscillator sum for the block-diagonal form.

    Block ``k`` contributes ``c cos(l t) + d sin(l t)`` with
    ``c = p1 b1 + p2 b2`` and ``d = p2 b1 - p1 b2``, i.e. ``a_k = c - i d``.
    """
    freqs = np.asarray(freqs, dtype=float)
    sys = LinearSystem.from_blocks(freqs, b, p)
    if np.any(freqs <= 0) or np.unique(freqs).size != freqs.size:
        raise AssumptionError(f"spectrum not simple: block frequencies must be positive and distinct, got {freqs.tolist()}")
    pb = sys.p.reshape(-1, 2)
    bb = sys.b.reshape(-1, 2)
    c = pb[:, 0] * bb[:, 0] + pb[:, 1] * bb[:, 1]
    d = pb[:, 1] * bb[:, 0] - pb[:, 0] * bb[:, 1]
    amps = c - 1j * d
    if np.all(amps == 0):
        raise ValidationError("switching function vanishes identically (p is orthogonal to every mode)")
    return OscillatorSum(amps, freqs)


def _verify_extraction(sys: LinearSystem, osc: OscillatorSum, n_points: int = 200) -> None:
    t = np.linspace(0.0, 20 * np.pi / np.min(osc.frequencies), n_points)
    direct = np.array([sys.switching_function(ti) for ti in t])
    summed = np.real(np.exp(1j * np.outer(t, osc.frequencies)) @ osc.amplitudes)
    err = float(np.max(np.abs(direct - summed)))
    bound = 1e-9 * np.linalg.norm(sys.p) * np.linalg.norm(sys.b)
    if err > bound:
        raise NumericalError(
            f"oscillator sum disagrees with p^T exp(-A t) b by {err:.3g} (> {bound:.3g}); "
            "eigenvector basis is likely ill-conditioned"
        )
