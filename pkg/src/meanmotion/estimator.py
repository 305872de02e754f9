"""scikit-learn style front end.

``X`` is an oscillator table with one row per term: ``[re(a_k), im(a_k), lambda_k]``.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ValidationError
from .mean_motion import mean_motion
from .spectral import LinearSystem, OscillatorSum, extract_oscillator_sum
from .switching import ZeroConfig, count_zeros
from .torus_volume import QuadratureConfig


def check_oscillator_array(X) -> np.ndarray:
    """Validate an ``(m, 3)`` oscillator table and return it as float64."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 3:
        raise ValidationError(f"oscillator table needs 3 columns [re, im, freq], got {X.shape[1]}")
    if np.unique(X[:, 2]).size != X.shape[0]:
        raise ValidationError("frequencies (column 2) must be distinct")
    return X


def oscillator_array(osc: OscillatorSum) -> np.ndarray:
    return np.column_stack([osc.amplitudes.real, osc.amplitudes.imag, osc.frequencies])


def check_horizons(T) -> np.ndarray:
    T = np.atleast_1d(np.asarray(T, dtype=float)).reshape(-1)
    if not np.all(np.isfinite(T)) or np.any(T <= 0):
        raise ValidationError("horizons must be finite and positive")
    return T


class SwitchingDensityEstimator(BaseEstimator):
    """Mean motion and switching-point density of an oscillator sum.

    After ``fit``, ``omega_`` is the mean motion and ``density_ = |omega_| / pi``
    the asymptotic lower rate of switching points; ``predict(T)`` returns the
    linear lower bound ``density_ * T - allowance``.

    Parameters
    ----------
    tol : float
        Quadrature tolerance for the torus-volume weights.
    resonance_bound : int
        Coefficient bound of the integer-relation search.
    oversample : int
        Zero-search grid points per half period of the fastest term.
    allowance : float
        Constant subtracted from the linear bound.
    """

    def __init__(self, tol=1e-8, resonance_bound=10, oversample=16, allowance=2.0):
        self.tol = tol
        self.resonance_bound = resonance_bound
        self.oversample = oversample
        self.allowance = allowance

    def fit(self, X, y=None):
        X = check_oscillator_array(X)
        self.oscillators_ = OscillatorSum(X[:, 0] + 1j * X[:, 1], X[:, 2])
        return self._fit_sum()

    def fit_system(self, A, b, p):
        """Fit from a linear system ``(A, b, p)`` instead of an oscillator table."""
        self.oscillators_ = extract_oscillator_sum(LinearSystem(A, b, p))
        return self._fit_sum()

    def _fit_sum(self):
        res = mean_motion(self.oscillators_, QuadratureConfig(tol=self.tol), self.resonance_bound)
        self.mean_motion_ = res
        self.omega_ = res.omega
        self.weights_ = res.weights
        self.resonance_ = res.resonance
        self.density_ = abs(res.omega) / math.pi
        self.n_features_in_ = 3
        return self

    def predict(self, T):
        check_is_fitted(self, "omega_")
        return self.density_ * check_horizons(T) - self.allowance

    def count_zeros(self, T):
        """Observed ``N(T)`` for each horizon."""
        check_is_fitted(self, "omega_")
        cfg = ZeroConfig(oversample=self.oversample)
        return np.array([count_zeros(self.oscillators_, float(t), cfg).count for t in check_horizons(T)])

    def score(self, T):
        """Fraction of horizons at which the lower bound holds."""
        return float(np.mean(self.count_zeros(T) >= self.predict(T)))
