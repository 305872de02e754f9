"""Switching-point density of time-optimal bang-bang controls for linear
systems with purely imaginary spectrum, via the mean motion of oscillator sums.
"""
from .bessel import BesselEval, bessel_eval, j0, j1, jp_integral_oracle
from .estimator import SwitchingDensityEstimator, check_oscillator_array
from .exceptions import (
    AssumptionError,
    MeanMotionError,
    NumericalError,
    QuadratureError,
    SpectralError,
    TrajectoryError,
    ValidationError,
)
from .mean_motion import (
    MeanMotionResult,
    ResonanceReport,
    UnwrapConfig,
    check_resonance,
    empirical_mean_motion,
    evaluate_z,
    mean_motion,
)
from .spectral import (
    LinearSystem,
    OscillatorSum,
    SpectrumReport,
    blocks_oscillator_sum,
    controllability_check,
    eigen_decompose,
    extract_oscillator_sum,
    matrix_exponential,
)
from .switching import (
    BoundCheck,
    ZeroConfig,
    ZeroCountResult,
    count_zeros,
    eval_m,
    proposition_bounds,
    simulate_bang_bang,
    theorem1_bound,
)
from .torus_volume import (
    QuadratureConfig,
    TorusVolumeResult,
    torus_volume,
    w1_step,
    w2_closed_form,
    w_bww,
    w_monte_carlo,
)

__version__ = "0.1.0"
