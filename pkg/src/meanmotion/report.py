"""Analysis pipeline shared by the CLI: spectrum -> oscillators -> Omega -> N(T)."""
from __future__ import annotations

import math
from dataclasses import asdict
from typing import Sequence

import numpy as np

from .mean_motion import empirical_mean_motion, mean_motion
from .problem import Problem
from .spectral import controllability_check, eigen_decompose
from .switching import DEFAULT_ALLOWANCE, count_zeros, theorem1_bound

CONVERGENCE_HEADER = ("T", "omega_hat", "omega_formula", "zeros", "zero_density_times_pi")


def analyze(problem: Problem, T: float, horizons: Sequence[float] = ()) -> dict:
    """Run the full pipeline and return a JSON-ready report."""
    osc = problem.oscillators
    report: dict = {"input_form": problem.form}
    if problem.system is not None:
        spec = eigen_decompose(problem.system.A)
        ctrl = controllability_check(problem.system)
        report["spectrum"] = {
            "eigenvalues": [[float(e.real), float(e.imag)] for e in spec.eigenvalues],
            "max_real_part": spec.max_real_part,
            "purely_imaginary": spec.purely_imaginary,
            "frequencies": spec.frequencies.tolist(),
        }
        report["controllability"] = {"controllable": ctrl.controllable, "kalman_rank": ctrl.kalman_rank}
    else:
        report["spectrum"] = None
        report["controllability"] = None
    report["oscillators"] = [
        {"abs": abs(a), "re": a.real, "im": a.imag, "freq": lam} for a, lam in osc.terms
    ]

    mm = mean_motion(osc, problem.quadrature)
    report["resonance"] = asdict(mm.resonance)
    if mm.resonance.witness is not None:
        report["resonance"]["witness"] = list(mm.resonance.witness)
    report["mean_motion"] = {
        "omega": mm.omega,
        "omega_error": mm.omega_error,
        "weights": mm.weights.tolist(),
        "weight_errors": mm.weight_errors.tolist(),
        "weight_sum": mm.weight_sum,
        "methods": list(mm.methods),
    }

    zeros = count_zeros(osc, T, problem.zero)
    bound = theorem1_bound(osc, T, mm.omega, zeros=zeros)
    report["zeros"] = {
        "T": T,
        "count": zeros.count,
        "grid_step": zeros.grid_step,
        "suspect_tangencies": zeros.suspect_tangencies.tolist(),
    }
    report["bound"] = {
        "lower_bound": bound.lower_bound,
        "allowance": DEFAULT_ALLOWANCE,
        "holds": bool(bound.holds),
        "slack": bound.slack,
    }
    report["density_ratio"] = (
        zeros.count * math.pi / (abs(mm.omega) * T) if mm.omega != 0 else None
    )
    report["empirical"] = []
    for h in horizons or (T,):
        emp = empirical_mean_motion(osc, h, problem.unwrap)
        report["empirical"].append(
            {"T": float(h), "omega_hat": emp.omega_hat, "min_abs_z": emp.min_abs_z, "samples": emp.samples}
        )
    return report


def horizons(T_max: float, points: int, spacing: str = "linear") -> np.ndarray:
    if spacing == "linear":
        return np.linspace(T_max / points, T_max, points)
    if spacing == "log":
        return np.geomspace(T_max / points, T_max, points)
    raise ValueError(f"unknown spacing {spacing!r}")


def convergence_rows(problem: Problem, T_max: float, points: int, spacing: str = "linear") -> list[tuple]:
    """Rows ``(T, omega_hat, omega_formula, N(T), N(T) pi / T)``."""
    osc = problem.oscillators
    omega = mean_motion(osc, problem.quadrature).omega
    rows = []
    for T in horizons(T_max, points, spacing):
        T = float(T)
        emp = empirical_mean_motion(osc, T, problem.unwrap)
        n = count_zeros(osc, T, problem.zero).count
        rows.append((T, emp.omega_hat, omega, n, n * math.pi / T))
    return rows
