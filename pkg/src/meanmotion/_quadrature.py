"""Fixed-order Gauss-Legendre panel rules and a small adaptive integrator."""
from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] for an ``order``-point rule."""
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Map a rule onto consecutive panels ``[edges[i], edges[i+1]]``.

    Returns arrays of shape ``(n_panels, order)``: the nodes and the weights
    already scaled by each panel's half-width.
    """
    x, w = gauss_legendre(order)
    left = edges[:-1, None]
    half = 0.5 * np.diff(edges)[:, None]
    return left + half * (x + 1.0), half * w


def adaptive_integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    order: int = 15,
    max_panels: int = 100_000,
) -> tuple[complex | float, float]:
    """Integrate a vectorised ``f`` over ``[a, b]`` by bisecting panels.

    A panel is accepted when its one-panel estimate and the sum over its two
    halves differ by at most its share of ``tol``. Returns ``(value, error)``
    where ``error`` is the sum of accepted panel discrepancies.
    """
    if not b > a:
        raise ValueError(f"need b > a, got [{a}, {b}]")
    length = b - a
    active = np.array([a, b], dtype=float)
    lefts, rights = active[:1], active[1:]
    total = 0.0
    err = 0.0
    n_evaluated = 0
    while lefts.size:
        mids = 0.5 * (lefts + rights)
        whole = _panel_sums(f, lefts, rights, order)
        halves = _panel_sums(f, lefts, mids, order) + _panel_sums(f, mids, rights, order)
        diff = np.abs(whole - halves)
        ok = diff <= tol * (rights - lefts) / length
        total = total + halves[ok].sum()
        err += float(diff[ok].sum())
        n_evaluated += lefts.size
        if n_evaluated > max_panels:
            raise RuntimeError(
                f"adaptive quadrature exceeded {max_panels} panels on [{a}, {b}]"
            )
        keep = ~ok
        lefts = np.concatenate([lefts[keep], mids[keep]])
        rights = np.concatenate([mids[keep], rights[keep]])
    return total, err


def _panel_sums(f, lefts: np.ndarray, rights: np.ndarray, order: int) -> np.ndarray:
    x, w = gauss_legendre(order)
    half = 0.5 * (rights - lefts)[:, None]
    nodes = lefts[:, None] + half * (x + 1.0)
    return (f(nodes) * (half * w)).sum(axis=1)
