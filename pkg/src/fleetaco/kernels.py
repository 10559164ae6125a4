"""Kernel backend selection and shared solver precomputations.

The compiled extension is used when importable; otherwise the pure-Python
mirrors take over. FLEETACO_PURE_PYTHON=1 forces the fallback. Both backends
are bitwise-identical given the same random stream, so the choice only affects
speed. BACKEND names the active one.
"""

import os

import numpy as np

from fleetaco.model import Instance

_FORCE_PURE = os.environ.get("FLEETACO_PURE_PYTHON", "").strip().lower() in {"1", "true", "yes"}

if _FORCE_PURE:
    from fleetaco import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from fleetaco import _kernels_c as _impl

        BACKEND = "compiled"
    except ImportError:
        from fleetaco import _kernels_py as _impl

        BACKEND = "python"

construct_full = _impl.construct_full
construct_partial = _impl.construct_partial
construct_blocks = _impl.construct_blocks
evaluate_order = _impl.evaluate_order

HEURISTIC_FLOOR = 1e-3  # minutes; keeps eta finite on coincident vertices


def travel_matrix(instance: Instance) -> np.ndarray:
    """Pairwise travel minutes between all vertices (depot stands in for a vehicle)."""
    arr = instance.arrays
    dx = arr.xs[:, None] - arr.xs[None, :]
    dy = arr.ys[:, None] - arr.ys[None, :]
    # same expression shape as the scalar kernels: sqrt(dx*dx+dy*dy)/speed*60
    return np.sqrt(dx * dx + dy * dy) / instance.speed_kph * 60.0


def eta_matrix(instance: Instance) -> np.ndarray:
    """Heuristic desirability: inverse travel minutes, 1.0 between vehicle vertices."""
    cost = travel_matrix(instance)
    eta = 1.0 / np.maximum(cost, HEURISTIC_FLOOR)
    veh = instance.arrays.is_vehicle.astype(bool)
    eta[np.ix_(veh, veh)] = 1.0
    return eta


def power_matrix(matrix: np.ndarray, exponent: float) -> np.ndarray:
    """Elementwise power with exact multiply chains for exponents 1, 2, 3."""
    if exponent == 1.0:
        return matrix.copy()
    if exponent == 2.0:
        return matrix * matrix
    if exponent == 3.0:
        return matrix * matrix * matrix
    return np.power(matrix, exponent)


def combined_weights(tau: np.ndarray, alpha: float, eta_beta: np.ndarray) -> np.ndarray:
    """tau^alpha * eta^beta, the per-edge weight of the random proportional rule."""
    if alpha == 1.0:
        return tau * eta_beta
    return power_matrix(tau, alpha) * eta_beta


class ConstructionBuffers:
    """Reusable per-run scratch arrays sized to one instance."""

    def __init__(self, n: int):
        self.order = np.empty(n, dtype=np.int32)
        self.cum = np.empty(n, dtype=np.float64)
        self.cand = np.empty(n, dtype=np.int32)
        self.pool = np.empty(n, dtype=np.int32)
        self.pool_pos = np.empty(n, dtype=np.int32)
        self.contrib = np.empty(n, dtype=np.float64)
        self.touched = np.empty(n, dtype=np.int32)
        self.serviced = np.empty(n, dtype=np.uint8)
