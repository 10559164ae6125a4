"""MAX-MIN Ant System over the vehicle-and-job permutation representation.

Each round, every ant builds a full permutation with the random proportional
rule, the global best is tracked under the hierarchical objective, all trails
evaporate, and only the global best deposits pheromone. Trails are clamped to
[tau_min, tau_max]; both bounds are re-derived from the best quality whenever
it improves.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from fleetaco import kernels, rng as streams
from fleetaco.model import (
    ConfigError,
    Evaluation,
    Instance,
    Solution,
    ValidationError,
    evaluate,
    quality,
)


@dataclass
class PheromoneMatrix:
    """Dense trail levels with MAX-MIN clamping bounds.

    Bounds start disabled (infinite range) and activate the first time a
    global best exists to derive them from.
    """

    tau: np.ndarray
    tau_min: float = 0.0
    tau_max: float = math.inf
    initial: float = 1.0

    @classmethod
    def uniform(cls, n: int, level: float = 1.0) -> "PheromoneMatrix":
        return cls(tau=np.full((n, n), level), initial=level)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.tau_max)

    def rebound(self, best_quality: float, rho: float, n_vertices: int) -> None:
        """Re-derive bounds from the best quality and clamp the matrix."""
        first = not self.bounded
        self.tau_max = 1.0 / (rho * best_quality)
        self.tau_min = self.tau_max / (2.0 * n_vertices)
        if first:
            self.tau[:] = self.tau_max
        else:
            np.clip(self.tau, self.tau_min, self.tau_max, out=self.tau)


@dataclass(frozen=True)
class MmasConfig:
    """MAX-MIN Ant System parameters."""

    ants: int = 192
    max_iterations: int = 1000
    alpha: float = 1.0
    beta: float = 1.0
    rho: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.ants < 1:
            raise ConfigError("ants must be at least 1")
        if not 0.0 < self.rho < 1.0:
            raise ConfigError("rho must lie strictly between 0 and 1")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("alpha and beta must be non-negative")
        if self.max_iterations < 0:
            raise ConfigError("max_iterations must be non-negative")


@dataclass
class ConstructionState:
    """Partial tour state: current vertex plus the visited set."""

    current: int
    visited: set[int]
    n_vertices: int

    @property
    def feasible(self) -> list[int]:
        """Unvisited vertices in ascending order."""
        return [v for v in range(self.n_vertices) if v not in self.visited]


def _scalar_power(w: float, exponent: float) -> float:
    """Same special-casing as the kernels so probabilities match them exactly."""
    if exponent == 1.0:
        return w
    if exponent == 2.0:
        return w * w
    if exponent == 3.0:
        return w * w * w
    return math.pow(w, exponent)


def selection_probabilities(
    state: ConstructionState,
    pheromone: PheromoneMatrix,
    eta: np.ndarray,
    alpha: float,
    beta: float,
) -> tuple[list[int], np.ndarray]:
    """Candidates and their normalized random-proportional-rule probabilities."""
    candidates = state.feasible
    if not candidates:
        raise ValidationError("no feasible vertex to select")
    i = state.current
    w = np.array(
        [_scalar_power(pheromone.tau[i, j], alpha) * _scalar_power(eta[i, j], beta) for j in candidates],
        dtype=np.float64,
    )
    total = w.sum()
    if total > 0.0:
        return candidates, w / total
    return candidates, np.full(len(candidates), 1.0 / len(candidates))


def select_next(
    state: ConstructionState,
    pheromone: PheromoneMatrix,
    eta: np.ndarray,
    alpha: float,
    beta: float,
    g: np.random.Generator,
) -> int:
    """Sample the next vertex by the random proportional rule.

    Consumes exactly one double draw: roulette over the cumulative weights,
    falling back to a uniform pick when every weight is zero.
    """
    candidates = state.feasible
    if not candidates:
        raise ValidationError("no feasible vertex to select")
    i = state.current
    tau_row = pheromone.tau[i]
    eta_row = eta[i]
    total = 0.0
    cum = []
    for j in candidates:
        total += _scalar_power(tau_row[j], alpha) * _scalar_power(eta_row[j], beta)
        cum.append(total)
    u = g.random()
    if total > 0.0:
        r = u * total
        lo, hi = 0, len(candidates)
        while lo < hi:
            mid = (lo + hi) >> 1
            if cum[mid] > r:
                hi = mid
            else:
                lo = mid + 1
        return candidates[min(lo, len(candidates) - 1)]
    return candidates[streams.index_from_uniform(u, len(candidates))]


def construct_solution(
    instance: Instance,
    pheromone: PheromoneMatrix,
    config: MmasConfig,
    g: np.random.Generator,
) -> Solution:
    """Build one full permutation guided by the pheromone matrix."""
    arr = instance.arrays
    n = instance.vertex_count
    if pheromone.tau.shape != (n, n):
        raise ConfigError("pheromone matrix does not match the instance")
    eta_beta = kernels.power_matrix(kernels.eta_matrix(instance), config.beta)
    weights = kernels.combined_weights(pheromone.tau, config.alpha, eta_beta)
    buffers = kernels.ConstructionBuffers(n)
    kernels.construct_full(
        weights, arr.vehicle_ids, g.bit_generator, buffers.order, buffers.cum, buffers.cand
    )
    return Solution(tuple(int(v) for v in buffers.order))


def evaporate(pheromone: PheromoneMatrix, rho: float) -> None:
    """Decay every trail by (1 - rho), clamped below at tau_min."""
    if not 0.0 < rho < 1.0:
        raise ConfigError("rho must lie strictly between 0 and 1")
    pheromone.tau *= 1.0 - rho
    if pheromone.bounded:
        np.maximum(pheromone.tau, pheromone.tau_min, out=pheromone.tau)


def deposit_best(pheromone: PheromoneMatrix, best, best_quality: float) -> None:
    """Reinforce the best solution's edges by 1/quality, symmetric, clamped at tau_max.

    Only consecutive pairs of the permutation receive pheromone; the implicit
    depot-return legs do not. best may be a Solution or a plain index array.
    """
    if best_quality <= 0:
        raise ConfigError("best quality must be positive to deposit")
    delta = 1.0 / best_quality
    tau = pheromone.tau
    order = np.asarray(best.order if isinstance(best, Solution) else best, dtype=np.intp)
    a = order[:-1]
    b = order[1:]
    # consecutive pairs of a permutation are unique, so no duplicate writes
    tau[a, b] = np.minimum(tau[a, b] + delta, pheromone.tau_max)
    tau[b, a] = np.minimum(tau[b, a] + delta, pheromone.tau_max)


@dataclass
class MmasResult:
    """Outcome of one run: the best found schedule plus bookkeeping."""

    best_solution: Solution
    best_evaluation: Evaluation
    trace: list[tuple[float, float, float]] = field(repr=False)
    evaluations: int = 0
    constructions: int = 0
    decisions: int = 0
    rounds: int = 0


def run_mmas(
    instance: Instance,
    config: MmasConfig,
    target: tuple[float, float] | None = None,
    on_round=None,
) -> MmasResult:
    """Run MAX-MIN Ant System for the configured number of construction rounds.

    One round is one construction per ant. A zero-round budget still performs
    the initial round so a best always exists. target=(s, L) stops the run
    early once the best is at least that good. on_round(index, pheromone,
    best_eval) is called after each round's update cycle.
    """
    arr = instance.arrays
    n = instance.vertex_count
    S = instance.total_service_time
    day_start, day_end = instance.workday

    eta_beta = kernels.power_matrix(kernels.eta_matrix(instance), config.beta)
    pheromone = PheromoneMatrix.uniform(n)
    gens = streams.ant_streams(config.seed, config.ants)
    buffers = kernels.ConstructionBuffers(n)

    best_order = np.empty(n, dtype=np.int32)
    best_s = -1.0
    best_L = math.inf
    trace: list[tuple[float, float, float]] = []
    evaluations = 0
    decisions = 0
    rounds = max(config.max_iterations, 1)

    for rnd in range(rounds):
        weights = kernels.combined_weights(pheromone.tau, config.alpha, eta_beta)
        improved = False
        for g in gens:
            decisions += kernels.construct_full(
                weights, arr.vehicle_ids, g.bit_generator, buffers.order, buffers.cum, buffers.cand
            )
            s, L = kernels.evaluate_order(
                buffers.order,
                arr.xs,
                arr.ys,
                arr.duration,
                arr.window_open,
                arr.window_close,
                arr.is_vehicle,
                instance.speed_kph,
                day_start,
                day_end,
                buffers.serviced,
            )
            evaluations += 1
            if s > best_s or (s == best_s and L < best_L):
                best_s = s
                best_L = L
                best_order[:] = buffers.order
                improved = True
        best_C = quality(S, best_s, best_L)
        if improved:
            pheromone.rebound(best_C, config.rho, n)
        evaporate(pheromone, config.rho)
        deposit_best(pheromone, best_order, best_C)
        trace.append((best_s, best_L, best_C))
        if on_round is not None:
            on_round(rnd, pheromone, (best_s, best_L, best_C))
        if target is not None and (
            best_s > target[0] or (best_s == target[0] and best_L <= target[1])
        ):
            break

    best_solution = Solution(tuple(int(v) for v in best_order))
    return MmasResult(
        best_solution=best_solution,
        best_evaluation=evaluate(instance, best_solution),
        trace=trace,
        evaluations=evaluations,
        constructions=evaluations,
        decisions=decisions,
        rounds=len(trace),
    )
