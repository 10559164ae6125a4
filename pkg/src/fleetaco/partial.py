"""Partial ant colony optimization with solution-part preservation.

Instead of a trail matrix, a population of ants each remembers its best found
solution. A construction copies a preserved part of the ant's own memory and
rebuilds only the remainder, with edge pheromone reconstructed on demand from
the population. Two preservation schemes exist: one contiguous (circularly
wrapped) segment, or whole vehicle-route blocks. A modification limit caps the
rebuilt fraction; a small escape probability lifts the cap for one construction
to dodge local optima.
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
    evaluate,
    quality,
)

SEGMENT = "segment"
BLOCKS = "blocks"


@dataclass(frozen=True)
class AntMemory:
    """One ant's best found solution so far."""

    l_best: Solution
    l_best_eval: Evaluation


@dataclass
class Population:
    """All ant memories plus the index of the globally best one."""

    memories: list[AntMemory]
    g_best: int

    def best(self) -> AntMemory:
        return self.memories[self.g_best]


@dataclass(frozen=True)
class PartialConfig:
    """Partial-ACO parameters."""

    ants: int = 32
    max_iterations: int = 1000
    alpha: float = 3.0
    beta: float = 1.0
    base_pheromone: float = 0.1
    modification_limit: float = 1.0
    escape_probability: float = 0.001
    preservation_mode: str = SEGMENT
    seed: int = 0

    def __post_init__(self):
        if self.ants < 1:
            raise ConfigError("ants must be at least 1")
        if not 0.0 < self.modification_limit <= 1.0:
            raise ConfigError("modification_limit must lie in (0, 1]")
        if not 0.0 <= self.escape_probability <= 1.0:
            raise ConfigError("escape_probability must lie in [0, 1]")
        if self.preservation_mode not in (SEGMENT, BLOCKS):
            raise ConfigError(f"preservation_mode must be {SEGMENT!r} or {BLOCKS!r}")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("alpha and beta must be non-negative")
        if self.base_pheromone <= 0:
            raise ConfigError("base_pheromone must be positive")
        if self.max_iterations < 0:
            raise ConfigError("max_iterations must be non-negative")


@dataclass(frozen=True)
class PreservationPlan:
    """Which positions of a parent solution survive into the child."""

    parent: np.ndarray  # int32 vertex order the preserved content comes from
    preserved: np.ndarray  # uint8 mask over positions
    free_count: int
    # block plans open every freed span with a vehicle so freed jobs can only
    # join freed vehicles' routes; segment plans rebuild unconstrained
    route_starts: bool = False

    def free_positions(self) -> np.ndarray:
        return np.flatnonzero(self.preserved == 0)


def _segment_mask(
    n: int, modification_limit: float, g: np.random.Generator, out: "np.ndarray | None" = None
) -> tuple[np.ndarray, int]:
    """Mask preserving one circular run: uniform start, uniform permitted length."""
    if out is None:
        mask = np.zeros(n, dtype=np.uint8)
    else:
        mask = out
        mask.fill(0)
    start = streams.uniform_index(g, n)
    shortest = math.ceil((1.0 - modification_limit) * n)
    length = streams.uniform_int_inclusive(g, shortest, n)
    end = start + length
    if end <= n:
        mask[start:end] = 1
    else:
        mask[start:] = 1
        mask[: end - n] = 1
    return mask, n - length


def _route_blocks(is_vehicle: np.ndarray, order: np.ndarray) -> list[tuple[int, int]]:
    """(start, end) position spans of each vehicle's block in the order."""
    starts = np.flatnonzero(is_vehicle[order])
    ends = np.append(starts[1:], order.shape[0])
    return list(zip(starts.tolist(), ends.tolist()))


def _blocks_mask_into(
    blocks: list[tuple[int, int]], budget: int, g: np.random.Generator, mask: np.ndarray
) -> int:
    """Free whole route blocks in permuted order while they fit the budget.

    Blocks that no longer fit the remaining budget stay preserved; the walk
    continues with the next one. Returns the number of freed positions.
    """
    mask.fill(1)
    freed = 0
    for k in g.permutation(len(blocks)).tolist():
        lo, hi = blocks[k]
        size = hi - lo
        if freed + size > budget:
            continue
        mask[lo:hi] = 0
        freed += size
    return freed


def _blocks_mask(
    is_vehicle: np.ndarray, order: np.ndarray, modification_limit: float, g: np.random.Generator
) -> tuple[np.ndarray, int]:
    """Mask freeing whole vehicle-route blocks within floor(limit * n) positions."""
    n = order.shape[0]
    mask = np.empty(n, dtype=np.uint8)
    freed = _blocks_mask_into(
        _route_blocks(is_vehicle, order), int(modification_limit * n), g, mask
    )
    return mask, freed


def _route_spans_into(
    is_vehicle: np.ndarray, order: np.ndarray, starts_out: np.ndarray, ends_out: np.ndarray
) -> None:
    """Write each vehicle block's (start, end) span in the order into the buffers."""
    starts_out[:] = np.flatnonzero(is_vehicle[order])
    ends_out[:-1] = starts_out[1:]
    ends_out[-1] = order.shape[0]


def plan_segment(l_best: Solution, modification_limit: float, g: np.random.Generator) -> PreservationPlan:
    """Preserve one contiguous run of positions, wrapping past the end.

    The start is uniform over positions; the preserved length is uniform over
    [ceil((1 - limit) * n), n], so at most floor(limit * n) positions are
    rebuilt.
    """
    parent = np.asarray(l_best.order, dtype=np.int32)
    mask, free = _segment_mask(len(parent), modification_limit, g)
    return PreservationPlan(parent=parent, preserved=mask, free_count=free)


def plan_blocks(
    instance: Instance, l_best: Solution, modification_limit: float, g: np.random.Generator
) -> PreservationPlan:
    """Preserve whole vehicle routes; free a random subset within the limit."""
    parent = np.asarray(l_best.order, dtype=np.int32)
    mask, free = _blocks_mask(instance.arrays.is_vehicle, parent, modification_limit, g)
    return PreservationPlan(parent=parent, preserved=mask, free_count=free, route_starts=True)


def _succ_row(order: np.ndarray, out: np.ndarray) -> None:
    """out[v] = successor of v in order, -1 for the final vertex."""
    out[:] = -1
    out[order[:-1]] = order[1:]


def reconstruct_weights(
    population: Population,
    from_vertex: int,
    candidates: list[int],
    base_pheromone: float = 0.1,
) -> np.ndarray:
    """Pheromone levels rebuilt from population edge usage.

    weight(j) = base + sum over members whose solution walks (from_vertex, j)
    of C_gbest / C_member. The best member contributes exactly 1.
    """
    best_c = population.best().l_best_eval.quality
    weights = np.full(len(candidates), float(base_pheromone))
    index = {c: k for k, c in enumerate(candidates)}
    for memory in population.memories:
        order = memory.l_best.order
        for a, b in zip(order, order[1:]):
            if a == from_vertex:
                k = index.get(b)
                if k is not None:
                    weights[k] += best_c / memory.l_best_eval.quality
                break  # from_vertex occurs once; at most one outgoing edge
    return weights


def partial_construct(
    instance: Instance,
    plan: PreservationPlan,
    population: Population,
    config: PartialConfig,
    g: np.random.Generator,
) -> Solution:
    """Copy the plan's preserved positions and rebuild the rest probabilistically."""
    arr = instance.arrays
    n = instance.vertex_count
    if plan.parent.shape[0] != n or plan.preserved.shape[0] != n:
        raise ConfigError("plan does not match the instance")

    n_pop = len(population.memories)
    succ = np.empty((n_pop, n), dtype=np.int32)
    ratios = np.empty(n_pop)
    best_c = population.best().l_best_eval.quality
    for q, memory in enumerate(population.memories):
        _succ_row(np.asarray(memory.l_best.order, dtype=np.int32), succ[q])
        ratios[q] = best_c / memory.l_best_eval.quality

    eta_beta = kernels.power_matrix(kernels.eta_matrix(instance), config.beta)
    buffers = kernels.ConstructionBuffers(n)
    kernels.construct_partial(
        plan.parent,
        plan.preserved,
        succ,
        ratios,
        config.base_pheromone,
        config.alpha,
        eta_beta,
        arr.is_vehicle,
        g.bit_generator,
        buffers.order,
        buffers.pool,
        buffers.pool_pos,
        buffers.contrib,
        buffers.touched,
        buffers.cum,
        int(plan.route_starts),
    )
    return Solution(tuple(int(v) for v in buffers.order))


@dataclass
class PartialResult:
    """Outcome of one run: the population's best schedule plus bookkeeping."""

    best_solution: Solution
    best_evaluation: Evaluation
    trace: list[tuple[float, float, float]] = field(repr=False, default_factory=list)
    evaluations: int = 0
    constructions_init: int = 0
    constructions_limited: int = 0
    constructions_escape: int = 0
    decisions: int = 0
    decisions_limited: int = 0
    max_decisions_limited: int = 0
    iterations: int = 0


def run_partial(
    instance: Instance,
    config: PartialConfig,
    target: tuple[float, float] | None = None,
    on_iteration=None,
) -> PartialResult:
    """Run Partial-ACO in steady state for the configured iteration count.

    Every ant first builds a full solution to seed its memory. Each iteration
    then gives every ant one partial construction from its own memory; the ant
    replaces that memory only on strict improvement. target=(s, L) stops the
    run early once the global best is at least that good. on_iteration(index,
    memory_evals, g_best_index) is called after every iteration with the
    per-memory (s, L) list.
    """
    arr = instance.arrays
    n = instance.vertex_count
    S = instance.total_service_time
    day_start, day_end = instance.workday
    m = config.ants
    is_vehicle = arr.is_vehicle
    blocks_mode = config.preservation_mode == BLOCKS

    eta_beta = kernels.power_matrix(kernels.eta_matrix(instance), config.beta)
    gens = streams.ant_streams(config.seed, m)
    buffers = kernels.ConstructionBuffers(n)

    orders = np.tile(np.arange(n, dtype=np.int32), (m, 1))
    succ = np.full((m, n), -1, dtype=np.int32)
    # python lists for the hot-loop scalar compares; quality stays a numpy
    # array because the ratio rebuild divides across the whole population
    evals_s = [0.0] * m
    evals_l = [0.0] * m
    evals_c = np.empty(m)
    ratios = np.zeros(m)
    mask = np.empty(n, dtype=np.uint8)
    if blocks_mode:
        # per-memory route spans, rebuilt on replacement
        p_veh = int(is_vehicle.sum())
        starts2d = np.empty((m, p_veh), dtype=np.int32)
        ends2d = np.empty((m, p_veh), dtype=np.int32)
        perm_buf = np.empty(p_veh, dtype=np.int32)
        budget_limited = int(config.modification_limit * n)

    def evaluate_buffer(order) -> tuple[float, float]:
        return kernels.evaluate_order(
            order,
            arr.xs,
            arr.ys,
            arr.duration,
            arr.window_open,
            arr.window_close,
            is_vehicle,
            instance.speed_kph,
            day_start,
            day_end,
            buffers.serviced,
        )

    result = PartialResult(best_solution=Solution((0,)), best_evaluation=None)
    all_free = np.zeros(n, dtype=np.uint8)

    # seed every memory with one full construction against an empty population
    for q in range(m):
        n_sel = kernels.construct_partial(
            orders[q],
            all_free,
            succ[:0],
            ratios[:0],
            config.base_pheromone,
            config.alpha,
            eta_beta,
            is_vehicle,
            gens[q].bit_generator,
            buffers.order,
            buffers.pool,
            buffers.pool_pos,
            buffers.contrib,
            buffers.touched,
            buffers.cum,
        )
        orders[q] = buffers.order
        s, L = evaluate_buffer(orders[q])
        evals_s[q] = s
        evals_l[q] = L
        evals_c[q] = quality(S, s, L)
        _succ_row(orders[q], succ[q])
        if blocks_mode:
            _route_spans_into(is_vehicle, orders[q], starts2d[q], ends2d[q])
        result.evaluations += 1
        result.constructions_init += 1
        result.decisions += n_sel

    g_best = 0
    for q in range(1, m):
        if evals_s[q] > evals_s[g_best] or (
            evals_s[q] == evals_s[g_best] and evals_l[q] < evals_l[g_best]
        ):
            g_best = q
    np.divide(evals_c[g_best], evals_c, out=ratios)

    trace = result.trace
    trace.append((evals_s[g_best], evals_l[g_best], float(evals_c[g_best])))

    def reached_target() -> bool:
        return target is not None and (
            evals_s[g_best] > target[0]
            or (evals_s[g_best] == target[0] and evals_l[g_best] <= target[1])
        )

    iteration = 0
    done = reached_target()
    evaluations = constructions_limited = constructions_escape = 0
    decisions = decisions_limited = max_decisions_limited = 0
    construct = kernels.construct_partial
    construct_blocks = kernels.construct_blocks
    escape_p = config.escape_probability
    mod_limit = config.modification_limit
    while iteration < config.max_iterations and not done:
        for q in range(m):
            g = gens[q]
            escape = g.random() < escape_p
            if blocks_mode:
                # the permutation is drawn here so both backends share one stream
                perm_buf[:] = g.permutation(p_veh)
                n_sel = construct_blocks(
                    orders[q],
                    starts2d[q],
                    ends2d[q],
                    perm_buf,
                    n if escape else budget_limited,
                    mask,
                    succ,
                    ratios,
                    config.base_pheromone,
                    config.alpha,
                    eta_beta,
                    is_vehicle,
                    g.bit_generator,
                    buffers.order,
                    buffers.pool,
                    buffers.pool_pos,
                    buffers.contrib,
                    buffers.touched,
                    buffers.cum,
                )
            else:
                _segment_mask(n, 1.0 if escape else mod_limit, g, out=mask)
                n_sel = construct(
                    orders[q],
                    mask,
                    succ,
                    ratios,
                    config.base_pheromone,
                    config.alpha,
                    eta_beta,
                    is_vehicle,
                    g.bit_generator,
                    buffers.order,
                    buffers.pool,
                    buffers.pool_pos,
                    buffers.contrib,
                    buffers.touched,
                    buffers.cum,
                )
            s, L = evaluate_buffer(buffers.order)
            evaluations += 1
            decisions += n_sel
            if escape:
                constructions_escape += 1
            else:
                constructions_limited += 1
                decisions_limited += n_sel
                if n_sel > max_decisions_limited:
                    max_decisions_limited = n_sel
            if s > evals_s[q] or (s == evals_s[q] and L < evals_l[q]):
                orders[q] = buffers.order
                evals_s[q] = s
                evals_l[q] = L
                evals_c[q] = quality(S, s, L)
                _succ_row(orders[q], succ[q])
                if blocks_mode:
                    _route_spans_into(is_vehicle, orders[q], starts2d[q], ends2d[q])
                # ratios depend on the changed quality; a new global best
                # shifts the numerator for everyone
                if q == g_best or s > evals_s[g_best] or (
                    s == evals_s[g_best] and L < evals_l[g_best]
                ):
                    g_best = q
                    np.divide(evals_c[g_best], evals_c, out=ratios)
                else:
                    ratios[q] = evals_c[g_best] / evals_c[q]
        iteration += 1
        trace.append((evals_s[g_best], evals_l[g_best], float(evals_c[g_best])))
        if on_iteration is not None:
            on_iteration(iteration, list(zip(evals_s, evals_l)), g_best)
        done = reached_target()

    result.evaluations += evaluations
    result.constructions_limited = constructions_limited
    result.constructions_escape = constructions_escape
    result.decisions += decisions
    result.decisions_limited = decisions_limited
    result.max_decisions_limited = max_decisions_limited
    result.best_solution = Solution(tuple(int(v) for v in orders[g_best]))
    result.best_evaluation = evaluate(instance, result.best_solution)
    result.iterations = iteration
    return result
