"""Problem data model: instances, solutions, the schedule simulator and objective.

A solution is one permutation of every vehicle and job vertex, starting with a
vehicle. Each vehicle vertex opens a route that runs until the next vehicle
vertex; evaluating a solution simulates all routes against the workday and the
job time windows.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration or parameters."""


class ValidationError(ValueError):
    """Structurally invalid instance or solution data."""


@dataclass(frozen=True)
class Location:
    """Planar position in kilometres."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"non-finite location ({self.x}, {self.y})")


@dataclass(frozen=True)
class Job:
    """A maintenance job: location, service duration, optional time window."""

    id: int
    location: Location
    duration: float
    window: tuple[float, float] | None = None

    def __post_init__(self):
        if self.duration <= 0:
            raise ValidationError(f"job {self.id}: duration must be positive")
        if self.window is not None:
            open_, close = self.window
            if not open_ < close:
                raise ValidationError(f"job {self.id}: window close must exceed open")


@dataclass(frozen=True)
class Vehicle:
    """A vehicle and the depot it starts from and returns to."""

    id: int
    depot: Location


@dataclass(frozen=True)
class Instance:
    """A complete scheduling problem over one workday."""

    vehicles: tuple[Vehicle, ...]
    jobs: tuple[Job, ...]
    speed_kph: float = 13.0
    workday: tuple[float, float] = (480.0, 1140.0)

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if not self.vehicles:
            raise ValidationError("instance needs at least one vehicle")
        if self.speed_kph <= 0:
            raise ConfigError("speed_kph must be positive")
        start, end = self.workday
        if not start < end:
            raise ValidationError("workday end must exceed its start")
        ids = [v.id for v in self.vehicles] + [j.id for j in self.jobs]
        n = len(ids)
        if sorted(ids) != list(range(n)):
            raise ValidationError("vehicle and job ids must be dense 0..V-1 and disjoint")
        for job in self.jobs:
            if job.window is not None:
                if job.window[0] < start or job.window[1] > end:
                    raise ValidationError(f"job {job.id}: window outside the workday")

    @property
    def total_service_time(self) -> float:
        """Sum of all job durations (the serviced-time ceiling S)."""
        return float(sum(j.duration for j in self.jobs))

    @property
    def vertex_count(self) -> int:
        return len(self.vehicles) + len(self.jobs)

    @cached_property
    def arrays(self) -> "InstanceArrays":
        """Flat numpy views of the instance, indexed by vertex id."""
        n = self.vertex_count
        xs = np.empty(n)
        ys = np.empty(n)
        dur = np.zeros(n)
        # sentinels make windowless jobs unconstrained in the simulator
        wopen = np.full(n, -1e18)
        wclose = np.full(n, 1e18)
        is_vehicle = np.zeros(n, dtype=np.uint8)
        for v in self.vehicles:
            xs[v.id] = v.depot.x
            ys[v.id] = v.depot.y
            is_vehicle[v.id] = 1
        for j in self.jobs:
            xs[j.id] = j.location.x
            ys[j.id] = j.location.y
            dur[j.id] = j.duration
            if j.window is not None:
                wopen[j.id] = j.window[0]
                wclose[j.id] = j.window[1]
        vehicle_ids = np.array(sorted(v.id for v in self.vehicles), dtype=np.int32)
        return InstanceArrays(xs, ys, dur, wopen, wclose, is_vehicle, vehicle_ids)


@dataclass(frozen=True)
class InstanceArrays:
    """Vertex-indexed arrays used by the solver kernels."""

    xs: np.ndarray
    ys: np.ndarray
    duration: np.ndarray
    window_open: np.ndarray
    window_close: np.ndarray
    is_vehicle: np.ndarray
    vehicle_ids: np.ndarray


@dataclass(frozen=True)
class Solution:
    """A permutation of all vertex ids beginning with a vehicle vertex."""

    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))


@dataclass(frozen=True)
class RouteSummary:
    """Per-vehicle outcome of a simulated schedule."""

    vehicle_id: int
    jobs_attempted: int
    jobs_serviced: int
    return_time: float


@dataclass(frozen=True)
class Evaluation:
    """Simulated outcome: serviced time s, traversal time L, quality C."""

    serviced_time: float
    traversal_time: float
    quality: float
    routes: tuple[RouteSummary, ...] = field(repr=False, default=())
    unserviced: tuple[int, ...] = field(repr=False, default=())


def quality(total_service: float, serviced: float, traversal: float) -> float:
    """Scalar quality C = (S - s + 1) * L; lower is better once s is tied."""
    return (total_service - serviced + 1.0) * traversal


def travel_time(a: Location, b: Location, speed_kph: float) -> float:
    """Minutes to travel between two locations at the given speed."""
    if speed_kph <= 0:
        raise ConfigError("speed_kph must be positive")
    dx = a.x - b.x
    dy = a.y - b.y
    return math.sqrt(dx * dx + dy * dy) / speed_kph * 60.0


def validate_solution(instance: Instance, solution: Solution) -> None:
    """Raise ValidationError unless the order is a full permutation starting with a vehicle."""
    order = solution.order
    n = instance.vertex_count
    seen = set(order)
    if len(order) != n or seen != set(range(n)):
        missing = sorted(set(range(n)) - seen)
        extra = sorted(v for v in seen if v >= n or v < 0)
        dupes = sorted({v for v in order if order.count(v) > 1}) if len(order) != len(seen) else []
        raise ValidationError(
            f"order is not a permutation of 0..{n - 1}: "
            f"missing={missing} out_of_range={extra} duplicated={dupes}"
        )
    if not instance.arrays.is_vehicle[order[0]]:
        raise ValidationError(f"order must start with a vehicle vertex, got {order[0]}")


def decode_routes(instance: Instance, solution: Solution) -> list[tuple[int, list[int]]]:
    """Split a solution into (vehicle id, ordered job ids) routes."""
    validate_solution(instance, solution)
    is_vehicle = instance.arrays.is_vehicle
    routes: list[tuple[int, list[int]]] = []
    for v in solution.order:
        if is_vehicle[v]:
            routes.append((v, []))
        else:
            routes[-1][1].append(v)
    return routes


def evaluate(instance: Instance, solution: Solution) -> Evaluation:
    """Simulate the schedule and score it.

    Each route starts at its depot at workday start. Arriving before a job's
    window opens means waiting. A job is serviced only if service finishes
    inside its window (when present) and the workday, and the return leg to
    the depot would still arrive inside the workday. Unserviceable jobs are
    skipped without incurring travel and their duration is lost from s.
    """
    arr = instance.arrays
    routes = decode_routes(instance, solution)
    day_start, day_end = instance.workday
    speed = instance.speed_kph
    xs, ys = arr.xs, arr.ys

    total = instance.total_service_time
    serviced = 0.0
    traversal = 0.0
    summaries = []
    unserviced: list[int] = []
    for vid, jids in routes:
        t = float(day_start)
        cx, cy = xs[vid], ys[vid]
        count = 0
        for jid in jids:
            dx = xs[jid] - cx
            dy = ys[jid] - cy
            leg = math.sqrt(dx * dx + dy * dy) / speed * 60.0
            start = t + leg
            if start < arr.window_open[jid]:
                start = arr.window_open[jid]
            finish = start + arr.duration[jid]
            bx = xs[jid] - xs[vid]
            by = ys[jid] - ys[vid]
            back = math.sqrt(bx * bx + by * by) / speed * 60.0
            if finish <= arr.window_close[jid] and finish <= day_end and finish + back <= day_end:
                traversal += leg
                serviced += arr.duration[jid]
                t = finish
                cx, cy = xs[jid], ys[jid]
                count += 1
            else:
                unserviced.append(jid)
        dx = xs[vid] - cx
        dy = ys[vid] - cy
        back = math.sqrt(dx * dx + dy * dy) / speed * 60.0
        traversal += back
        summaries.append(RouteSummary(vid, len(jids), count, float(t + back)))
    serviced = float(serviced)
    traversal = float(traversal)
    return Evaluation(
        serviced_time=serviced,
        traversal_time=traversal,
        quality=quality(total, serviced, traversal),
        routes=tuple(summaries),
        unserviced=tuple(unserviced),
    )


def compare(a: Evaluation, b: Evaluation) -> int:
    """Negative when a is better: more serviced time wins, then lower traversal."""
    if a.serviced_time != b.serviced_time:
        return -1 if a.serviced_time > b.serviced_time else 1
    if a.traversal_time != b.traversal_time:
        return -1 if a.traversal_time < b.traversal_time else 1
    return 0


def is_better(a: Evaluation, b: Evaluation) -> bool:
    """True when a strictly beats b under the hierarchical objective."""
    return compare(a, b) < 0
