"""Company-style comparator schedule: geographic clustering, furthest-first routes.

Mimics a dispatcher's manual heuristic: group jobs by geography into one
cluster per vehicle (balanced by service time), send each vehicle to its
furthest job first and work back toward the depot, then nudge jobs whose
windows are violated. Deterministic for a fixed instance.
"""

import math
from dataclasses import dataclass

import numpy as np

from fleetaco.model import Evaluation, Instance, Job, Solution, Vehicle, evaluate

_KMEANS_SEED = 902351  # fixed: the schedule must be a pure function of the instance
_BALANCE_TOLERANCE = 0.2
_MAX_BALANCE_MOVES = 200


@dataclass(frozen=True)
class BaselineSchedule:
    """The comparator solution and its evaluation."""

    solution: Solution
    evaluation: Evaluation


def _distance(ax, ay, bx, by):
    dx = ax - bx
    dy = ay - by
    return math.sqrt(dx * dx + dy * dy)


def _kmeans(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Plain Lloyd iterations; returns a cluster label per point."""
    n = len(points)
    centroids = points[rng.choice(n, size=min(k, n), replace=False)].copy()
    if len(centroids) < k:  # more clusters than points: pad with copies
        pad = points[rng.choice(n, size=k - len(centroids))]
        centroids = np.vstack([centroids, pad])
    labels = np.zeros(n, dtype=int)
    for it in range(50):
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        if it > 0 and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            mask = labels == c
            if mask.any():
                centroids[c] = points[mask].mean(axis=0)
    return labels


def _balance_by_service_time(labels: np.ndarray, jobs: list[Job], points: np.ndarray, k: int) -> None:
    """Move jobs from overloaded to underloaded clusters, best effort, in place."""
    target = sum(j.duration for j in jobs) / k
    if target <= 0:
        return
    loads = np.zeros(k)
    for i, j in enumerate(jobs):
        loads[labels[i]] += j.duration
    centroids = np.zeros((k, 2))
    for c in range(k):
        mask = labels == c
        if mask.any():
            centroids[c] = points[mask].mean(axis=0)
    hi_cap = (1.0 + _BALANCE_TOLERANCE) * target
    lo_cap = (1.0 - _BALANCE_TOLERANCE) * target
    for _ in range(_MAX_BALANCE_MOVES):
        donor = int(loads.argmax())
        if loads[donor] <= hi_cap:
            break
        receivers = [c for c in range(k) if loads[c] < lo_cap]
        if not receivers:
            break
        members = [i for i in range(len(jobs)) if labels[i] == donor]
        best = None
        for i in members:
            for c in receivers:
                if loads[donor] - jobs[i].duration < lo_cap:
                    continue
                d = _distance(points[i, 0], points[i, 1], centroids[c, 0], centroids[c, 1])
                if best is None or d < best[0]:
                    best = (d, i, c)
        if best is None:
            break
        _, i, c = best
        loads[donor] -= jobs[i].duration
        loads[c] += jobs[i].duration
        labels[i] = c


def _assign_clusters_to_vehicles(
    vehicles: tuple[Vehicle, ...], labels: np.ndarray, points: np.ndarray, k: int
) -> list[int]:
    """Greedy nearest pairing of cluster centroids to vehicle depots; returns cluster per vehicle."""
    centroids = []
    for c in range(k):
        mask = labels == c
        if mask.any():
            centroids.append(points[mask].mean(axis=0))
        else:
            centroids.append(np.array([math.inf, math.inf]))  # empty cluster pairs last
    unassigned = set(range(k))
    assignment = []
    for v in vehicles:
        best_c = min(
            unassigned,
            key=lambda c: (
                _distance(v.depot.x, v.depot.y, centroids[c][0], centroids[c][1])
                if math.isfinite(centroids[c][0])
                else math.inf,
                c,
            ),
        )
        unassigned.remove(best_c)
        assignment.append(best_c)
    return assignment


def order_route_furthest_first(depot, jobs: list[Job]) -> list[Job]:
    """Jobs sorted by descending distance from the depot (ties by id)."""
    return sorted(
        jobs,
        key=lambda j: (-_distance(j.location.x, j.location.y, depot.x, depot.y), j.id),
    )


def _route_serviced_count(instance: Instance, vehicle: Vehicle, route: list[Job]) -> int:
    """Serviced jobs when this vehicle runs this route alone (routes are independent)."""
    day_start, day_end = instance.workday
    speed = instance.speed_kph
    t = day_start
    cx, cy = vehicle.depot.x, vehicle.depot.y
    count = 0
    for job in route:
        leg = _distance(job.location.x, job.location.y, cx, cy) / speed * 60.0
        start = t + leg
        if job.window is not None and start < job.window[0]:
            start = job.window[0]
        finish = start + job.duration
        back = _distance(job.location.x, job.location.y, vehicle.depot.x, vehicle.depot.y) / speed * 60.0
        ok = finish <= day_end and finish + back <= day_end
        if ok and job.window is not None:
            ok = finish <= job.window[1]
        if ok:
            t = finish
            cx, cy = job.location.x, job.location.y
            count += 1
    return count


def _repair_windows(instance: Instance, vehicle: Vehicle, route: list[Job]) -> list[Job]:
    """Bubble window-violating jobs to the first position that strictly helps."""
    route = list(route)
    improved = True
    while improved:
        improved = False
        base = _route_serviced_count(instance, vehicle, route)
        if base == len(route):
            break
        for idx, job in enumerate(route):
            if job.window is None:
                continue
            positions = list(range(idx - 1, -1, -1)) + list(range(idx + 1, len(route)))
            for pos in positions:
                candidate = route[:idx] + route[idx + 1 :]
                candidate.insert(pos, job)
                if _route_serviced_count(instance, vehicle, candidate) > base:
                    route = candidate
                    improved = True
                    break
            if improved:
                break
    return route


def company_schedule(instance: Instance) -> BaselineSchedule:
    """Deterministic comparator schedule for an instance."""
    vehicles = sorted(instance.vehicles, key=lambda v: v.id)
    jobs = sorted(instance.jobs, key=lambda j: j.id)
    k = len(vehicles)
    routes: dict[int, list[Job]] = {v.id: [] for v in vehicles}

    if jobs:
        points = np.array([[j.location.x, j.location.y] for j in jobs])
        rng = np.random.default_rng(_KMEANS_SEED)
        labels = _kmeans(points, k, rng)
        _balance_by_service_time(labels, jobs, points, k)
        cluster_of_vehicle = _assign_clusters_to_vehicles(tuple(vehicles), labels, points, k)
        for vi, v in enumerate(vehicles):
            members = [jobs[i] for i in range(len(jobs)) if labels[i] == cluster_of_vehicle[vi]]
            ordered = order_route_furthest_first(v.depot, members)
            routes[v.id] = _repair_windows(instance, v, ordered)

    order: list[int] = []
    for v in vehicles:
        order.append(v.id)
        order.extend(j.id for j in routes[v.id])
    solution = Solution(tuple(order))
    return BaselineSchedule(solution, evaluate(instance, solution))
