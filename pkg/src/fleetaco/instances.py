"""Instance file format and seeded synthetic generator.

The text format is line oriented and diff friendly:

    # optional comments
    speed_kph 13
    workday 480 1140
    vehicle <id> <x> <y>
    job <id> <x> <y> <duration> [<open> <close>]

Coordinates are kilometres with three decimals; times and durations are
integer minutes since midnight. parse(serialize(instance)) is the identity.
"""

from dataclasses import dataclass

import numpy as np

from fleetaco.model import ConfigError, Instance, Job, Location, Vehicle

MIN_MEAN_DURATION = 10.0
MAX_MEAN_DURATION = 120.0


class ParseError(ValueError):
    """Malformed instance document; message carries the line number."""


@dataclass(frozen=True)
class GeneratorConfig:
    """Shape of a synthetic scheduling problem."""

    vehicles: int
    jobs: int
    total_service_minutes: float
    window_fraction: float = 0.3
    area_km: float = 20.0
    depot_count: int | None = None  # None picks min(4, vehicles)
    seed: int = 0

    def __post_init__(self):
        if self.vehicles < 1:
            raise ConfigError("vehicles must be positive")
        if self.jobs < 0:
            raise ConfigError("jobs must be non-negative")
        if self.area_km <= 0:
            raise ConfigError("area_km must be positive")
        if not 0.0 <= self.window_fraction <= 1.0:
            raise ConfigError("window_fraction must lie in [0, 1]")
        if self.depot_count is not None and self.depot_count < 1:
            raise ConfigError("depot_count must be positive")
        if self.jobs > 0:
            mean = self.total_service_minutes / self.jobs
            if not MIN_MEAN_DURATION <= mean <= MAX_MEAN_DURATION:
                raise ConfigError(
                    f"mean job duration {mean:.1f} min outside "
                    f"[{MIN_MEAN_DURATION:.0f}, {MAX_MEAN_DURATION:.0f}]"
                )


def _quantize(value: float) -> float:
    """Snap to the 3-decimal grid the file format can represent."""
    return round(float(value), 3)


def generate(config: GeneratorConfig) -> Instance:
    """Deterministic synthetic instance matching the configured shape.

    Job locations cluster around 3 to 6 district centers inside the square;
    durations are drawn then rescaled so their sum lands on the target; a
    configured fraction of jobs get a 2 to 6 hour window inside the workday.
    """
    rng = np.random.default_rng(config.seed)
    a = config.area_km
    day_start, day_end = 480, 1140

    depot_count = config.depot_count or min(4, config.vehicles)
    depot_count = min(depot_count, config.vehicles)
    depots = [
        Location(_quantize(rng.uniform(0.2 * a, 0.8 * a)), _quantize(rng.uniform(0.2 * a, 0.8 * a)))
        for _ in range(depot_count)
    ]
    vehicles = tuple(Vehicle(i, depots[i % depot_count]) for i in range(config.vehicles))

    n = config.jobs
    if n == 0:
        return Instance(vehicles, ())

    n_centers = int(rng.integers(3, 7))
    centers = rng.uniform(0.15 * a, 0.85 * a, size=(n_centers, 2))
    sigma = a / 12.0
    which = rng.integers(0, n_centers, size=n)
    points = centers[which] + rng.normal(0.0, sigma, size=(n, 2))
    points = np.clip(points, 0.0, a)

    mean = config.total_service_minutes / n
    raw = rng.uniform(0.5 * mean, 1.5 * mean, size=n)
    scaled = raw * (config.total_service_minutes / raw.sum())
    durations = np.maximum(1, np.rint(scaled).astype(int))

    windowed = rng.random(n) < config.window_fraction
    jobs = []
    for i in range(n):
        window = None
        if windowed[i]:
            width = int(rng.integers(120, 361))
            width = max(width, int(durations[i]) + 1)
            open_ = int(rng.integers(day_start, day_end - width + 1))
            window = (float(open_), float(open_ + width))
        jobs.append(
            Job(
                id=config.vehicles + i,
                location=Location(_quantize(points[i, 0]), _quantize(points[i, 1])),
                duration=float(durations[i]),
                window=window,
            )
        )
    return Instance(vehicles, tuple(jobs), speed_kph=13.0, workday=(float(day_start), float(day_end)))


def serialize(instance: Instance) -> str:
    """Canonical text form of an instance."""
    lines = []
    lines.append(f"speed_kph {instance.speed_kph:g}")
    lines.append(f"workday {int(instance.workday[0])} {int(instance.workday[1])}")
    for v in sorted(instance.vehicles, key=lambda v: v.id):
        lines.append(f"vehicle {v.id} {v.depot.x:.3f} {v.depot.y:.3f}")
    for j in sorted(instance.jobs, key=lambda j: j.id):
        line = f"job {j.id} {j.location.x:.3f} {j.location.y:.3f} {int(j.duration)}"
        if j.window is not None:
            line += f" {int(j.window[0])} {int(j.window[1])}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _parse_float(token: str, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"line {lineno}: {what} is not a number: {token!r}") from None


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"line {lineno}: {what} is not an integer: {token!r}") from None


def parse(text: str) -> Instance:
    """Parse the text format; errors carry line numbers and the offending id."""
    speed = None
    workday = None
    vehicles: list[Vehicle] = []
    jobs: list[Job] = []
    seen_ids: dict[int, int] = {}

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "speed_kph":
            if len(fields) != 2:
                raise ParseError(f"line {lineno}: speed_kph takes one value")
            speed = _parse_float(fields[1], lineno, "speed")
        elif kind == "workday":
            if len(fields) != 3:
                raise ParseError(f"line {lineno}: workday takes start and end")
            workday = (
                float(_parse_int(fields[1], lineno, "workday start")),
                float(_parse_int(fields[2], lineno, "workday end")),
            )
        elif kind == "vehicle":
            if len(fields) != 4:
                raise ParseError(f"line {lineno}: vehicle takes id x y")
            vid = _parse_int(fields[1], lineno, "vehicle id")
            if vid in seen_ids:
                raise ParseError(f"line {lineno}: duplicate id {vid} (first on line {seen_ids[vid]})")
            seen_ids[vid] = lineno
            x = _parse_float(fields[2], lineno, "x")
            y = _parse_float(fields[3], lineno, "y")
            vehicles.append(Vehicle(vid, Location(x, y)))
        elif kind == "job":
            if len(fields) not in (5, 7):
                raise ParseError(f"line {lineno}: job takes id x y duration [open close]")
            jid = _parse_int(fields[1], lineno, "job id")
            if jid in seen_ids:
                raise ParseError(f"line {lineno}: duplicate id {jid} (first on line {seen_ids[jid]})")
            seen_ids[jid] = lineno
            x = _parse_float(fields[2], lineno, "x")
            y = _parse_float(fields[3], lineno, "y")
            duration = _parse_int(fields[4], lineno, "duration")
            window = None
            if len(fields) == 7:
                open_ = _parse_int(fields[5], lineno, "window open")
                close = _parse_int(fields[6], lineno, "window close")
                if close <= open_:
                    raise ParseError(f"line {lineno}: job {jid} window close must exceed open")
                window = (float(open_), float(close))
            try:
                jobs.append(Job(jid, Location(x, y), float(duration), window))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
        else:
            raise ParseError(f"line {lineno}: unknown record {kind!r}")

    if speed is None:
        raise ParseError("missing speed_kph header")
    if workday is None:
        raise ParseError("missing workday header")
    try:
        return Instance(tuple(vehicles), tuple(jobs), speed_kph=speed, workday=workday)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
