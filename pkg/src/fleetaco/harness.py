"""Multi-seed benchmark campaigns: seeded runs, statistics and report emission.

A campaign runs one solver many times with consecutive seeds against a fixed
instance, compares every run to the deterministic company-style baseline, and
persists per-run rows before aggregating. CSV artifacts exclude wall-clock
timings so repeated runs with the same seed are byte-identical; the table
format carries the timings for human reading.
"""

import csv
import io
import statistics
import time
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

from fleetaco import baseline, instances
from fleetaco.colony import MmasConfig, run_mmas
from fleetaco.model import ConfigError, Instance
from fleetaco.partial import BLOCKS, SEGMENT, PartialConfig, run_partial

MMAS = "mmas"
PARTIAL_SEGMENT = "partial-segment"
PARTIAL_BLOCKS = "partial-blocks"
ALGORITHMS = (MMAS, PARTIAL_SEGMENT, PARTIAL_BLOCKS)

DEFAULT_SWEEP_LIMITS = (1.0, 0.5, 0.4, 0.3, 0.2, 0.1)

# wall_seconds stays out of CSV artifacts; see render_csv
CSV_FIELDS = (
    "run",
    "seed",
    "serviced_percent",
    "traversal",
    "reduction_percent",
    "decisions",
    "decisions_limited",
    "constructions_limited",
    "max_decisions_limited",
    "evaluations",
)


@dataclass(frozen=True)
class ExperimentPlan:
    """One benchmark campaign: instance source, algorithm, budget and run count."""

    source: "str | instances.GeneratorConfig"
    algorithm: str
    config: "MmasConfig | PartialConfig"
    budget: int
    runs: int = 25
    output_dir: "str | None" = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if self.budget < self.config.ants:
            raise ConfigError("budget must cover at least one construction per ant")
        if self.algorithm == MMAS:
            if not isinstance(self.config, MmasConfig):
                raise ConfigError("mmas requires an MmasConfig")
        else:
            if not isinstance(self.config, PartialConfig):
                raise ConfigError(f"{self.algorithm} requires a PartialConfig")
            mode = SEGMENT if self.algorithm == PARTIAL_SEGMENT else BLOCKS
            if self.config.preservation_mode != mode:
                raise ConfigError(
                    f"{self.algorithm} requires preservation_mode {mode!r}"
                )


@dataclass(frozen=True)
class RunRecord:
    """Outcome of a single seeded run."""

    run: int
    seed: int
    serviced_percent: float
    traversal: float
    reduction_percent: float
    wall_seconds: float
    decisions: int
    decisions_limited: int
    constructions_limited: int
    max_decisions_limited: int
    evaluations: int


@dataclass(frozen=True)
class RunReport:
    """A campaign's per-run rows plus the baseline they are compared against."""

    plan: ExperimentPlan
    baseline_traversal: float
    baseline_serviced_percent: float
    records: tuple[RunRecord, ...]

    def aggregate(self, field: str) -> tuple[float, float]:
        """Mean and sample standard deviation of one per-run column."""
        values = [float(getattr(r, field)) for r in self.records]
        mean = statistics.fmean(values)
        std = statistics.stdev(values) if len(values) > 1 else 0.0
        return mean, std


def iterations_for_budget(algorithm: str, ants: int, budget: int) -> int:
    """Construction rounds affordable within an evaluation budget."""
    if algorithm == MMAS:
        return max(1, budget // ants)
    # the initial full constructions spend the first round of the budget
    return max(0, budget // ants - 1)


def load_instance(source: "str | instances.GeneratorConfig") -> Instance:
    """Resolve a plan's instance source: a file path or generator settings."""
    if isinstance(source, instances.GeneratorConfig):
        return instances.generate(source)
    return instances.parse(Path(source).read_text())


def _campaign_stem(plan: ExperimentPlan) -> str:
    if plan.algorithm == MMAS:
        return MMAS
    return f"{plan.algorithm}_limit{plan.config.modification_limit:g}"


def _csv_cell(value) -> str:
    # repr round-trips floats exactly, so aggregates recompute from the file
    return repr(value) if isinstance(value, float) else str(value)


def _record_row(record: RunRecord) -> list:
    return [_csv_cell(getattr(record, name)) for name in CSV_FIELDS]


def run_experiment(plan: ExperimentPlan, progress=None, instance: "Instance | None" = None) -> RunReport:
    """Run the campaign: seeded solver runs measured against the company-style baseline.

    Args:
        plan: what to run.
        progress: optional callback (run_index, record) after each run.
        instance: pre-loaded instance to reuse, else loaded from plan.source.

    Returns:
        RunReport with one record per run, persisted incrementally when
        plan.output_dir is set.
    """
    if instance is None:
        instance = load_instance(plan.source)
    base = baseline.company_schedule(instance)
    base_l = base.evaluation.traversal_time
    total = instance.total_service_time
    iterations = iterations_for_budget(plan.algorithm, plan.config.ants, plan.budget)

    sink = None
    writer = None
    if plan.output_dir is not None:
        out_dir = Path(plan.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        sink = open(out_dir / f"runs_{_campaign_stem(plan)}.csv", "w", newline="", encoding="utf-8")
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        sink.flush()

    records = []
    try:
        for run_index in range(plan.runs):
            config = replace(
                plan.config,
                max_iterations=iterations,
                seed=plan.config.seed + run_index,
            )
            start = time.perf_counter()
            try:
                if plan.algorithm == MMAS:
                    result = run_mmas(instance, config)
                    limited = constructions_limited = max_limited = 0
                else:
                    result = run_partial(instance, config)
                    limited = result.decisions_limited
                    constructions_limited = result.constructions_limited
                    max_limited = result.max_decisions_limited
            except Exception as exc:
                raise RuntimeError(
                    f"run {run_index} (seed {config.seed}) failed: {exc}"
                ) from exc
            wall = time.perf_counter() - start
            ev = result.best_evaluation
            record = RunRecord(
                run=run_index,
                seed=config.seed,
                serviced_percent=100.0 * ev.serviced_time / total if total > 0 else 100.0,
                traversal=ev.traversal_time,
                reduction_percent=(
                    100.0 * (base_l - ev.traversal_time) / base_l if base_l > 0 else 0.0
                ),
                wall_seconds=wall,
                decisions=result.decisions,
                decisions_limited=limited,
                constructions_limited=constructions_limited,
                max_decisions_limited=max_limited,
                evaluations=result.evaluations,
            )
            records.append(record)
            if writer is not None:
                writer.writerow(_record_row(record))
                sink.flush()
            if progress is not None:
                progress(run_index, record)
    finally:
        if sink is not None:
            sink.close()

    return RunReport(
        plan=plan,
        baseline_traversal=base_l,
        baseline_serviced_percent=(
            100.0 * base.evaluation.serviced_time / total if total > 0 else 100.0
        ),
        records=tuple(records),
    )


def sweep_modification_limit(
    plan: ExperimentPlan,
    limits: tuple = DEFAULT_SWEEP_LIMITS,
    progress=None,
) -> tuple[RunReport, ...]:
    """Run the campaign once per modification limit and emit the trend series.

    Returns one RunReport per distinct limit, in the given order; duplicates
    are dropped with a warning. When plan.output_dir is set a sweep series CSV
    (limit vs quality and runtime statistics) is written alongside the per-run
    files.
    """
    if plan.algorithm == MMAS:
        raise ConfigError("modification limit sweep requires a partial variant")
    deduped = []
    for limit in limits:
        if limit in deduped:
            warnings.warn(f"duplicate modification limit {limit:g} ignored")
            continue
        deduped.append(limit)

    instance = load_instance(plan.source)
    reports = []
    for limit in deduped:
        sub = replace(plan, config=replace(plan.config, modification_limit=limit))
        reports.append(run_experiment(sub, progress=progress, instance=instance))

    if plan.output_dir is not None:
        out_dir = Path(plan.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / f"sweep_{plan.algorithm}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                [
                    "modification_limit",
                    "serviced_mean",
                    "serviced_std",
                    "traversal_mean",
                    "traversal_std",
                    "reduction_mean",
                    "reduction_std",
                    "wall_mean",
                    "wall_std",
                ]
            )
            for report in reports:
                row = [repr(float(report.plan.config.modification_limit))]
                for field in ("serviced_percent", "traversal", "reduction_percent", "wall_seconds"):
                    mean, std = report.aggregate(field)
                    row.extend([repr(mean), repr(std)])
                writer.writerow(row)
    return tuple(reports)


_TABLE_COLUMNS = (
    ("Job Time Serviced (%)", "serviced_percent", "{:.2f}"),
    ("Traversal (min)", "traversal", "{:.2f}"),
    ("Traversal Reduction (%)", "reduction_percent", "{:.2f}"),
    ("Execution Time (s)", "wall_seconds", "{:.2f}"),
    ("Decisions", "decisions", "{:.0f}"),
)


def render_table(report: RunReport) -> str:
    """Aligned text report: per-run rows and a mean ± std aggregate row."""
    plan = report.plan
    lines = [
        f"Algorithm: {plan.algorithm} (ants={plan.config.ants}, budget={plan.budget}, runs={plan.runs})",
        "Baseline: reimplemented company-style scheduler, "
        f"traversal {report.baseline_traversal:.2f} min, "
        f"serviced {report.baseline_serviced_percent:.2f}%",
    ]
    if plan.algorithm != MMAS:
        lines[0] += f" [modification_limit={plan.config.modification_limit:g}]"
    headers = ["Run", "Seed"] + [name for name, _, _ in _TABLE_COLUMNS]
    rows = []
    for record in report.records:
        cells = [str(record.run), str(record.seed)]
        for _, field, fmt in _TABLE_COLUMNS:
            cells.append(fmt.format(getattr(record, field)))
        rows.append(cells)
    aggregate = ["mean±std", ""]
    for _, field, fmt in _TABLE_COLUMNS:
        mean, std = report.aggregate(field)
        aggregate.append(f"{fmt.format(mean)} ± {fmt.format(std)}")
    rows.append(aggregate)
    widths = [max(len(headers[i]), *(len(r[i]) for r in rows)) for i in range(len(headers))]
    out = [lines[0], lines[1], ""]
    out.append("  ".join(h.rjust(widths[i]) for i, h in enumerate(headers)))
    for row in rows:
        out.append("  ".join(c.rjust(widths[i]) for i, c in enumerate(row)))
    return "\n".join(out) + "\n"


def render_csv(report: RunReport) -> str:
    """Deterministic CSV: per-run rows plus one aggregate row, no timings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for record in report.records:
        writer.writerow(_record_row(record))
    aggregate = ["aggregate", ""]
    for field in CSV_FIELDS[2:]:
        mean, std = report.aggregate(field)
        aggregate.append(f"{mean!r}±{std!r}")
    writer.writerow(aggregate)
    return buf.getvalue()


def emit_report(report: RunReport, format: str = "table") -> Path:
    """Write the rendered report into the plan's output directory.

    Returns the written path. Raises ConfigError when the plan has no output
    directory or the format is unknown; I/O failures propagate.
    """
    if report.plan.output_dir is None:
        raise ConfigError("plan has no output directory")
    if format not in ("table", "csv"):
        raise ConfigError(f"unknown report format {format!r}")
    out_dir = Path(report.plan.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = _campaign_stem(report.plan)
    if format == "table":
        path = out_dir / f"report_{stem}.txt"
        text = render_table(report)
    else:
        path = out_dir / f"report_{stem}.csv"
        text = render_csv(report)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)
    return path
