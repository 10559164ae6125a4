"""Command line interface for running solver campaigns.

Exit codes: 0 success, 2 configuration error, 3 I/O error. Progress goes to
standard error; results go to standard output, or to files under --out.
"""

import argparse
import sys

from fleetaco import harness
from fleetaco.colony import MmasConfig
from fleetaco.instances import GeneratorConfig, ParseError
from fleetaco.model import ConfigError
from fleetaco.partial import BLOCKS, SEGMENT, PartialConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

_ALGO_NAMES = {
    "mmas": harness.MMAS,
    "partial": harness.PARTIAL_SEGMENT,
    "partial-blocks": harness.PARTIAL_BLOCKS,
}

_GENERATE_KEYS = {
    "v": ("vehicles", int),
    "j": ("jobs", int),
    "service": ("total_service_minutes", float),
    "window": ("window_fraction", float),
    "area": ("area_km", float),
    "depots": ("depot_count", int),
    "gseed": ("seed", int),
}


def parse_generate_spec(spec: str) -> GeneratorConfig:
    """Parse a compact instance description like "v=8,j=77,service=2829"."""
    kwargs = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value, got {part!r}")
        key = key.strip()
        if key not in _GENERATE_KEYS:
            raise ConfigError(
                f"unknown generator key {key!r} (expected one of {', '.join(sorted(_GENERATE_KEYS))})"
            )
        field, cast = _GENERATE_KEYS[key]
        try:
            kwargs[field] = cast(value.strip())
        except ValueError:
            raise ConfigError(f"bad value for {key!r}: {value.strip()!r}") from None
    missing = [k for k, (f, _) in _GENERATE_KEYS.items() if k in ("v", "j", "service") and f not in kwargs]
    if missing:
        raise ConfigError(f"generator spec must set {', '.join(missing)}")
    return GeneratorConfig(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fleetaco",
        description="Ant colony solvers for multi-depot fleet scheduling with time windows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", help="run a seeded multi-run solver campaign")
    source = solve.add_mutually_exclusive_group(required=True)
    source.add_argument("--instance", metavar="FILE", help="instance file to solve")
    source.add_argument(
        "--generate",
        metavar="SPEC",
        help='generate an instance, e.g. "v=8,j=77,service=2829" (optional: window, area, depots, gseed)',
    )
    solve.add_argument("--algo", choices=sorted(_ALGO_NAMES), default="mmas")
    solve.add_argument("--ants", type=int, default=None, help="colony size (default: per algorithm)")
    solve.add_argument("--budget", type=int, default=100_000, help="solution evaluations per run")
    solve.add_argument("--alpha", type=float, default=None, help="pheromone exponent")
    solve.add_argument("--beta", type=float, default=None, help="heuristic exponent")
    solve.add_argument("--rho", type=float, default=None, help="evaporation rate (mmas only)")
    solve.add_argument("--mod-limit", type=float, default=None, help="modification limit (partial only)")
    solve.add_argument("--escape", type=float, default=None, help="escape probability (partial only)")
    solve.add_argument("--runs", type=int, default=25, help="independent seeded runs")
    solve.add_argument("--seed", type=int, default=0, help="base seed; run k uses seed+k")
    solve.add_argument("--out", metavar="DIR", default=None, help="write reports here instead of stdout")
    solve.add_argument("--format", choices=("table", "csv"), default="table")
    return parser


def _override(kwargs: dict, name: str, value) -> None:
    if value is not None:
        kwargs[name] = value


def build_plan(args) -> harness.ExperimentPlan:
    """Translate parsed arguments into an experiment plan."""
    algorithm = _ALGO_NAMES[args.algo]
    if algorithm == harness.MMAS:
        for flag in ("mod_limit", "escape"):
            if getattr(args, flag) is not None:
                raise ConfigError(f"--{flag.replace('_', '-')} applies to partial variants only")
        kwargs = {"seed": args.seed}
        _override(kwargs, "ants", args.ants)
        _override(kwargs, "alpha", args.alpha)
        _override(kwargs, "beta", args.beta)
        _override(kwargs, "rho", args.rho)
        config = MmasConfig(**kwargs)
    else:
        if args.rho is not None:
            raise ConfigError("--rho applies to mmas only")
        mode = SEGMENT if algorithm == harness.PARTIAL_SEGMENT else BLOCKS
        kwargs = {"seed": args.seed, "preservation_mode": mode}
        _override(kwargs, "ants", args.ants)
        _override(kwargs, "alpha", args.alpha)
        _override(kwargs, "beta", args.beta)
        _override(kwargs, "modification_limit", args.mod_limit)
        _override(kwargs, "escape_probability", args.escape)
        config = PartialConfig(**kwargs)
    source = args.instance if args.instance is not None else parse_generate_spec(args.generate)
    return harness.ExperimentPlan(
        source=source,
        algorithm=algorithm,
        config=config,
        budget=args.budget,
        runs=args.runs,
        output_dir=args.out,
    )


def _progress(run_index: int, record: harness.RunRecord) -> None:
    print(
        f"run {run_index}: serviced {record.serviced_percent:.2f}%, "
        f"traversal {record.traversal:.2f} min, {record.wall_seconds:.2f}s",
        file=sys.stderr,
        flush=True,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        plan = build_plan(args)
        report = harness.run_experiment(plan, progress=_progress)
        if plan.output_dir is not None:
            path = harness.emit_report(report, args.format)
            print(f"wrote {path}", file=sys.stderr)
        else:
            text = harness.render_table(report) if args.format == "table" else harness.render_csv(report)
            sys.stdout.write(text)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
