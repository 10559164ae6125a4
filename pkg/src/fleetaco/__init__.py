"""Ant colony solvers for multi-depot fleet scheduling with time windows."""

from fleetaco.baseline import BaselineSchedule, company_schedule
from fleetaco.colony import MmasConfig, MmasResult, run_mmas
from fleetaco.harness import (
    ExperimentPlan,
    RunRecord,
    RunReport,
    emit_report,
    run_experiment,
    sweep_modification_limit,
)
from fleetaco.instances import GeneratorConfig, ParseError, generate, parse, serialize
from fleetaco.model import (
    ConfigError,
    Evaluation,
    Instance,
    InstanceArrays,
    Job,
    Location,
    RouteSummary,
    Solution,
    ValidationError,
    Vehicle,
    compare,
    decode_routes,
    evaluate,
    is_better,
    quality,
    travel_time,
)
from fleetaco.partial import PartialConfig, PartialResult, run_partial

__version__ = "1.0.0"

__all__ = [
    "BaselineSchedule",
    "ConfigError",
    "Evaluation",
    "ExperimentPlan",
    "GeneratorConfig",
    "Instance",
    "InstanceArrays",
    "Job",
    "Location",
    "MmasConfig",
    "MmasResult",
    "ParseError",
    "PartialConfig",
    "PartialResult",
    "RouteSummary",
    "RunRecord",
    "RunReport",
    "Solution",
    "ValidationError",
    "Vehicle",
    "company_schedule",
    "compare",
    "decode_routes",
    "emit_report",
    "evaluate",
    "generate",
    "is_better",
    "parse",
    "quality",
    "run_experiment",
    "run_mmas",
    "run_partial",
    "serialize",
    "sweep_modification_limit",
    "travel_time",
    "__version__",
]
