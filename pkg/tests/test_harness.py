"""Experiment harness: plan validation, aggregation, persistence and reports."""

import csv
import statistics

import pytest

from fleetaco import harness
from fleetaco.colony import MmasConfig
from fleetaco.harness import (
    ExperimentPlan,
    RunRecord,
    RunReport,
    emit_report,
    iterations_for_budget,
    load_instance,
    render_csv,
    render_table,
    run_experiment,
    sweep_modification_limit,
)
from fleetaco.instances import GeneratorConfig, serialize
from fleetaco.model import ConfigError
from fleetaco.partial import PartialConfig

SMALL = GeneratorConfig(vehicles=2, jobs=6, total_service_minutes=240, seed=7)


def small_plan(algorithm="mmas", budget=2000, runs=2, out=None, **config_kwargs):
    if algorithm == "mmas":
        config = MmasConfig(ants=16, **config_kwargs)
    else:
        mode = "segment" if algorithm == "partial-segment" else "blocks"
        config = PartialConfig(ants=16, preservation_mode=mode, **config_kwargs)
    return ExperimentPlan(
        source=SMALL,
        algorithm=algorithm,
        config=config,
        budget=budget,
        runs=runs,
        output_dir=out,
    )


class TestPlanValidation:
    def test_unknown_algorithm_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentPlan(source=SMALL, algorithm="tabu", config=MmasConfig(), budget=1000)

    def test_zero_runs_rejected(self):
        with pytest.raises(ConfigError):
            small_plan(runs=0)

    def test_budget_below_colony_size_rejected(self):
        with pytest.raises(ConfigError):
            small_plan(budget=15)

    def test_config_type_must_match_algorithm(self):
        with pytest.raises(ConfigError):
            ExperimentPlan(source=SMALL, algorithm="mmas", config=PartialConfig(), budget=1000)
        with pytest.raises(ConfigError):
            ExperimentPlan(
                source=SMALL, algorithm="partial-segment", config=MmasConfig(), budget=1000
            )

    def test_preservation_mode_must_match_algorithm(self):
        with pytest.raises(ConfigError):
            ExperimentPlan(
                source=SMALL,
                algorithm="partial-blocks",
                config=PartialConfig(preservation_mode="segment"),
                budget=1000,
            )


class TestBudgetConversion:
    def test_mmas_rounds_are_budget_over_colony(self):
        assert iterations_for_budget("mmas", 192, 100_000) == 520

    def test_partial_iterations_leave_room_for_the_init_round(self):
        assert iterations_for_budget("partial-blocks", 32, 100_000) == 3124

    def test_minimum_one_mmas_round(self):
        assert iterations_for_budget("mmas", 192, 192) == 1

    def test_partial_budget_equal_to_colony_runs_init_only(self):
        assert iterations_for_budget("partial-segment", 32, 32) == 0


class TestAggregation:
    def make_report(self, traversals):
        records = tuple(
            RunRecord(
                run=i,
                seed=i,
                serviced_percent=100.0,
                traversal=t,
                reduction_percent=0.0,
                wall_seconds=0.0,
                decisions=0,
                decisions_limited=0,
                constructions_limited=0,
                max_decisions_limited=0,
                evaluations=0,
            )
            for i, t in enumerate(traversals)
        )
        plan = small_plan(runs=len(traversals))
        return RunReport(plan, 100.0, 100.0, records)

    def test_textbook_sample_statistics(self):
        mean, std = self.make_report([10.0, 20.0, 30.0]).aggregate("traversal")
        assert mean == 20.0
        assert std == 10.0

    def test_single_run_has_zero_std(self):
        mean, std = self.make_report([42.0]).aggregate("traversal")
        assert mean == 42.0
        assert std == 0.0

    def test_identical_runs_have_zero_std(self):
        mean, std = self.make_report([5.0, 5.0, 5.0]).aggregate("traversal")
        assert mean == 5.0
        assert std == 0.0


class TestRunExperiment:
    def test_runs_use_consecutive_seeds(self):
        report = run_experiment(small_plan(runs=3, seed=11))
        assert [r.seed for r in report.records] == [11, 12, 13]
        assert [r.run for r in report.records] == [0, 1, 2]

    def test_reduction_consistent_with_baseline(self):
        report = run_experiment(small_plan(runs=2))
        for r in report.records:
            expected = 100.0 * (report.baseline_traversal - r.traversal) / report.baseline_traversal
            assert r.reduction_percent == expected

    def test_evaluations_stay_within_budget(self):
        for algorithm in ("mmas", "partial-segment", "partial-blocks"):
            report = run_experiment(small_plan(algorithm=algorithm, budget=2000, runs=1))
            assert report.records[0].evaluations <= 2000

    def test_solver_matching_baseline_reports_zero_reduction(self, monkeypatch):
        from fleetaco import baseline as baseline_mod
        from fleetaco.colony import MmasResult

        def fake_run_mmas(instance, config, target=None, on_round=None):
            sched = baseline_mod.company_schedule(instance)
            return MmasResult(
                best_solution=sched.solution,
                best_evaluation=sched.evaluation,
                trace=[],
                evaluations=16,
                constructions=16,
                decisions=16,
                rounds=1,
            )

        monkeypatch.setattr(harness, "run_mmas", fake_run_mmas)
        report = run_experiment(small_plan(runs=1))
        assert report.records[0].reduction_percent == 0.0

    def test_solver_failure_carries_run_index(self, monkeypatch):
        calls = {"n": 0}

        def exploding(instance, config, target=None, on_round=None):
            if calls["n"] == 2:
                raise ValueError("boom")
            calls["n"] += 1
            return harness.run_partial(
                instance, PartialConfig(ants=16, max_iterations=config.max_iterations, seed=config.seed)
            )

        monkeypatch.setattr(harness, "run_mmas", exploding)
        with pytest.raises(RuntimeError, match="run 2"):
            run_experiment(small_plan(runs=4, seed=5))

    def test_rows_persisted_before_failure(self, monkeypatch, tmp_path):
        real = harness.run_mmas

        def exploding(instance, config, target=None, on_round=None):
            if config.seed >= 1:
                raise ValueError("boom")
            return real(instance, config, target, on_round)

        monkeypatch.setattr(harness, "run_mmas", exploding)
        with pytest.raises(RuntimeError):
            run_experiment(small_plan(runs=3, out=str(tmp_path)))
        rows = list(csv.reader((tmp_path / "runs_mmas.csv").open()))
        assert rows[0] == list(harness.CSV_FIELDS)
        assert len(rows) == 2  # header plus the one completed run

    def test_aggregates_recompute_exactly_from_persisted_rows(self, tmp_path):
        plan = small_plan(algorithm="partial-blocks", runs=3, out=str(tmp_path))
        report = run_experiment(plan)
        path = tmp_path / "runs_partial-blocks_limit1.csv"
        with path.open() as fh:
            rows = list(csv.DictReader(fh))
        for field in ("serviced_percent", "traversal", "reduction_percent"):
            values = [float(row[field]) for row in rows]
            mean, std = report.aggregate(field)
            assert statistics.fmean(values) == mean
            assert (statistics.stdev(values) if len(values) > 1 else 0.0) == std

    def test_load_instance_from_file_round_trips(self, tmp_path):
        inst = load_instance(SMALL)
        path = tmp_path / "case.txt"
        path.write_text(serialize(inst))
        again = load_instance(str(path))
        assert again == inst


class TestSweep:
    def test_rejects_mmas(self):
        with pytest.raises(ConfigError):
            sweep_modification_limit(small_plan())

    def test_duplicate_limits_dropped_with_warning(self, tmp_path):
        plan = small_plan(algorithm="partial-segment", budget=320, runs=1, out=str(tmp_path))
        with pytest.warns(UserWarning, match="duplicate"):
            reports = sweep_modification_limit(plan, limits=(1.0, 0.5, 1.0))
        assert [r.plan.config.modification_limit for r in reports] == [1.0, 0.5]

    def test_emits_series_and_per_limit_rows(self, tmp_path):
        plan = small_plan(algorithm="partial-blocks", budget=640, runs=2, out=str(tmp_path))
        reports = sweep_modification_limit(plan, limits=(1.0, 0.5))
        assert len(reports) == 2
        series = list(csv.DictReader((tmp_path / "sweep_partial-blocks.csv").open()))
        assert [float(row["modification_limit"]) for row in series] == [1.0, 0.5]
        for row, report in zip(series, reports):
            mean, std = report.aggregate("reduction_percent")
            assert float(row["reduction_mean"]) == mean
            assert float(row["reduction_std"]) == std
        assert (tmp_path / "runs_partial-blocks_limit1.csv").exists()
        assert (tmp_path / "runs_partial-blocks_limit0.5.csv").exists()


class TestReports:
    def test_table_mirrors_benchmark_columns(self):
        report = run_experiment(small_plan(runs=2))
        text = render_table(report)
        assert "Job Time Serviced (%)" in text
        assert "Traversal Reduction (%)" in text
        assert "Execution Time (s)" in text
        assert "reimplemented company-style scheduler" in text
        assert "mean±std" in text

    def test_csv_has_runs_plus_aggregate_rows(self):
        report = run_experiment(small_plan(runs=3))
        rows = render_csv(report).splitlines()
        assert rows[0] == ",".join(harness.CSV_FIELDS)
        assert len(rows) - 1 == 3 + 1  # data rows: one per run plus the aggregate

    def test_csv_byte_identical_across_reruns(self):
        a = render_csv(run_experiment(small_plan(algorithm="partial-segment", runs=2)))
        b = render_csv(run_experiment(small_plan(algorithm="partial-segment", runs=2)))
        assert a == b

    def test_csv_excludes_wall_clock(self):
        report = run_experiment(small_plan(runs=1))
        assert "wall" not in render_csv(report)

    def test_emit_report_writes_requested_format(self, tmp_path):
        plan = small_plan(runs=1, out=str(tmp_path))
        report = run_experiment(plan)
        table_path = emit_report(report, "table")
        csv_path = emit_report(report, "csv")
        assert table_path.read_text() == render_table(report)
        assert csv_path.read_text() == render_csv(report)

    def test_emit_report_same_report_twice_is_byte_identical(self, tmp_path):
        plan = small_plan(runs=1, out=str(tmp_path))
        report = run_experiment(plan)
        first = emit_report(report, "csv").read_bytes()
        second = emit_report(report, "csv").read_bytes()
        assert first == second

    def test_emit_report_requires_output_dir(self):
        report = run_experiment(small_plan(runs=1))
        with pytest.raises(ConfigError):
            emit_report(report, "table")

    def test_emit_report_rejects_unknown_format(self, tmp_path):
        report = run_experiment(small_plan(runs=1, out=str(tmp_path)))
        with pytest.raises(ConfigError):
            emit_report(report, "json")
