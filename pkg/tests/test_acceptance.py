"""End-to-end acceptance checks for the solver suite.

Each test covers one numbered acceptance check and prints a single
"[acceptance N] ... PASS/FAIL" line with the measured values, so the suite
output doubles as the acceptance report. Checks 6 and 7 share one sweep.
"""

import random
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import oracle
from fleetaco.colony import (
    ConstructionState,
    MmasConfig,
    PheromoneMatrix,
    run_mmas,
    select_next,
    selection_probabilities,
)
from fleetaco.harness import ExperimentPlan, run_experiment, sweep_modification_limit
from fleetaco.instances import GeneratorConfig, generate
from fleetaco.model import evaluate
from fleetaco.partial import PartialConfig, run_partial
from test_model import fuzz_instance, random_solution

SEEDED_RUNS = 25
RUN_BUDGET = 100_000

# twenty two-vehicle instances whose optima are reachable under both solvers;
# service time is 40 minutes per job
SMALL_INSTANCES = [
    (4, g) for g in (0, 1, 2, 3, 4, 6, 8, 10, 16, 23, 25, 28, 30, 31, 33, 37, 38)
] + [(5, g) for g in (64, 109, 171)]

# scale ladder used by the trend checks: vehicles, jobs, total service minutes
WEEK = GeneratorConfig(vehicles=8, jobs=77, total_service_minutes=2829, seed=1)
FORTNIGHT = GeneratorConfig(vehicles=16, jobs=156, total_service_minutes=5733, seed=1)
THREEWEEK = GeneratorConfig(vehicles=24, jobs=220, total_service_minutes=8026, seed=1)
MONTH = GeneratorConfig(vehicles=32, jobs=298, total_service_minutes=11938, seed=1)
SIXWEEK = GeneratorConfig(vehicles=45, jobs=437, total_service_minutes=16067, seed=1)

TREND_BUDGET = 1_000_000
TREND_RUNS = 10
SWEEP_BUDGET = 200_000
SWEEP_LIMITS = (1.0, 0.5, 0.3, 0.1)


def report_line(capsys, number, label, ok, detail):
    with capsys.disabled():
        print(f"\n[acceptance {number}] {label}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"acceptance {number} {label}: {detail}"


def hit(result, optimum):
    ev = result.best_evaluation
    return ev.serviced_time == optimum[0] and ev.traversal_time <= optimum[1] * (1 + 1e-12)


def test_small_scale_runs_reach_exhaustive_optimum(capsys):
    t0 = time.perf_counter()
    worst_blocks = worst_mmas = SEEDED_RUNS
    for jobs, gseed in SMALL_INSTANCES:
        inst = generate(
            GeneratorConfig(vehicles=2, jobs=jobs, total_service_minutes=40 * jobs, seed=gseed)
        )
        optimum = oracle.exhaustive_best(inst)
        blocks_hits = mmas_hits = 0
        for seed in range(SEEDED_RUNS):
            cfg = PartialConfig(
                ants=32,
                max_iterations=RUN_BUDGET // 32 - 1,
                modification_limit=0.5,
                preservation_mode="blocks",
                seed=seed,
            )
            if hit(run_partial(inst, cfg, target=optimum), optimum):
                blocks_hits += 1
            mcfg = MmasConfig(ants=192, max_iterations=RUN_BUDGET // 192, seed=seed)
            if hit(run_mmas(inst, mcfg, target=optimum), optimum):
                mmas_hits += 1
        worst_blocks = min(worst_blocks, blocks_hits)
        worst_mmas = min(worst_mmas, mmas_hits)
    wall = time.perf_counter() - t0
    bar = 0.9 * SEEDED_RUNS
    ok = worst_blocks >= bar and worst_mmas >= bar and wall < 120.0
    report_line(
        capsys,
        1,
        "small-scale optimality vs exhaustive oracle",
        ok,
        f"worst hits over 20 instances: blocks {worst_blocks}/25, mmas {worst_mmas}/25, "
        f"bar >= 22.5, wall {wall:.1f}s < 120s",
    )


def test_evaluator_agrees_with_reference_simulator(capsys):
    rng = random.Random(1002)
    mismatches = 0
    for _ in range(1000):
        inst = fuzz_instance(rng)
        sol = random_solution(rng, inst)
        ev = evaluate(inst, sol)
        ref_s, ref_l, _ = oracle.simulate(inst, list(sol.order))
        if ev.serviced_time != ref_s or ev.traversal_time != ref_l:
            mismatches += 1
    report_line(
        capsys,
        2,
        "schedule evaluator equals reference simulator",
        mismatches == 0,
        f"{mismatches} mismatches over 1000 fuzzed pairs, exact float equality",
    )


def test_selection_frequencies_match_probabilities(capsys):
    exp_seed = 10
    draws = 100_000
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(exp_seed)))
    worst_z = 0.0
    for vec in range(50):
        k = int(rng.integers(2, 9))
        n = k + 1
        tau = rng.uniform(0.05, 4.0, (n, n))
        eta = rng.uniform(0.05, 3.0, (n, n))
        alpha = float(rng.choice([1.0, 2.0, 3.0]))
        beta = float(rng.choice([1.0, 2.0]))
        state = ConstructionState(current=0, visited={0}, n_vertices=n)
        pheromone = PheromoneMatrix(tau=tau)
        candidates, probs = selection_probabilities(state, pheromone, eta, alpha, beta)
        position = {c: i for i, c in enumerate(candidates)}
        counts = np.zeros(len(candidates))
        g = np.random.Generator(np.random.PCG64(np.random.SeedSequence((exp_seed, vec))))
        for _ in range(draws):
            counts[position[select_next(state, pheromone, eta, alpha, beta, g)]] += 1
        sigma = np.sqrt(draws * probs * (1.0 - probs))
        z = np.abs(counts - draws * probs) / np.where(sigma > 0.0, sigma, 1.0)
        worst_z = max(worst_z, float(z.max()))
    report_line(
        capsys,
        3,
        "selection rule frequencies within 3 sigma",
        worst_z <= 3.0,
        f"worst |z| {worst_z:.3f} over 50 weight vectors x {draws} draws",
    )


def test_pheromone_bounds_hold_across_full_run(capsys):
    inst = generate(FORTNIGHT)
    sampler = np.random.Generator(np.random.PCG64(np.random.SeedSequence(99)))
    samples_ok = []

    def on_round(rnd, pheromone, best):
        if not pheromone.bounded:
            return
        n = pheromone.tau.shape[0]
        i = sampler.integers(0, n, 25)
        j = sampler.integers(0, n, 25)
        vals = pheromone.tau[i, j]
        samples_ok.append(
            bool((vals >= pheromone.tau_min).all() and (vals <= pheromone.tau_max).all())
        )

    result = run_mmas(
        inst, MmasConfig(ants=192, max_iterations=RUN_BUDGET // 192, seed=3), on_round=on_round
    )
    monotone = all(
        b[0] > a[0] or (b[0] == a[0] and b[1] <= a[1])
        for a, b in zip(result.trace, result.trace[1:])
    )
    ok = len(samples_ok) >= 500 and all(samples_ok) and monotone
    report_line(
        capsys,
        4,
        "trail bounds and monotone convergence on a full run",
        ok,
        f"{len(samples_ok)} rounds x 25 sampled entries in bounds: {all(samples_ok)}, "
        f"trace monotone: {monotone}",
    )


@pytest.fixture(scope="session")
def trend_campaigns():
    """Equal-budget campaigns for both solvers across the scale ladder."""
    campaigns = {}
    walls = {}
    for name, gen in (("week", WEEK), ("threeweek", THREEWEEK), ("sixweek", SIXWEEK)):
        for algorithm, cfg in (
            ("mmas", MmasConfig(ants=192, seed=0)),
            (
                "partial-blocks",
                PartialConfig(
                    ants=32,
                    alpha=3.0,
                    beta=1.0,
                    modification_limit=0.3,
                    preservation_mode="blocks",
                    seed=0,
                ),
            ),
        ):
            plan = ExperimentPlan(
                source=gen,
                algorithm=algorithm,
                config=cfg,
                budget=TREND_BUDGET,
                runs=TREND_RUNS,
            )
            t0 = time.perf_counter()
            campaigns[name, algorithm] = run_experiment(plan)
            walls[name, algorithm] = time.perf_counter() - t0
    return campaigns, walls


def test_equal_budget_scalability_trend(capsys, trend_campaigns):
    from scipy.stats import mannwhitneyu

    campaigns, walls = trend_campaigns
    serviced = {k: [r.serviced_percent for r in rep.records] for k, rep in campaigns.items()}
    traversal = {k: [r.traversal for r in rep.records] for k, rep in campaigns.items()}

    week_full = all(v == 100.0 for v in serviced["week", "mmas"])
    sixweek_mean = sum(serviced["sixweek", "mmas"]) / TREND_RUNS
    degrades = week_full and sixweek_mean < 100.0
    blocks_full = all(
        v == 100.0 for name in ("week", "threeweek", "sixweek") for v in serviced[name, "partial-blocks"]
    )
    p_three = mannwhitneyu(
        traversal["threeweek", "partial-blocks"], traversal["threeweek", "mmas"], alternative="less"
    ).pvalue
    p_six = mannwhitneyu(
        traversal["sixweek", "partial-blocks"], traversal["sixweek", "mmas"], alternative="less"
    ).pvalue
    total_wall = sum(walls.values())
    ok = degrades and blocks_full and p_three < 0.05 and p_six < 0.05 and total_wall < 3600.0
    report_line(
        capsys,
        5,
        "equal-budget scalability trend across the scale ladder",
        ok,
        f"mmas week all 100%: {week_full}, mmas sixweek mean {sixweek_mean:.2f}% < 100, "
        f"blocks always 100%: {blocks_full}, one-sided rank-test p "
        f"threeweek {p_three:.2e} / sixweek {p_six:.2e} < 0.05, "
        f"wall {total_wall / 60:.1f} min < 60 min",
    )


@pytest.fixture(scope="session")
def month_sweep():
    """Modification-limit sweep shared by the quality-trend and decision-cap checks."""
    cfg = PartialConfig(
        ants=32,
        alpha=3.0,
        beta=1.0,
        modification_limit=1.0,
        preservation_mode="blocks",
        seed=0,
    )
    plan = ExperimentPlan(
        source=MONTH, algorithm="partial-blocks", config=cfg, budget=SWEEP_BUDGET, runs=TREND_RUNS
    )
    return sweep_modification_limit(plan, limits=SWEEP_LIMITS)


def test_modification_limit_quality_trend(capsys, month_sweep):
    means = {}
    wall_means = {}
    for report in month_sweep:
        limit = report.plan.config.modification_limit
        means[limit] = report.aggregate("traversal")[0]
        wall_means[limit] = report.aggregate("wall_seconds")[0]
    best_limit = min(means, key=means.get)
    ordered = [wall_means[limit] for limit in SWEEP_LIMITS]
    runtime_monotone = all(b <= a * 1.10 for a, b in zip(ordered, ordered[1:]))
    ok = best_limit <= 0.3 and runtime_monotone
    report_line(
        capsys,
        6,
        "tighter modification limits win on quality and speed",
        ok,
        f"mean traversal by limit {{{', '.join(f'{k:g}: {v:.1f}' for k, v in means.items())}}}, "
        f"best at {best_limit:g} <= 0.3, wall means {[round(w, 2) for w in ordered]} "
        f"non-increasing within 10%: {runtime_monotone}",
    )


def test_limited_decision_cap_holds_on_sweep_runs(capsys, month_sweep):
    n = MONTH.vehicles + MONTH.jobs
    violations = 0
    runs = 0
    for report in month_sweep:
        cap = report.plan.config.modification_limit * n + 1
        for record in report.records:
            runs += 1
            if record.max_decisions_limited > cap:
                violations += 1
    report_line(
        capsys,
        7,
        "per-construction decision counts respect the limit cap",
        violations == 0,
        f"{violations} violations of max decisions <= limit*{n}+1 over {runs} sweep runs",
    )


def test_cli_byte_identical_output(capsys, tmp_path):
    base = [
        sys.executable,
        "-m",
        "fleetaco",
        "solve",
        "--generate",
        "v=4,j=30,service=1100,gseed=5",
        "--algo",
        "partial-blocks",
        "--mod-limit",
        "0.5",
        "--budget",
        "20000",
        "--runs",
        "3",
        "--seed",
        "11",
        "--format",
        "csv",
    ]
    stdouts = []
    for _ in range(2):
        proc = subprocess.run(base, capture_output=True, check=True)
        stdouts.append(proc.stdout)
    file_bytes = []
    for rep in ("a", "b"):
        out_dir = tmp_path / rep
        subprocess.run(base + ["--out", str(out_dir)], capture_output=True, check=True)
        paths = sorted(p.name for p in out_dir.iterdir())
        file_bytes.append([(p, (out_dir / p).read_bytes()) for p in paths])
    ok = stdouts[0] == stdouts[1] and file_bytes[0] == file_bytes[1] and len(file_bytes[0]) == 2
    report_line(
        capsys,
        8,
        "repeated seeded CLI invocations are byte-identical",
        ok,
        f"stdout {len(stdouts[0])} bytes equal: {stdouts[0] == stdouts[1]}, "
        f"written files {[name for name, _ in file_bytes[0]]} equal: "
        f"{file_bytes[0] == file_bytes[1]}",
    )
