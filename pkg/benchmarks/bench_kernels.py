"""Compare the compiled and pure-Python kernel backends on identical work.

Runs both solvers on a mid-size generated instance against each backend and
reports evaluations per second plus the speedup. Both backends draw from the
same streams, so the solutions they return are checked to be identical.

Usage: python benchmarks/bench_kernels.py [--vehicles N] [--jobs N] [--budget N]
"""

import argparse
import time

from fleetaco import _kernels_py, kernels
from fleetaco.colony import MmasConfig, run_mmas
from fleetaco.instances import GeneratorConfig, generate
from fleetaco.partial import PartialConfig, run_partial

try:
    from fleetaco import _kernels_c
except ImportError:
    _kernels_c = None


def swap_backend(impl):
    kernels.construct_full = impl.construct_full
    kernels.construct_partial = impl.construct_partial
    kernels.construct_blocks = impl.construct_blocks
    kernels.evaluate_order = impl.evaluate_order


def bench(instance, budget):
    results = {}
    mmas_cfg = MmasConfig(ants=192, max_iterations=max(1, budget // 192), seed=5)
    blocks_cfg = PartialConfig(
        ants=32,
        max_iterations=max(0, budget // 32 - 1),
        modification_limit=0.3,
        preservation_mode="blocks",
        seed=5,
    )
    t0 = time.perf_counter()
    m = run_mmas(instance, mmas_cfg)
    results["mmas"] = (time.perf_counter() - t0, m.evaluations, m.best_solution.order)
    t0 = time.perf_counter()
    p = run_partial(instance, blocks_cfg)
    results["partial-blocks"] = (time.perf_counter() - t0, p.evaluations, p.best_solution.order)
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vehicles", type=int, default=16)
    ap.add_argument("--jobs", type=int, default=156)
    ap.add_argument("--budget", type=int, default=50_000)
    args = ap.parse_args()

    if _kernels_c is None:
        raise SystemExit("compiled backend is not built; nothing to compare")

    instance = generate(
        GeneratorConfig(
            vehicles=args.vehicles,
            jobs=args.jobs,
            total_service_minutes=round(36.7 * args.jobs),
            seed=5,
        )
    )
    print(
        f"instance: {args.vehicles} vehicles, {args.jobs} jobs, "
        f"budget {args.budget} evaluations per solver"
    )

    swap_backend(_kernels_c)
    compiled = bench(instance, args.budget)
    swap_backend(_kernels_py)
    pure = bench(instance, args.budget)
    swap_backend(_kernels_c)

    print(f"{'solver':<16} {'compiled':>12} {'pure':>12} {'speedup':>8}")
    for name in compiled:
        c_wall, c_evals, c_order = compiled[name]
        p_wall, p_evals, p_order = pure[name]
        if c_order != p_order or c_evals != p_evals:
            raise SystemExit(f"{name}: backends disagree, benchmark numbers are meaningless")
        c_rate = c_evals / c_wall
        p_rate = p_evals / p_wall
        print(
            f"{name:<16} {c_rate:>8.0f} e/s {p_rate:>8.0f} e/s {c_rate / p_rate:>7.1f}x"
        )


if __name__ == "__main__":
    main()
