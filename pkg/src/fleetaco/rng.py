"""Deterministic random-stream plumbing shared by all solvers.

Each ant owns one persistent PCG64 stream keyed by (seed, ant index), created
once per run. All discrete draws use floor(u * n) over a single double so the
compiled and pure-Python kernels consume identical sequences.
"""

import numpy as np


def ant_stream(seed: int, ant: int) -> np.random.Generator:
    """Independent generator for one ant within one run."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, ant))))


def ant_streams(seed: int, count: int) -> list[np.random.Generator]:
    """One persistent stream per ant."""
    return [ant_stream(seed, ant) for ant in range(count)]


def index_from_uniform(u: float, n: int) -> int:
    """Map one uniform double to an integer in [0, n)."""
    k = int(u * n)
    return n - 1 if k >= n else k


def uniform_index(g: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n) from one double draw."""
    return index_from_uniform(g.random(), n)


def uniform_int_inclusive(g: np.random.Generator, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] from one double draw."""
    return lo + uniform_index(g, hi - lo + 1)


def fisher_yates(g: np.random.Generator, items: list) -> None:
    """In-place shuffle using floor(u * k) draws."""
    for i in range(len(items) - 1, 0, -1):
        j = uniform_index(g, i + 1)
        items[i], items[j] = items[j], items[i]
