"""Random instance generation and the timing harness."""

from __future__ import annotations

import math
import statistics
import time
from typing import Optional, Sequence

import numpy as np

from .geometry import FFLError, Instance
from .solver import solve

DISTRIBUTIONS = ("uniform", "clustered")


def generate_instance(
    n: int,
    *,
    seed: int,
    v: float = 2.0,
    distribution: str = "uniform",
    weight_range=(1.0, 5.0),
    extent: float = 100.0,
    clusters: int = 3,
    integer: bool = False,
) -> Instance:
    """Seeded random instance; the same arguments always give the same instance."""
    if n < 1:
        raise FFLError(f"n must be at least 1, got {n}")
    lo, hi = weight_range
    if not 0 < lo <= hi:
        raise FFLError(f"weight range must satisfy 0 < lo <= hi, got [{lo}, {hi}]")
    if distribution not in DISTRIBUTIONS:
        raise FFLError(f"unknown distribution {distribution!r}")
    if clusters < 1:
        raise FFLError("clusters must be at least 1")
    rng = np.random.default_rng(seed)
    if distribution == "uniform":
        xy = rng.uniform(-extent, extent, (n, 2))
    else:
        centers = rng.uniform(-extent, extent, (clusters, 2))
        labels = np.arange(n) % clusters
        xy = centers[labels] + rng.normal(0.0, extent / (8 * clusters), (n, 2))
    if integer:
        xy = np.round(xy)
        w = rng.integers(math.ceil(lo), math.floor(hi) + 1, n).astype(float) if math.ceil(lo) <= hi else np.full(n, lo)
    else:
        xy = np.round(xy, 6)
        w = np.round(rng.uniform(lo, hi, n), 6)
        w = np.clip(w, lo, hi)
    return Instance.from_arrays(xy + 0.0, v, w)


def loglog_slope(sizes: Sequence[float], times: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(time) against log(n); None for fewer than two sizes."""
    if len(sizes) < 2:
        return None
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


def run_bench(sizes, repeats: int = 3, v: float = 2.0, seed: int = 0, mode: str = "auto", threads=None):
    """Median wall time per size and the fitted log-log slope."""
    if list(sizes) != sorted(sizes):
        raise FFLError("sizes must be sorted ascending")
    if repeats < 1:
        raise FFLError("repeats must be at least 1")
    # compile and load the kernels before timing anything
    solve(generate_instance(3, seed=seed, v=v), mode, threads=threads)
    rows = []
    for n in sizes:
        inst = generate_instance(n, seed=seed + n, v=v)
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            sol = solve(inst, mode, threads=threads)
            times.append(time.perf_counter() - t0)
        rows.append({"n": n, "median_s": statistics.median(times), "objective": sol.objective})
    slope = loglog_slope([r["n"] for r in rows], [r["median_s"] for r in rows])
    return rows, slope
