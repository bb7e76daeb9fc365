"""Matplotlib figures: a solution drawing and the benchmark scaling plot."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .geometry import Instance, Shape  # noqa: E402
from .solver import Solution  # noqa: E402
from .svg import COLORS, _path_points  # noqa: E402


def plot_solution(solution: Solution, instance: Instance, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    f = solution.facility
    for p, shape in zip(instance.points, solution.assignments):
        q = _path_points(p, shape, f)
        ax.plot([x for x, _ in q], [y for _, y in q], color=COLORS[shape.kind], lw=1.2)
    wmax = max(p.w for p in instance.points)
    ax.scatter([p.x for p in instance.points], [p.y for p in instance.points],
               s=[20 + 80 * p.w / wmax for p in instance.points], color="black", zorder=3)
    a, b = solution.cover_segment
    ax.plot([a[0], b[0]], [a[1], b[1]], color="#2ca02c", lw=4, solid_capstyle="round", label="highway")
    ax.plot([f[0]], [f[1]], marker="x", color="black", ms=12, mew=3, zorder=4, label="facility")
    for kind in Shape:
        ax.plot([], [], color=COLORS[kind], label=kind.value)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(f"objective {solution.objective:.6g}, angle {math.degrees(solution.angle):.3f} deg")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_scaling(sizes, times, slope, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(sizes, times, "o-", label="median wall time")
    if slope is not None and len(sizes) > 1:
        ref = [times[0] * (n / sizes[0]) ** 3 for n in sizes]
        ax.loglog(sizes, ref, "--", color="gray", label="n^3 reference")
        ax.set_title(f"fitted slope {slope:.2f}")
    ax.set_xlabel("n")
    ax.set_ylabel("seconds")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
