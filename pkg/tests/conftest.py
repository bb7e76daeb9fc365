import math

import numpy as np
import pytest

from ffl.geometry import Instance
from ffl.io import report_problems, solution_report
from ffl.solver import check_solution, solve

SPEEDS = (1.04, 1.2, 1.5, 2.0, 4.0)


def checked_solve(instance, mode="auto", **kw):
    """Solve and assert the structural invariants every returned solution must meet."""
    sol = solve(instance, mode, **kw)
    problems = check_solution(sol, instance)
    assert not problems, problems
    rep = solution_report(sol, instance)
    bad = report_problems(rep)
    assert not bad, bad
    return sol


def random_instance(rng, n=None, v=None, lo=-10, hi=10, integer=True):
    if n is None:
        n = int(rng.integers(2, 9))
    if v is None:
        v = float(rng.choice(SPEEDS))
    if integer:
        xy = rng.integers(lo, hi + 1, (n, 2)).astype(float)
        w = rng.integers(1, 6, n).astype(float)
    else:
        xy = rng.uniform(lo, hi, (n, 2))
        w = rng.uniform(1, 5, n)
    return Instance.from_arrays(xy, v, w)


COLLINEAR = Instance.from_arrays([(0, 0), (4, 0), (10, 0)], 2.0)
SQUARE = Instance.from_arrays([(1, 1), (1, -1), (-1, 1), (-1, -1)], 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def square_lower_bound(v=2.0, samples=200_001):
    """Analytic lower bound for the square-corner instance.

    The time metric is a metric (rides can be concatenated), so the objective
    is at least d(a, c) + d(b, d) for the two diagonal pairs.  For a line at
    angle theta a pair costs at least min over ride lengths L of
    |delta - L u|_1 + |L|/v, a convex piecewise-linear function whose minimum
    sits at L in {0, delta_x/cos, delta_y/sin}.  Minimizing over theta gives
    4 + sqrt(2) at theta = pi/4.
    """
    th = np.linspace(0.0, math.pi, samples)
    c, s = np.cos(th), np.sin(th)

    def pair(dx, dy):
        best = np.full_like(th, abs(dx) + abs(dy))
        with np.errstate(divide="ignore", invalid="ignore"):
            for L in (dx / c, dy / s):
                val = np.abs(dx - L * c) + np.abs(dy - L * s) + np.abs(L) / v
                best = np.minimum(best, np.where(np.isfinite(val), val, np.inf))
        return best

    return float(np.min(pair(2.0, 2.0) + pair(2.0, -2.0)))
