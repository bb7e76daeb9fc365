"""Compiled scalar kernels shared by the objective forms and the sweep solver.

Angles inside a sweep are carried as ``t = tan(alpha)`` in ``[0, 1]``: every
event is a ratio of coordinate differences, so sorting by ``t`` avoids trig
calls.  A sweep row is ``(ax, ay, fx0, fy0, mx, my)``: the highway pivots
about ``(ax, ay)`` and the facility sits at
``(fx0 + mx/t, fy0 + my*t)``.
"""

import math

import numpy as np
from numba import njit

EPS = 1e-9

FRACTIONS = np.unique(np.concatenate([np.linspace(0.0, 1.0, 65), np.geomspace(1e-12, 1 / 128, 12)]))


@njit(cache=True, nogil=True, error_model="numpy")
def piece_coef(px, py, w, ax, ay, fx0, fy0, mx, my, t, low, v):
    """Form coefficients of one point on a piece of the sweep containing ``t``."""
    fx = fx0 + (mx / t if mx != 0.0 else 0.0)
    fy = fy0 + my * t
    dx = px - fx
    dy = py - fy
    side = py - (ay + (px - ax) * t)
    tol = EPS * max(1.0, abs(px) + abs(py) + abs(fx) + abs(fy))
    s1 = (dx <= 0.0 and dy >= 0.0) or (dx >= 0.0 and dy <= 0.0)
    s2 = (not s1) and ((dx < 0.0 and side <= tol) or (dx > 0.0 and side >= -tol))
    sx = 1.0 if dx > 0 else (-1.0 if dx < 0 else 0.0)
    sy = 1.0 if dy > 0 else (-1.0 if dy < 0 else 0.0)
    a0 = sx * (px - fx0)  # |dx| = a0 + a2 cot
    a2 = -sx * mx
    b0 = sy * (py - fy0)  # |dy| = b0 + b1 tan
    b1 = -sy * my
    if s2:
        c = (b0 - a2, b1 - a0, 0.0, a0 / v, a2 / v)
    elif low:
        if s1:
            c = (b0 + a2, b1 + a0, 0.0, a0 / v, a2 / v)
        else:
            c = (a2 - b0, a0 - b1, 0.0, a0 / v, a2 / v)
    elif s1:
        c = (a0 + b0, b1, a2, 0.0, 0.0)
    else:
        c = (a0 - b1, 0.0, a2 - b0, b1 / v, b0 / v)
    return (w * c[0], w * c[1], w * c[2], w * c[3], w * c[4])


@njit(cache=True, nogil=True, error_model="numpy")
def point_events(px, py, ax, ay, fx0, fy0, mx, my, tl, th, out):
    """Write the sorted tan-angles strictly inside ``(tl, th)`` where this point's formula may change.

    Highway crossing the point, facility crossing the point's vertical grid
    line, facility crossing its horizontal grid line.  Returns the count.
    """
    k = 0
    ddx = px - ax
    if ddx != 0.0:
        s = (py - ay) / ddx
        if tl < s < th:
            out[k] = s
            k += 1
    if mx != 0.0 and px != fx0:
        c = (px - fx0) / mx
        if c > 0.0:
            s = 1.0 / c
            if tl < s < th:
                out[k] = s
                k += 1
    if my != 0.0:
        s = (py - fy0) / my
        if tl < s < th:
            out[k] = s
            k += 1
    for i in range(1, k):
        j = i
        while j > 0 and out[j - 1] > out[j]:
            out[j - 1], out[j] = out[j], out[j - 1]
            j -= 1
    return k


@njit(cache=True, nogil=True, error_model="numpy")
def value_t(c, t):
    """Form value at ``t = tan(alpha)``; ``t == 0`` takes the one-sided limit."""
    if t <= 0.0:
        s = c[2] + c[4]
        lim = math.inf if s > 0 else (-math.inf if s < 0 else 0.0)
        return c[0] + c[3] + lim
    sec = math.sqrt(1.0 + t * t)
    return c[0] + c[1] * t + c[2] / t + c[3] * sec + c[4] * sec / t


@njit(cache=True, nogil=True, error_model="numpy")
def deriv_alpha(c, a):
    s = math.sin(a)
    co = math.cos(a)
    if s <= 0.0:
        tot = c[2] + c[4]
        if tot > 0:
            return -math.inf
        if tot < 0:
            return math.inf
        return c[1]
    return c[1] / (co * co) - c[2] / (s * s) + c[3] * s / (co * co) - c[4] * co / (s * s)


@njit(cache=True, nogil=True, error_model="numpy")
def _bound(c, tl, tr, sl, sr):
    lb = c[0]
    lb += min(c[1] * tl, c[1] * tr)
    lb += min(c[3] * sl, c[3] * sr)
    if tl > 0.0:
        lb += min(c[2] / tl, c[2] / tr) + min(c[4] * sl / tl, c[4] * sr / tr)
    else:
        if c[2] < 0 or c[4] < 0:
            return -math.inf
        lb += c[2] / tr + c[4] * sr / tr
    return lb


@njit(cache=True, nogil=True, error_model="numpy")
def lower_bound(c, tl, tr):
    """Lower bound of the form on ``[tl, tr]``: each trig term is monotone there."""
    return _bound(c, tl, tr, math.sqrt(1.0 + tl * tl), math.sqrt(1.0 + tr * tr))


@njit(cache=True, nogil=True, error_model="numpy")
def interior_minima(c, al, ar, fractions, roots):
    """Local minima of the form inside ``[al, ar]`` (in radians); returns the count.

    Sign changes of the derivative are bracketed on ``fractions`` of the
    interval and bisected to 1e-12.
    """
    k = 0
    prev_a = al
    prev_d = deriv_alpha(c, al)
    for j in range(1, fractions.size):
        a = al + (ar - al) * fractions[j]
        if j == fractions.size - 1:
            a = ar
        d = deriv_alpha(c, a)
        if prev_d < 0.0 and d >= 0.0:
            lo, hi = prev_a, a
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                if deriv_alpha(c, mid) < 0.0:
                    lo = mid
                else:
                    hi = mid
            if k < roots.size:
                roots[k] = 0.5 * (lo + hi)
                k += 1
        prev_a, prev_d = a, d
    return k


@njit(cache=True, nogil=True, error_model="numpy")
def minimize_interval(c, al, ar, fractions):
    """``(alpha, value)`` minimizing the form on ``[al, ar]``; ties go to the smaller angle."""
    roots = np.empty(fractions.size)
    best_a = al
    best_v = value_t(c, math.tan(al))
    vr = value_t(c, math.tan(ar))
    k = interior_minima(c, al, ar, fractions, roots) if ar > al else 0
    cand_a = np.empty(k + 1)
    cand_v = np.empty(k + 1)
    cand_a[0] = ar
    cand_v[0] = vr
    for i in range(k):
        cand_a[i + 1] = roots[i]
        cand_v[i + 1] = value_t(c, math.tan(roots[i]))
    for i in range(k + 1):
        slack = 1e-12 * (1.0 + abs(best_v)) if math.isfinite(best_v) else 0.0
        if cand_v[i] < best_v - slack or (cand_v[i] <= best_v + slack and cand_a[i] < best_a):
            best_a, best_v = cand_a[i], cand_v[i]
    return best_a, best_v


@njit(cache=True, nogil=True, error_model="numpy")
def row_intervals(px, py, w, row, tl, th, t_phi, v, ev_t, ev_c, base):
    """Events of one sweep row on ``[tl, th]``, unsorted.

    Pieces left of ``t_phi`` use the low-angle regime.  Fills ``base`` with
    the coefficients right after ``tl`` and ``ev_t``/``ev_c`` with event
    positions and coefficient jumps; the regime switch becomes a single
    aggregated event.  Returns the event count.
    """
    ax, ay, fx0, fy0, mx, my = row[0], row[1], row[2], row[3], row[4], row[5]
    split = tl < t_phi < th
    for q in range(5):
        base[q] = 0.0
    buf = np.empty(4)
    m = 0
    jump = np.zeros(5)
    for i in range(px.size):
        k = point_events(px[i], py[i], ax, ay, fx0, fy0, mx, my, tl, th, buf)
        mark = -1
        if split:
            # slot the regime switch into this point's sorted breakpoints
            j = k
            while j > 0 and buf[j - 1] > t_phi:
                buf[j] = buf[j - 1]
                j -= 1
            buf[j] = t_phi
            mark = j
            k += 1
        left = tl
        right = buf[0] if k > 0 else th
        prev = piece_coef(px[i], py[i], w[i], ax, ay, fx0, fy0, mx, my, 0.5 * (left + right), left < t_phi, v)
        for q in range(5):
            base[q] += prev[q]
        for j in range(k):
            left = buf[j]
            right = buf[j + 1] if j + 1 < k else th
            cur = piece_coef(px[i], py[i], w[i], ax, ay, fx0, fy0, mx, my, 0.5 * (left + right), left < t_phi, v)
            if j == mark:
                for q in range(5):
                    jump[q] += cur[q] - prev[q]
            else:
                ev_t[m] = buf[j]
                for q in range(5):
                    ev_c[m, q] = cur[q] - prev[q]
                m += 1
            prev = cur
    if split:
        ev_t[m] = t_phi
        for q in range(5):
            ev_c[m, q] = jump[q]
        m += 1
    return m


@njit(cache=True, nogil=True, error_model="numpy")
def row_forms(px, py, w, row, tl, th, t_phi, v):
    """Sorted interval boundaries and per-interval coefficients for one row."""
    n = px.size
    ev_t = np.empty(3 * n + 1)
    ev_c = np.empty((3 * n + 1, 5))
    base = np.empty(5)
    m = row_intervals(px, py, w, row, tl, th, t_phi, v, ev_t, ev_c, base)
    order = np.argsort(ev_t[:m])
    bounds = np.empty(m + 2)
    coefs = np.empty((m + 1, 5))
    bounds[0] = tl
    bounds[m + 1] = th
    cur = base.copy()
    coefs[0] = cur
    for j in range(m):
        k = order[j]
        bounds[j + 1] = ev_t[k]
        for q in range(5):
            cur[q] += ev_c[k, q]
        coefs[j + 1] = cur
    return bounds, coefs


@njit(cache=True, nogil=True, error_model="numpy")
def _facility(row, t):
    fx = row[2] + (row[4] / t if row[4] != 0.0 else 0.0)
    return fx, row[3] + row[5] * t


@njit(cache=True, nogil=True, error_model="numpy")
def _to_input(frame, x, y):
    if frame == 0:
        return x, y
    if frame == 1:
        return y, x
    if frame == 2:
        return -x, y
    return -y, x


@njit(cache=True, nogil=True, error_model="numpy")
def _key_less(a1, x1, y1, a2, x2, y2):
    if a1 != a2:
        return a1 < a2
    if x1 != x2:
        return x1 < x2
    return y1 < y2


@njit(cache=True, nogil=True, error_model="numpy")
def sweep(px, py, w, rows, t_lo, t_phi, v, frame, fractions, prune, state):
    """Minimize the objective over every row and angle; best candidate goes to ``state``.

    Row ``r`` is swept over ``tan(alpha)`` in ``[t_lo[r], 1]``.  ``state`` is
    ``[value, alpha, row, fx, fy, running_min]`` in input-frame facility
    coordinates.  Near-ties (1e-9 relative) keep the smallest
    ``(alpha, fx, fy)``.  With ``prune`` an interval is skipped when its lower
    bound is worse than the running minimum by more than the tie tolerance.
    The objective is continuous in the angle, so each breakpoint is offered
    once, with the coefficients of the interval to its right.
    """
    n = px.size
    ev_t = np.empty(3 * n + 1)
    ev_c = np.empty((3 * n + 1, 5))
    base = np.empty(5)
    cur = np.empty(5)
    roots = np.empty(fractions.size)
    for r in range(rows.shape[0]):
        row = rows[r]
        tl, th = t_lo[r], 1.0
        if th < tl:
            continue
        m = row_intervals(px, py, w, row, tl, th, t_phi, v, ev_t, ev_c, base)
        order = np.argsort(ev_t[:m])
        for q in range(5):
            cur[q] = base[q]
        left = tl
        sec_l = math.sqrt(1.0 + left * left)
        for j in range(m + 1):
            right = ev_t[order[j]] if j < m else th
            sec_r = math.sqrt(1.0 + right * right)
            keep = True
            if prune:
                # the bound covers the endpoints too, so a pruned interval offers nothing
                tol = EPS * max(1.0, abs(state[5])) if math.isfinite(state[5]) else math.inf
                keep = _bound(cur, left, right, sec_l, sec_r) <= state[5] + tol
            if keep:
                _offer(state, value_t(cur, left), left, -1.0, r, row, frame)
                if right > left:
                    k = interior_minima(cur, math.atan(left), math.atan(right), fractions, roots)
                    for i in range(k):
                        tr = math.tan(roots[i])
                        _offer(state, value_t(cur, tr), tr, roots[i], r, row, frame)
                if j == m:
                    _offer(state, value_t(cur, th), th, -1.0, r, row, frame)
            if j < m:
                kk = order[j]
                for q in range(5):
                    cur[q] += ev_c[kk, q]
                left = right
                sec_l = sec_r
    return state


@njit(cache=True, nogil=True, error_model="numpy")
def _offer(state, val, t, alpha, r, row, frame):
    if not (val == val) or val == math.inf:
        return
    if val < state[5]:
        state[5] = val
    tol = EPS * max(1.0, abs(state[5]))
    if val > state[5] + tol:
        return
    if alpha < 0.0:
        alpha = math.atan(t)
    if t <= 0.0 and row[4] != 0.0:
        return
    fx, fy = _facility(row, t)
    fx, fy = _to_input(frame, fx, fy)
    if state[0] > state[5] + tol or _key_less(alpha, fx, fy, state[1], state[3], state[4]):
        state[0] = val
        state[1] = alpha
        state[2] = r
        state[3] = fx
        state[4] = fy
