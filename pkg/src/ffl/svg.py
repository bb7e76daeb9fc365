"""Plain SVG 1.1 drawing of a solution.

One polyline per demand point (colored by path shape), one circle per point
(radius grows with weight), the highway cover segment and a cross for the
facility.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import quoteattr

from .geometry import Instance, Shape
from .solver import Solution

COLORS = {Shape.DIRECT: "#7f7f7f", Shape.VERTICAL: "#1f77b4", Shape.HORIZONTAL: "#d62728"}


def _path_points(p, shape, f):
    if shape.kind is Shape.DIRECT:
        # any monotone staircase is a shortest L1 path; draw the one turning at (f.x, p.y)
        return [(p.x, p.y), (f[0], p.y), f]
    return [(p.x, p.y), shape.entry, f]


def render_svg(solution: Solution, instance: Instance, size: int = 600) -> str:
    f = solution.facility
    a, b = solution.cover_segment
    xs = [p.x for p in instance.points] + [f[0], a[0], b[0]]
    ys = [p.y for p in instance.points] + [f[1], a[1], b[1]]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    pad = 0.08 * span + 1e-9
    scale = size / (span + 2 * pad)

    def tx(x, y):
        return (x - lo_x + pad) * scale, (hi_y - y + pad) * scale

    wmax = max(p.w for p in instance.points)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<title>objective {solution.objective:.10g}</title>',
        '<g id="paths" fill="none" stroke-width="1.5">',
    ]
    for i, (p, shape) in enumerate(zip(instance.points, solution.assignments)):
        pts = " ".join("{:.4f},{:.4f}".format(*tx(*q)) for q in _path_points(p, shape, f))
        out.append(
            f'<polyline class={quoteattr(shape.kind.value)} data-index="{i}" '
            f'stroke="{COLORS[shape.kind]}" points="{pts}"/>'
        )
    out.append("</g>")
    out.append('<g id="points" fill="#000000">')
    for i, p in enumerate(instance.points):
        cx, cy = tx(p.x, p.y)
        r = 2.0 + 6.0 * math.sqrt(p.w / wmax)
        out.append(f'<circle data-index="{i}" data-w="{p.w!r}" cx="{cx:.4f}" cy="{cy:.4f}" r="{r:.3f}"/>')
    out.append("</g>")
    (ax, ay), (bx, by) = tx(*a), tx(*b)
    out.append(
        f'<line id="highway" x1="{ax:.4f}" y1="{ay:.4f}" x2="{bx:.4f}" y2="{by:.4f}" '
        'stroke="#2ca02c" stroke-width="4" stroke-linecap="round"/>'
    )
    fx, fy = tx(*f)
    k = 7.0
    out.append(
        f'<path id="facility" d="M {fx - k:.4f} {fy - k:.4f} L {fx + k:.4f} {fy + k:.4f} '
        f'M {fx - k:.4f} {fy + k:.4f} L {fx + k:.4f} {fy - k:.4f}" stroke="#000000" stroke-width="2.5"/>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
