"""Single SVG emitter for traced boundaries."""

from __future__ import annotations

import math
import re

import numpy as np

from .conformal import BoundaryCurve

__all__ = ["render_svg", "read_polylines", "curve_distance"]

SIZE = 800
PAD = 40


def _runs(mask: np.ndarray):
    """Maximal [start, stop) index runs where ``mask`` is true."""
    edges = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    return list(zip(np.nonzero(edges == 1)[0], np.nonzero(edges == -1)[0]))


def render_svg(curve: BoundaryCurve, title: str | None = None) -> str:
    """Boundary as polylines, start point as a dot, diverged runs as vertical rays.

    The frame is the bounding box of the finite samples, scaled uniformly
    into a fixed 800x800 viewBox.  Rays are clipped at the frame edge and end
    in arrowheads.
    """
    good = curve.good & np.isfinite(curve.x) & np.isfinite(curve.y)
    gx, gy = curve.x[good], curve.y[good]
    sx, sy = curve.start
    lo_x, hi_x = min(gx.min(), sx), max(gx.max(), sx)
    lo_y, hi_y = min(gy.min(), sy), max(gy.max(), sy)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12)
    scale = (SIZE - 2 * PAD) / span
    cx, cy = 0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)

    def px(x):
        return SIZE / 2 + (x - cx) * scale

    def py(y):
        return SIZE / 2 - (y - cy) * scale

    def pts(i0, i1):
        return " ".join(f"{px(x):.3f},{py(y):.3f}" for x, y in zip(curve.x[i0:i1], curve.y[i0:i1]))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" '
           f'width="{SIZE}" height="{SIZE}">',
           '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" '
           'markerHeight="6" orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" '
           'fill="#b03030"/></marker></defs>',
           f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>']
    if title:
        out.append(f'<title>{title}</title>')
    for i0, i1 in _runs(good):
        if i1 - i0 >= 2:
            out.append(f'<polyline class="boundary" fill="none" stroke="black" '
                       f'stroke-width="1.5" points="{pts(i0, i1)}"/>')
    n = curve.theta.size
    for i0, i1 in _runs(~good):
        # upper half-plane for theta < 0, lower for theta > 0
        top = curve.theta[i0] < 0
        edge_y = 0.0 if top else float(SIZE)
        for k in (i0 - 1, i1):
            if 0 <= k < n and good[k]:
                x0, y0 = px(curve.x[k]), py(curve.y[k])
                out.append(f'<line class="ray" x1="{x0:.3f}" y1="{y0:.3f}" x2="{x0:.3f}" '
                           f'y2="{edge_y:.3f}" stroke="#b03030" stroke-width="1" '
                           f'marker-end="url(#arrow)"/>')
    out.append(f'<circle class="start" cx="{px(sx):.3f}" cy="{py(sy):.3f}" r="4" fill="#2050c0"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


_POLY = re.compile(r'<polyline[^>]*points="([^"]*)"')


def read_polylines(svg_text: str) -> list[np.ndarray]:
    """Polyline vertices scaled to the unit square."""
    lines = []
    for m in _POLY.finditer(svg_text):
        pairs = [p.split(",") for p in m.group(1).split()]
        lines.append(np.array(pairs, dtype=float) / SIZE)
    return lines


def _segments_of(lines: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    a = np.vstack([ln[:-1] if len(ln) > 1 else ln for ln in lines])
    b = np.vstack([ln[1:] if len(ln) > 1 else ln for ln in lines])
    return a, b


def _one_way(points: np.ndarray, lines: list[np.ndarray], chunk: int = 256) -> float:
    """Largest distance from a point to the nearest segment of ``lines``."""
    a, b = _segments_of(lines)
    e = b - a
    ll = np.einsum("ij,ij->i", e, e)
    safe = np.where(ll > 0, ll, 1.0)
    worst = 0.0
    for s in range(0, len(points), chunk):
        p = points[s:s + chunk, None, :]
        t = np.clip(np.einsum("kij,ij->ki", p - a, e) / safe, 0.0, 1.0)
        t = np.where(ll > 0, t, 0.0)
        d = p - (a + t[..., None] * e)
        worst = max(worst, float(np.sqrt(np.einsum("kij,kij->ki", d, d).min(axis=1)).max()))
    return worst


def curve_distance(svg_a: str, svg_b: str) -> float:
    """Symmetric max distance between the boundary polylines of two SVGs."""
    la, lb = read_polylines(svg_a), read_polylines(svg_b)
    if not la or not lb:
        return math.inf
    return max(_one_way(np.vstack(la), lb), _one_way(np.vstack(lb), la))
