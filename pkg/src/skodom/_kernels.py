"""Compiled inner loops for the Brownian path simulations.

Each kernel advances one path through a block of standard normals and
returns 1 once the path has exited, 0 if the block ran out first.  The
caller keeps the path state between blocks.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# state slots
X, Y, T, STEPS, EDGE, FRAC = 0, 1, 2, 3, 4, 5
STATE_SIZE = 6


@njit(cache=True, nogil=True)
def _lerp_table(table, u0, du, x, y):
    """Bilinear lookup of a polar table indexed by u = -log(1 - r) and angle."""
    nr, m = table.shape
    r = math.sqrt(x * x + y * y)
    u = -math.log1p(-r)
    fu = (u - u0) / du
    if fu < 0.0:
        fu = 0.0
    i = int(fu)
    if i >= nr - 1:
        i = nr - 2
        fu = float(nr - 1)
    wu = fu - i
    th = math.atan2(y, x)
    ft = th * m / (2.0 * math.pi)
    if ft < 0.0:
        ft += m
    j = int(ft)
    wt = ft - j
    j %= m
    j1 = (j + 1) % m
    lo = table[i, j] + wt * (table[i, j1] - table[i, j])
    hi = table[i + 1, j] + wt * (table[i + 1, j1] - table[i + 1, j])
    return lo + wu * (hi - lo)


@njit(cache=True, nogil=True)
def disc_advance(state, normals, dt, stop_radius, table, u0, du):
    sq = math.sqrt(dt)
    stop2 = stop_radius * stop_radius
    x, y, t = state[X], state[Y], state[T]
    steps = state[STEPS]
    for k in range(normals.shape[0] // 2):
        t += _lerp_table(table, u0, du, x, y) * dt
        x += sq * normals[2 * k]
        y += sq * normals[2 * k + 1]
        steps += 1.0
        if x * x + y * y >= stop2:
            state[X], state[Y], state[T], state[STEPS] = x, y, t, steps
            return 1
    state[X], state[Y], state[T], state[STEPS] = x, y, t, steps
    return 0


@njit(cache=True, nogil=True)
def _seg_dist(px, py, ax, ay, bx, by):
    ex = bx - ax
    ey = by - ay
    ll = ex * ex + ey * ey
    s = 0.0
    if ll > 0.0:
        s = ((px - ax) * ex + (py - ay) * ey) / ll
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
    dx = px - (ax + s * ex)
    dy = py - (ay + s * ey)
    return math.sqrt(dx * dx + dy * dy)


@njit(cache=True, nogil=True)
def _crossing(px, py, qx, qy, ax, ay, bx, by):
    """Parameter along p->q where it meets a->b, or -1."""
    rx = qx - px
    ry = qy - py
    sx = bx - ax
    sy = by - ay
    den = rx * sy - ry * sx
    if den == 0.0:
        return -1.0
    wx = ax - px
    wy = ay - py
    t = (wx * sy - wy * sx) / den
    u = (wx * ry - wy * rx) / den
    if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
        return t
    return -1.0


@njit(cache=True, nogil=True)
def _cell(px, py, x0, y0, size, nx, ny):
    i = int((px - x0) / size)
    j = int((py - y0) / size)
    if i < 0 or j < 0 or i >= nx or j >= ny:
        return -1
    return j * nx + i


@njit(cache=True, nogil=True)
def domain_advance(state, normals, dt, dt_floor, edges, x0, y0, size, nx, ny,
                   cell_start, cell_edges, margin):
    """Euler steps inside a polygon, shrinking the step near the boundary.

    ``cell_edges`` lists, per grid cell, every edge within ``margin`` of the
    cell, so the distance found there is exact whenever it is below
    ``margin`` and ``margin`` is a valid lower bound otherwise.
    """
    ne = edges.shape[0]
    x, y, t = state[X], state[Y], state[T]
    steps = state[STEPS]
    for k in range(normals.shape[0] // 2):
        c = _cell(x, y, x0, y0, size, nx, ny)
        d = margin
        if c >= 0:
            for e in range(cell_start[c], cell_start[c + 1]):
                ed = cell_edges[e]
                dd = _seg_dist(x, y, edges[ed, 0], edges[ed, 1], edges[ed, 2], edges[ed, 3])
                if dd < d:
                    d = dd
        else:
            d = 0.0
        h = d * d / 16.0
        if h > dt:
            h = dt
        if h < dt_floor:
            h = dt_floor
        sq = math.sqrt(h)
        qx = x + sq * normals[2 * k]
        qy = y + sq * normals[2 * k + 1]
        steps += 1.0
        length = math.sqrt((qx - x) ** 2 + (qy - y) ** 2)
        if length >= d:
            best = 2.0
            hit = -1
            if length < margin and c >= 0:
                for e in range(cell_start[c], cell_start[c + 1]):
                    ed = cell_edges[e]
                    s = _crossing(x, y, qx, qy, edges[ed, 0], edges[ed, 1], edges[ed, 2], edges[ed, 3])
                    if s >= 0.0 and s < best:
                        best = s
                        hit = ed
            else:
                for ed in range(ne):
                    s = _crossing(x, y, qx, qy, edges[ed, 0], edges[ed, 1], edges[ed, 2], edges[ed, 3])
                    if s >= 0.0 and s < best:
                        best = s
                        hit = ed
            if hit >= 0:
                state[X] = x + best * (qx - x)
                state[Y] = y + best * (qy - y)
                state[T] = t + best * h
                state[STEPS] = steps
                state[EDGE] = hit
                state[FRAC] = best
                return 1
        x = qx
        y = qy
        t += h
    state[X], state[Y], state[T], state[STEPS] = x, y, t, steps
    return 0


@njit(cache=True, nogil=True)
def _near_cells(edges, e, x0, y0, size, nx, ny, margin, counts, items, fill, count_only):
    lo_x = min(edges[e, 0], edges[e, 2]) - margin
    hi_x = max(edges[e, 0], edges[e, 2]) + margin
    lo_y = min(edges[e, 1], edges[e, 3]) - margin
    hi_y = max(edges[e, 1], edges[e, 3]) + margin
    i0 = max(0, int((lo_x - x0) / size))
    i1 = min(nx - 1, int((hi_x - x0) / size))
    j0 = max(0, int((lo_y - y0) / size))
    j1 = min(ny - 1, int((hi_y - y0) / size))
    half_diag = 0.7072 * size
    for j in range(j0, j1 + 1):
        for i in range(i0, i1 + 1):
            # centre distance minus half the diagonal bounds the cell distance
            hx = x0 + (i + 0.5) * size
            hy = y0 + (j + 0.5) * size
            if _seg_dist(hx, hy, edges[e, 0], edges[e, 1], edges[e, 2], edges[e, 3]) > margin + half_diag:
                continue
            c = j * nx + i
            if count_only:
                counts[c] += 1
            else:
                items[fill[c]] = e
                fill[c] += 1


@njit(cache=True)
def build_edge_grid(edges, x0, y0, size, nx, ny, margin):
    """CSR map from grid cell to the edges within ``margin`` of it."""
    ne = edges.shape[0]
    counts = np.zeros(nx * ny, dtype=np.int64)
    dummy = np.empty(0, dtype=np.int64)
    for e in range(ne):
        _near_cells(edges, e, x0, y0, size, nx, ny, margin, counts, dummy, dummy, True)
    starts = np.zeros(nx * ny + 1, dtype=np.int64)
    for c in range(nx * ny):
        starts[c + 1] = starts[c] + counts[c]
    fill = starts[:-1].copy()
    items = np.empty(starts[-1], dtype=np.int64)
    for e in range(ne):
        _near_cells(edges, e, x0, y0, size, nx, ny, margin, counts, items, fill, False)
    return starts, items
