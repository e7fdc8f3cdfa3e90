"""Planar segment predicates shared by the curve and polygon code."""

from __future__ import annotations

import numpy as np

NONE, CROSS, TOUCH, COLLINEAR, VERTEX = 0, 1, 2, 3, 4


def orient(ax, ay, bx, by, cx, cy):
    """Twice the signed area of (a, b, c); positive for a left turn."""
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, cx, cy):
    # c assumed collinear with a-b
    return ((np.minimum(ax, bx) <= cx) & (cx <= np.maximum(ax, bx))
            & (np.minimum(ay, by) <= cy) & (cy <= np.maximum(ay, by)))


def classify(p, q, P, Q) -> np.ndarray:
    """Contact type between segment p-q and each segment P[i]-Q[i].

    CROSS: proper crossing.  COLLINEAR: overlap or touch along a common line.
    VERTEX: the segments only meet at an endpoint of both.  TOUCH: an
    endpoint of one lies inside the other.
    """
    ax, ay = p
    bx, by = q
    cx, cy = P[:, 0], P[:, 1]
    dx, dy = Q[:, 0], Q[:, 1]
    o1 = orient(ax, ay, bx, by, cx, cy)
    o2 = orient(ax, ay, bx, by, dx, dy)
    o3 = orient(cx, cy, dx, dy, ax, ay)
    o4 = orient(cx, cy, dx, dy, bx, by)

    out = np.full(P.shape[0], NONE, dtype=np.int8)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    out[proper] = CROSS

    c_on = (o1 == 0) & _on_segment(ax, ay, bx, by, cx, cy)
    d_on = (o2 == 0) & _on_segment(ax, ay, bx, by, dx, dy)
    a_on = (o3 == 0) & _on_segment(cx, cy, dx, dy, ax, ay)
    b_on = (o4 == 0) & _on_segment(cx, cy, dx, dy, bx, by)
    contact = ~proper & (c_on | d_on | a_on | b_on)

    collinear = (o1 == 0) & (o2 == 0)
    shared = (((cx == ax) & (cy == ay)) | ((cx == bx) & (cy == by))
              | ((dx == ax) & (dy == ay)) | ((dx == bx) & (dy == by)))
    n_contacts = (c_on.astype(int) + d_on + a_on + b_on)
    vertex_only = shared & (n_contacts == 2)

    out[contact & collinear] = COLLINEAR
    out[contact & ~collinear & vertex_only] = VERTEX
    out[contact & ~collinear & ~vertex_only] = TOUCH
    return out


def first_self_contact(start: np.ndarray, end: np.ndarray, v0: np.ndarray, v1: np.ndarray,
                       allow_slits: bool = False):
    """Sweep segments by x and report the first forbidden contact.

    ``v0``/``v1`` are vertex ids; segments sharing an id are neighbours and
    never tested.  With ``allow_slits`` collinear overlaps and vertex-to-vertex
    contacts (zero-width spikes) are tolerated.  Returns ``None`` or
    ``(i, j, kind)``.  Cost is O(S log S) for the sort plus the size of the
    active set at each insertion.
    """
    s = start.shape[0]
    if s < 2:
        return None
    xmin = np.minimum(start[:, 0], end[:, 0])
    xmax = np.maximum(start[:, 0], end[:, 0])
    ymin = np.minimum(start[:, 1], end[:, 1])
    ymax = np.maximum(start[:, 1], end[:, 1])
    order = np.argsort(xmin, kind="stable")

    forbidden = (CROSS, TOUCH) if allow_slits else (CROSS, TOUCH, COLLINEAR, VERTEX)
    active = np.empty(0, dtype=np.int64)
    for i in order:
        if active.size:
            active = active[xmax[active] >= xmin[i]]
        if active.size:
            cand = active[(ymax[active] >= ymin[i]) & (ymin[active] <= ymax[i])]
            cand = cand[(v0[cand] != v0[i]) & (v0[cand] != v1[i])
                        & (v1[cand] != v0[i]) & (v1[cand] != v1[i])]
            if cand.size:
                kinds = classify(start[i], end[i], start[cand], end[cand])
                bad = np.isin(kinds, forbidden)
                if np.any(bad):
                    k = int(np.argmax(bad))
                    j = int(cand[k])
                    return (min(int(i), j), max(int(i), j), int(kinds[k]))
        active = np.append(active, i)
    return None


def point_segment_distance(px, py, ax, ay, bx, by):
    """Distance from points (px, py) to segments a-b, broadcasting."""
    ex, ey = bx - ax, by - ay
    ll = ex * ex + ey * ey
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(ll > 0, ((px - ax) * ex + (py - ay) * ey) / ll, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(px - (ax + t * ex), py - (ay + t * ey))
