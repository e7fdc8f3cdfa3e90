"""Polygonal stand-in for the domain, with membership and distance queries."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _segments
from .conformal import BoundaryCurve, RayTipSet
from .distributions import Distribution

__all__ = [
    "RegionPolygon",
    "GeometryError",
    "default_y_max",
    "polygonize",
    "contains",
    "boundary_distance",
    "polygon_area",
    "save_polygon",
    "load_polygon",
]

BOUNDARY_TOL = 1e-12


class GeometryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RegionPolygon:
    """Closed counterclockwise polygon; ``vertices`` does not repeat the first point."""

    vertices: np.ndarray
    y_max: float
    start: tuple[float, float] = (0.0, 0.0)
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeometryError("a polygon needs at least three (x, y) vertices")
        if _signed_area(v) < 0:
            v = v[::-1].copy()
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        a = self.vertices
        return a, np.roll(a, -1, axis=0)

    @property
    def cap_edges(self) -> np.ndarray:
        """Mask of horizontal edges lying on the truncation lines y = +-y_max."""
        a, b = self.edges
        return (a[:, 1] == b[:, 1]) & (np.abs(a[:, 1]) == self.y_max)

    def to_json(self) -> dict:
        return {"vertices": self.vertices.tolist(), "y_max": self.y_max,
                "start": list(self.start), "source": self.source}


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_area(region: RegionPolygon) -> float:
    return _signed_area(region.vertices)


def default_y_max(dist: Distribution, tips: RayTipSet | None = None) -> float:
    finite = [t.tip_y for t in tips.tips if math.isfinite(t.tip_y)] if tips else []
    return max(10.0, 8.0 * math.sqrt(dist.variance) + max(finite, default=0.0))


def polygonize(curve: BoundaryCurve, y_max: float, check: bool = True) -> RegionPolygon:
    """Close the traced boundary into a polygon truncated at |y| = y_max.

    Runs of diverged samples (and samples beyond the truncation) become two
    vertical segments out to the truncation line joined by a horizontal cap.
    """
    if not y_max > 0:
        raise GeometryError("y_max must be positive")
    x, y, th = curve.x, curve.y, curve.theta
    good = curve.good & (np.abs(y) <= y_max) & np.isfinite(x)
    idx = np.nonzero(good)[0]
    if idx.size < 2:
        raise GeometryError("too few usable boundary samples")

    verts: list[tuple[float, float]] = []
    for k, i in enumerate(idx):
        verts.append((float(x[i]), float(y[i])))
        j = idx[k + 1] if k + 1 < idx.size else None
        if j is None or j == i + 1:
            continue
        run = th[i + 1:j]
        if np.any(run <= 0) and np.any(run >= 0):
            raise GeometryError("a diverged run crosses the real axis; cannot truncate it")
        s = 1.0 if run[0] < 0 else -1.0
        verts.append((float(x[i]), s * y_max))
        verts.append((float(x[j]), s * y_max))
    if idx[0] != 0 or idx[-1] != len(th) - 1:
        raise GeometryError("the samples at theta = +-pi must be usable")

    v = np.array(verts)
    keep = np.ones(len(v), bool)
    keep[1:] = np.any(v[1:] != v[:-1], axis=1)
    v = v[keep]
    if np.array_equal(v[0], v[-1]):
        v = v[:-1]

    region = RegionPolygon(v, float(y_max), tuple(curve.start),
                           {"grid_size": curve.grid_size, "abel_radius": curve.abel_radius})
    if check:
        hit = _polygon_self_contact(region)
        if hit is not None:
            raise GeometryError(f"polygon edges {hit[0]} and {hit[1]} cross")
        if not contains(region, curve.start):
            raise GeometryError("start point lies outside the polygon; refine the trace grid")
    return region


def _polygon_self_contact(region: RegionPolygon):
    a, b = region.edges
    n = len(a)
    v0 = np.arange(n)
    v1 = (v0 + 1) % n
    return _segments.first_self_contact(a, b, v0, v1, allow_slits=True)


def _winding(region: RegionPolygon, px: np.ndarray, py: np.ndarray, chunk: int = 4096):
    a, b = region.edges
    ax, ay, bx, by = a[:, 0], a[:, 1], b[:, 0], b[:, 1]
    out = np.empty(px.size, dtype=np.int64)
    for s in range(0, px.size, chunk):
        qx = px[s:s + chunk, None]
        qy = py[s:s + chunk, None]
        left = _segments.orient(ax, ay, bx, by, qx, qy)
        up = (ay <= qy) & (by > qy) & (left > 0)
        down = (ay > qy) & (by <= qy) & (left < 0)
        out[s:s + chunk] = up.sum(axis=1) - down.sum(axis=1)
    return out


def _distances(region: RegionPolygon, px: np.ndarray, py: np.ndarray, chunk: int = 2048):
    a, b = region.edges
    out = np.empty(px.size)
    for s in range(0, px.size, chunk):
        d = _segments.point_segment_distance(px[s:s + chunk, None], py[s:s + chunk, None],
                                             a[:, 0], a[:, 1], b[:, 0], b[:, 1])
        out[s:s + chunk] = d.min(axis=1)
    return out


def contains(region: RegionPolygon, p):
    """Winding-number membership; points within 1e-12 of an edge are outside."""
    pts = np.asarray(p, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    px, py = pts[:, 0], pts[:, 1]
    inside = (_winding(region, px, py) != 0) & (_distances(region, px, py) > BOUNDARY_TOL)
    return bool(inside[0]) if single else inside


def boundary_distance(region: RegionPolygon, p) -> float:
    """Exact distance from an interior point to the polygon boundary."""
    px, py = float(p[0]), float(p[1])
    if not contains(region, (px, py)):
        raise GeometryError(f"point ({px!r}, {py!r}) is not inside the region")
    return float(_distances(region, np.array([px]), np.array([py]))[0])


def save_polygon(region: RegionPolygon, path: str | Path) -> None:
    Path(path).write_text(json.dumps(region.to_json()), encoding="utf-8")


def load_polygon(path: str | Path) -> RegionPolygon:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    unknown = set(data) - {"vertices", "y_max", "start", "source"}
    if unknown:
        raise GeometryError(f"unknown polygon fields: {sorted(unknown)}")
    return RegionPolygon(np.array(data["vertices"], dtype=float), float(data["y_max"]),
                         tuple(data.get("start", (0.0, 0.0))), data.get("source", {}))
