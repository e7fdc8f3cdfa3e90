"""Monte Carlo check of the embedding.

Two modes: planar Brownian motion in the unit disc with the time change
accumulated through |psi'|^2, or Brownian motion run directly in the
polygonal domain.  Every path draws its normals from its own Philox stream
keyed by (seed, path index), so results do not depend on the schedule.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import stats

from . import _kernels as K
from .distributions import QUANTILE_CLIP, Distribution, atoms_of, phi
from .fourier import FourierSeries
from .geometry import RegionPolygon, contains

__all__ = [
    "SimMode",
    "SimConfig",
    "SimulationReport",
    "SimulationError",
    "simulate_disc",
    "simulate_domain",
    "ks_test",
    "chi2_test",
    "derivative_table",
    "write_samples_csv",
]

EPS_STOP = 1e-3
DT_FLOOR_RATIO = 1e-4
TABLE_RINGS = 256
TABLE_ANGLES = 16384
MAX_GRID_CELLS = 4_000_000


class SimulationError(RuntimeError):
    pass


class SimMode(str, Enum):
    DISC = "disc"
    DOMAIN = "domain"


@dataclass(frozen=True)
class SimConfig:
    n_paths: int
    dt: float
    seed: int
    mode: SimMode = SimMode.DISC
    eps_stop: float = EPS_STOP
    threads: int = 1
    max_steps: int = 200_000_000
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "mode", SimMode(self.mode))
        if int(self.n_paths) < 1:
            raise ValueError("n_paths must be at least 1")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 < self.eps_stop < 1:
            raise ValueError("eps_stop must lie in (0, 1)")
        if int(self.threads) < 1:
            raise ValueError("threads must be at least 1")

    def echo(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


@dataclass(frozen=True, eq=False)
class SimulationReport:
    config: SimConfig
    exit_x: np.ndarray
    exit_time: np.ndarray
    cap_exit: np.ndarray
    mean_exit_time: float
    exit_time_se: float
    mean_exit_x: float
    exit_x_se: float
    variance_target: float
    mean_target: float
    ks_statistic: float | None = None
    p_value: float | None = None
    chi2: dict | None = None
    cap_exit_fraction: float | None = None
    mean_steps: float = 0.0

    def time_band(self, allowance: float = 0.05) -> tuple[float, float]:
        v, se = self.variance_target, self.exit_time_se
        return v * (1 - allowance) - 3 * se, v * (1 + allowance) + 3 * se

    def to_json(self) -> dict:
        return {
            "config": self.config.echo(),
            "n_samples": int(self.exit_x.size),
            "mean_exit_time": self.mean_exit_time,
            "exit_time_se": self.exit_time_se,
            "variance_target": self.variance_target,
            "mean_exit_x": self.mean_exit_x,
            "exit_x_se": self.exit_x_se,
            "mean_target": self.mean_target,
            "ks_statistic": self.ks_statistic,
            "p_value": self.p_value,
            "chi2": self.chi2,
            "cap_exit_fraction": self.cap_exit_fraction,
            "mean_steps": self.mean_steps,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def ks_test(samples, dist: Distribution) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value."""
    x = np.asarray(samples, dtype=float)
    if dist.is_atomic:
        raise ValueError("KS needs a continuous law; use chi2_test for atomic distributions")
    if x.size < 10:
        raise ValueError("KS needs at least 10 samples")
    res = stats.kstest(x, dist.cdf, method="asymp")
    return float(res.statistic), float(res.pvalue)


def chi2_test(samples, dist: Distribution) -> dict:
    """Snap samples to the nearest atom and compare counts with the weights.

    The snap radius is half the smallest gap between atoms; a sample further
    than that from every atom raises SimulationError.
    """
    atoms = atoms_of(dist)
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("no samples")
    xs, ps = np.asarray(atoms.xs, dtype=float), np.asarray(atoms.ps, dtype=float)
    radius = 0.5 * float(np.min(np.diff(xs))) if xs.size > 1 else math.inf
    idx = np.clip(np.searchsorted(xs, x), 1, max(xs.size - 1, 1))
    if xs.size > 1:
        left = xs[idx - 1]
        right = xs[idx]
        idx = np.where(np.abs(x - left) <= np.abs(right - x), idx - 1, idx)
    else:
        idx = np.zeros(x.size, dtype=int)
    snap = np.abs(x - xs[idx])
    if np.any(snap > radius):
        raise SimulationError(
            f"{int(np.sum(snap > radius))} exits lie further than {radius:g} from every atom")
    n = x.size
    counts = np.bincount(idx, minlength=xs.size)
    expected = n * ps
    z = (counts - expected) / np.sqrt(n * ps * (1 - ps)) if xs.size > 1 else np.zeros(1)
    statistic = float(np.sum((counts - expected) ** 2 / expected))
    dof = xs.size - 1
    p_value = float(stats.chi2.sf(statistic, dof)) if dof > 0 else 1.0
    return {
        "atoms": xs.tolist(),
        "weights": ps.tolist(),
        "counts": counts.tolist(),
        "frequencies": (counts / n).tolist(),
        "z_scores": [float(v) for v in z],
        "statistic": statistic,
        "dof": dof,
        "p_value": p_value,
        "snap_radius": radius,
        "max_snap_distance": float(snap.max()),
    }


# -- path driver ------------------------------------------------------------

def _path_rng(seed: int, path: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(path)])))


def _drive(n_paths: int, cfg: SimConfig, advance, first_block: int) -> np.ndarray:
    """Run every path to exit; returns the final state rows."""
    out = np.zeros((n_paths, K.STATE_SIZE))

    def run(lo: int, hi: int):
        for p in range(lo, hi):
            rng = _path_rng(cfg.seed, p)
            state = out[p]
            block = first_block
            while True:
                normals = rng.standard_normal(2 * block)
                if advance(state, normals):
                    break
                if state[K.STEPS] >= cfg.max_steps:
                    raise SimulationError(f"path {p} did not exit within {cfg.max_steps} steps")
                block = min(2 * block, 1 << 16)

    threads = min(int(cfg.threads), n_paths)
    if threads == 1:
        run(0, n_paths)
    else:
        bounds = np.linspace(0, n_paths, threads + 1).astype(int)
        with ThreadPoolExecutor(threads) as pool:
            for f in [pool.submit(run, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]:
                f.result()
    return out


def _mean_se(v: np.ndarray) -> tuple[float, float]:
    if v.size == 0:
        return math.nan, math.nan
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(np.mean(v)), se


def _law_tests(x: np.ndarray, dist: Distribution) -> dict:
    if dist.is_atomic:
        return {"chi2": chi2_test(x, dist)}
    if x.size < 10:
        return {}
    ks, p = ks_test(x, dist)
    return {"ks_statistic": ks, "p_value": p}


# -- disc mode --------------------------------------------------------------

def derivative_table(coeffs, stop_radius: float, rings: int = TABLE_RINGS,
                     angles: int = TABLE_ANGLES) -> tuple[np.ndarray, float, float]:
    """|psi'|^2 on a polar grid uniform in u = -log(1 - r) and in angle."""
    a = np.asarray(coeffs, dtype=float)
    n = np.arange(1, a.size)
    u_max = -math.log1p(-stop_radius)
    du = u_max / (rings - 1)
    table = np.empty((rings, angles))
    for k in range(rings):
        r = -math.expm1(-k * du)
        c = n * a[1:] * r ** (n - 1.0)
        folded = np.bincount((n - 1) % angles, weights=c, minlength=angles)
        table[k] = np.abs(np.fft.ifft(folded) * angles) ** 2
    return table, 0.0, du


def simulate_disc(series: FourierSeries, dist: Distribution, cfg: SimConfig) -> SimulationReport:
    """Brownian motion from 0 in the disc; exit_x = phi(exit angle), time through |psi'|^2."""
    if cfg.mode is not SimMode.DISC:
        raise ValueError("simulate_disc needs mode=disc")
    stop = 1.0 - cfg.eps_stop
    table, u0, du = derivative_table(series.coeffs, stop)
    dt = float(cfg.dt)

    def advance(state, normals):
        return K.disc_advance(state, normals, dt, stop, table, u0, du)

    first = max(64, min(1 << 14, int(0.6 / dt)))
    final = _drive(int(cfg.n_paths), cfg, advance, first)
    theta = np.arctan2(final[:, K.Y], final[:, K.X])
    clip = None if dist.bounded else QUANTILE_CLIP
    exit_x = np.asarray(phi(dist, theta, clip=clip), dtype=float)
    return _report(cfg, dist, exit_x, final[:, K.T], np.zeros(exit_x.size, bool),
                   final[:, K.STEPS], cap_fraction=None)


# -- domain mode ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _EdgeIndex:
    edges: np.ndarray
    x0: float
    y0: float
    size: float
    nx: int
    ny: int
    starts: np.ndarray
    items: np.ndarray
    margin: float


def _edge_index(region: RegionPolygon, dt: float) -> _EdgeIndex:
    a, b = region.edges
    edges = np.ascontiguousarray(np.hstack([a, b]))
    margin = 4.0 * math.sqrt(dt)
    lo = region.vertices.min(axis=0) - margin
    hi = region.vertices.max(axis=0) + margin
    span = hi - lo
    size = max(margin, math.sqrt(span[0] * span[1] / MAX_GRID_CELLS))
    margin = size
    nx = int(math.ceil(span[0] / size)) + 1
    ny = int(math.ceil(span[1] / size)) + 1
    starts, items = K.build_edge_grid(edges, float(lo[0]), float(lo[1]), size, nx, ny, margin)
    return _EdgeIndex(edges, float(lo[0]), float(lo[1]), size, nx, ny, starts, items, margin)


def simulate_domain(region: RegionPolygon, dist: Distribution, cfg: SimConfig) -> SimulationReport:
    """Brownian motion from the start point run until it leaves the polygon."""
    if cfg.mode is not SimMode.DOMAIN:
        raise ValueError("simulate_domain needs mode=domain")
    start = np.asarray(region.start, dtype=float)
    if not contains(region, start):
        raise SimulationError("start point lies outside the region")
    dt = float(cfg.dt)
    ix = _edge_index(region, dt)
    floor = dt * DT_FLOOR_RATIO

    def advance(state, normals):
        if state[K.STEPS] == 0:
            state[K.X], state[K.Y] = start
        return K.domain_advance(state, normals, dt, floor, ix.edges, ix.x0, ix.y0, ix.size,
                                ix.nx, ix.ny, ix.starts, ix.items, ix.margin)

    first = max(64, min(1 << 14, int(0.6 / dt)))
    final = _drive(int(cfg.n_paths), cfg, advance, first)
    cap = region.cap_edges[final[:, K.EDGE].astype(int)]
    return _report(cfg, dist, final[:, K.X], final[:, K.T], cap, final[:, K.STEPS],
                   cap_fraction=float(np.mean(cap)))


def _report(cfg, dist, exit_x, exit_time, cap, steps, cap_fraction) -> SimulationReport:
    keep = ~cap
    x = exit_x[keep]
    t_mean, t_se = _mean_se(exit_time)
    x_mean, x_se = _mean_se(x)
    tests = _law_tests(x, dist) if x.size else {}
    return SimulationReport(
        config=cfg, exit_x=exit_x, exit_time=exit_time, cap_exit=cap,
        mean_exit_time=t_mean, exit_time_se=t_se, mean_exit_x=x_mean, exit_x_se=x_se,
        variance_target=float(dist.variance), mean_target=float(dist.mean),
        cap_exit_fraction=cap_fraction, mean_steps=float(np.mean(steps)), **tests)


def write_samples_csv(report: SimulationReport, path: str | Path) -> None:
    lines = ["path_index,exit_x,exit_time,cap_exit"]
    lines += [f"{i},{x:.17g},{t:.17g},{int(c)}"
              for i, (x, t, c) in enumerate(zip(report.exit_x, report.exit_time, report.cap_exit))]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
