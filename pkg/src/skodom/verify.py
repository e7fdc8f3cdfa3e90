"""End-to-end verification: coefficients, boundary, simplicity, simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conformal import ray_tips, simplicity_check, step_profile, trace
from .distributions import Distribution, atoms_of
from .fourier import cosine_coefficients, default_order, expected_exit_time
from .geometry import GeometryError, default_y_max, polygonize
from .montecarlo import SimConfig, SimMode, SimulationError, simulate_disc, simulate_domain

__all__ = ["Budget", "Check", "run_checks"]

PARSEVAL_REL_TOL = 1e-3
SIGN_TOL = 1e-6
ATOM_TOL = 1e-9


@dataclass(frozen=True)
class Budget:
    n: int | None = None
    grid: int = 2001
    paths: int = 2000
    dt: float = 1e-4
    seed: int = 0
    mode: SimMode = SimMode.DISC
    y_max: float | None = None
    threads: int = 1
    simulate: bool = True

    def echo(self) -> dict:
        return {"n": self.n, "grid": self.grid, "paths": self.paths, "dt": self.dt,
                "seed": self.seed, "mode": SimMode(self.mode).value, "y_max": self.y_max,
                "threads": self.threads, "simulate": self.simulate}


@dataclass
class Check:
    name: str
    passed: bool
    message: str = ""
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "message": self.message,
                "values": self.values}


def _parseval(dist, series) -> Check:
    var = dist.variance
    energy = expected_exit_time(series)
    gap = var - energy
    ok = abs(gap) <= PARSEVAL_REL_TOL * max(var, 1e-300)
    msg = "" if ok else (
        f"half the coefficient energy {energy:.6g} misses Var {var:.6g} by {gap:.3g} "
        f"(relative {gap / var:.3g} > {PARSEVAL_REL_TOL:g}); increase --n above {series.order}")
    return Check("parseval_gap", ok, msg, {"variance": var, "half_energy": energy, "gap": gap,
                                           "order": series.order})


def _mean(dist, series) -> Check:
    err = abs(series.coeffs[0] - dist.mean)
    ok = err <= 1e-6 * (1.0 + abs(dist.mean))
    return Check("start_point_mean", ok, "" if ok else f"a_0 differs from the mean by {err:.3g}",
                 {"a0": float(series.coeffs[0]), "mean": dist.mean})


def _symmetry(curve) -> Check:
    mirror = bool(np.array_equal(curve.y, -curve.y[::-1]) and np.array_equal(curve.x, curve.x[::-1]))
    upper = (curve.theta > 0) & (curve.theta < math.pi) & curve.good
    worst = float(curve.y[upper].max()) if np.any(upper) else 0.0
    ok = mirror and worst <= SIGN_TOL
    msg = "" if ok else ("trace is not mirror symmetric" if not mirror
                         else f"y reaches {worst:.3g} on (0, pi)")
    return Check("symmetry_sign", ok, msg, {"mirror": mirror, "max_y_upper": worst})


def _simplicity(curve) -> Check:
    simple, hit = simplicity_check(curve, allow_slits=True)
    return Check("simplicity", bool(simple), "" if simple else f"segments {hit[0]} and {hit[1]} cross",
                 {"allow_slits": True})


def _structure(dist, curve) -> Check:
    atoms = np.asarray(atoms_of(dist).xs)
    xs = curve.x[curve.good]
    dev = float(np.min(np.abs(xs[:, None] - atoms[None, :]), axis=1).max())
    ok = dev <= ATOM_TOL
    return Check("atomic_structure", ok, "" if ok else f"trace x strays {dev:.3g} from the atoms",
                 {"max_deviation": dev})


def _law(report, dist) -> Check:
    if report.chi2 is not None:
        z = report.chi2["z_scores"]
        ok = all(abs(v) <= 3.0 for v in z)
        return Check("exit_law", ok, "" if ok else f"atom frequencies off by up to {max(map(abs, z)):.2f} sigma",
                     {"frequencies": report.chi2["frequencies"], "z_scores": z})
    if report.p_value is None:
        return Check("exit_law", False, "too few samples for a KS test; raise --paths")
    ok = report.p_value > 0.01
    return Check("exit_law", ok, "" if ok else f"KS p-value {report.p_value:.3g} <= 0.01",
                 {"ks_statistic": report.ks_statistic, "p_value": report.p_value})


def _exit_time(report) -> Check:
    lo, hi = report.time_band()
    ok = lo <= report.mean_exit_time <= hi
    return Check("mean_exit_time", ok, "" if ok else
                 f"mean exit time {report.mean_exit_time:.4g} outside [{lo:.4g}, {hi:.4g}]",
                 {"mean": report.mean_exit_time, "se": report.exit_time_se, "band": [lo, hi]})


def _martingale(report) -> Check:
    dev = abs(report.mean_exit_x - report.mean_target)
    ok = dev <= 3.0 * report.exit_x_se + 1e-12
    return Check("optional_stopping", ok, "" if ok else
                 f"mean exit x {report.mean_exit_x:.4g} is {dev / report.exit_x_se:.2f} SE from the mean",
                 {"mean_exit_x": report.mean_exit_x, "se": report.exit_x_se})


def run_checks(dist: Distribution, budget: Budget) -> list[Check]:
    """Run the pipeline and return one result per check, in a fixed order."""
    n = default_order(dist) if budget.n is None else budget.n
    series = cosine_coefficients(dist, n)
    checks = [_mean(dist, series), _parseval(dist, series)]

    curve = trace(series, dist, budget.grid)
    checks += [_symmetry(curve), _simplicity(curve)]
    tips = None
    if dist.is_atomic:
        checks.append(_structure(dist, curve))
        tips = ray_tips(step_profile(dist))

    if budget.simulate:
        mode = SimMode(budget.mode)
        cfg = SimConfig(budget.paths, budget.dt, budget.seed, mode, threads=budget.threads)
        try:
            if mode is SimMode.DISC:
                report = simulate_disc(series, dist, cfg)
            else:
                y_max = budget.y_max or default_y_max(dist, tips)
                report = simulate_domain(polygonize(curve, y_max), dist, cfg)
        except (SimulationError, GeometryError) as exc:
            checks.append(Check("simulation", False, str(exc)))
        else:
            checks += [_law(report, dist), _exit_time(report), _martingale(report)]
            if report.cap_exit_fraction is not None:
                ok = report.cap_exit_fraction < 1e-3
                checks.append(Check("cap_exits", ok, "" if ok else
                                    f"{report.cap_exit_fraction:.3g} of paths left through a cap; raise --ymax",
                                    {"fraction": report.cap_exit_fraction}))
    return checks
