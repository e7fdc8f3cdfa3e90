"""File formats: distribution files, boundary samples, ray tips."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .conformal import BoundaryCurve, RayTipSet
from .distributions import Atoms, Cantor, Distribution, Empirical, Gaussian, Uniform

__all__ = [
    "InputError",
    "distribution_from_dict",
    "distribution_to_dict",
    "load_distribution",
    "save_distribution",
    "write_boundary_csv",
    "read_boundary_csv",
    "write_tips_json",
]


class InputError(ValueError):
    """Invalid distribution file."""


_FIELDS = {
    "atoms": {"atoms"},
    "uniform": {"a", "b"},
    "gaussian": {"mean", "sd"},
    "cantor": {"center"},
    "empirical": {"samples"},
}


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{name} must be a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise InputError(f"{name} must be finite")
    return v


def distribution_from_dict(data: dict) -> Distribution:
    if not isinstance(data, dict):
        raise InputError("a distribution file holds a JSON object")
    kind = data.get("type")
    if kind not in _FIELDS:
        raise InputError(f"unknown distribution type {kind!r}; expected one of {sorted(_FIELDS)}")
    unknown = set(data) - _FIELDS[kind] - {"type"}
    if unknown:
        raise InputError(f"unknown fields for {kind}: {sorted(unknown)}")
    try:
        if kind == "atoms":
            items = data.get("atoms")
            if not isinstance(items, list) or not items:
                raise InputError("atoms must be a nonempty list")
            xs, ps = [], []
            for k, item in enumerate(items):
                if not isinstance(item, dict) or set(item) != {"x", "p"}:
                    raise InputError(f"atom {k} must be an object with exactly x and p")
                xs.append(_number(item["x"], f"atoms[{k}].x"))
                ps.append(_number(item["p"], f"atoms[{k}].p"))
            return Atoms(tuple(xs), tuple(ps))
        if kind == "uniform":
            return Uniform(_number(data.get("a", -1.0), "a"), _number(data.get("b", 1.0), "b"))
        if kind == "gaussian":
            return Gaussian(_number(data.get("mean", 0.0), "mean"), _number(data.get("sd", 1.0), "sd"))
        if kind == "cantor":
            center = data.get("center", True)
            if not isinstance(center, bool):
                raise InputError("center must be true or false")
            return Cantor(center)
        samples = data.get("samples")
        if not isinstance(samples, list):
            raise InputError("samples must be a list")
        values = [_number(v, f"samples[{k}]") for k, v in enumerate(samples)]
        # an unsorted list would describe a non-monotone quantile
        if any(b < a for a, b in zip(values, values[1:])):
            raise InputError("empirical samples must be sorted in nondecreasing order")
        return Empirical(tuple(values))
    except InputError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc


def distribution_to_dict(dist: Distribution) -> dict:
    if isinstance(dist, Atoms):
        return {"type": "atoms", "atoms": [{"x": x, "p": p} for x, p in zip(dist.xs, dist.ps)]}
    if isinstance(dist, Uniform):
        return {"type": "uniform", "a": dist.a, "b": dist.b}
    if isinstance(dist, Gaussian):
        return {"type": "gaussian", "mean": dist.mu, "sd": dist.sd}
    if isinstance(dist, Cantor):
        return {"type": "cantor", "center": dist.center}
    if isinstance(dist, Empirical):
        return {"type": "empirical", "samples": list(dist.samples)}
    raise TypeError(f"cannot serialize {type(dist).__name__}")


def load_distribution(path: str | Path) -> Distribution:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {p}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{p} is not valid JSON: {exc}") from exc
    try:
        return distribution_from_dict(data)
    except InputError as exc:
        raise InputError(f"{p}: {exc}") from exc


def save_distribution(dist: Distribution, path: str | Path) -> None:
    Path(path).write_text(json.dumps(distribution_to_dict(dist), indent=2) + "\n", encoding="utf-8")


def write_boundary_csv(curve: BoundaryCurve, path: str | Path) -> None:
    lines = ["theta,x,y,diverged"]
    lines += [f"{t:.17g},{x:.17g},{y:.17g},{int(d)}" for t, x, y, d in curve.rows()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_boundary_csv(path: str | Path) -> BoundaryCurve:
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    theta, x, y, d = arr.T
    return BoundaryCurve(theta, x, y, d.astype(bool), float("nan"), arr.shape[0])


def write_tips_json(tips: RayTipSet, path: str | Path) -> None:
    Path(path).write_text(json.dumps({"tips": tips.to_json()}, indent=2) + "\n", encoding="utf-8")
