"""Cosine series of phi, which doubles as the power series of psi.

With the reconstruction convention ``a_0 = (1/2pi) int phi`` and
``a_n = (1/pi) int phi cos(n theta)``, the identity
``phi(theta) = sum a_n cos(n theta)`` holds a.e. and ``psi(z) = sum a_n z^n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .distributions import Atoms, Cantor, Distribution, Empirical, Uniform, atoms_of
from .quadrature import QuadratureError, cosine_moments

__all__ = [
    "Method",
    "FourierSeries",
    "QuadratureError",
    "DEFAULT_ORDER",
    "CANTOR_ORDER",
    "default_order",
    "cosine_coefficients",
    "step_coefficients",
    "expected_exit_time",
    "exit_time_partial_sums",
    "parseval_gap",
    "start_point",
    "format_csv",
    "write_csv",
    "read_csv",
]

DEFAULT_ORDER = 4096
CANTOR_ORDER = 65536
CLIP_ANGLE = 1e-8


class Method(str, Enum):
    ANALYTIC_STEP = "analytic_step"
    ANALYTIC_UNIFORM = "analytic_uniform"
    SELF_SIMILAR = "self_similar"
    QUADRATURE = "quadrature"


@dataclass(frozen=True, eq=False)
class FourierSeries:
    coeffs: np.ndarray
    method: Method
    tail_estimate: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("a series needs a_0 and at least one more coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def truncated(self, n: int) -> "FourierSeries":
        return FourierSeries(self.coeffs[: n + 1], self.method, self.tail_estimate)

    def __eq__(self, other):
        if not isinstance(other, FourierSeries):
            return NotImplemented
        return (self.method == other.method
                and self.tail_estimate == other.tail_estimate
                and np.array_equal(self.coeffs, other.coeffs))


def default_order(dist: Distribution) -> int:
    return CANTOR_ORDER if isinstance(dist, Cantor) else DEFAULT_ORDER


def step_coefficients(base: float, angles, weights, n_max: int,
                      block: int = 512) -> np.ndarray:
    """Coefficients of ``base + sum_i w_i 1{|theta| >= t_i}``.

    A single step contributes ``w (pi - t) / pi`` to a_0 and
    ``-2 w sin(n t) / (pi n)`` to a_n.
    """
    t = np.asarray(angles, dtype=float)
    w = np.asarray(weights, dtype=float)
    out = np.empty(n_max + 1)
    out[0] = base + float(np.sum(w * (math.pi - t) / math.pi))
    for start in range(1, n_max + 1, block):
        n = np.arange(start, min(start + block, n_max + 1))
        s = (np.sin(np.outer(n, t)) * w).sum(axis=1)
        out[start:start + n.size] = -2.0 * s / (math.pi * n)
    return out


def _atoms_coefficients(atoms: Atoms, n_max: int) -> np.ndarray:
    levels, alphas = atoms.jump_levels()
    return step_coefficients(atoms.xs[0], math.pi * levels, alphas, n_max)


def _uniform_coefficients(dist: Uniform, n_max: int) -> np.ndarray:
    n = np.arange(1, n_max + 1)
    out = np.empty(n_max + 1)
    out[0] = dist.mean
    odd = (n % 2 == 1)
    out[1:] = np.where(odd, -4.0 * (dist.b - dist.a) / (math.pi ** 2 * n.astype(float) ** 2), 0.0)
    return out


def _cantor_coefficients(dist: Cantor, n_max: int, depth: int = 64) -> np.ndarray:
    """Exact coefficients from the self-similarity of the Cantor quantile.

    With ``I(w) = int_0^1 G(y) exp(i w y) dy`` one has
    ``I(w) = (1 + e^{iw/2})/6 * I(w/2) + (4 sin(w/4) / (3w)) e^{3iw/4}``.
    """
    w = math.pi * np.arange(n_max + 1, dtype=float)
    # innermost frequency is below 1e-15: I ~ m0 + i w m1, m0 = 1/2, m1 = 7/20
    acc = 0.5 + 1j * (w / 2.0 ** depth) * 0.35
    for k in range(depth - 1, -1, -1):
        s = w / 2.0 ** k
        acc = (1.0 + np.exp(0.5j * s)) / 6.0 * acc + np.sinc(s / (4.0 * math.pi)) / 3.0 * np.exp(0.75j * s)
    out = 2.0 * acc.real
    out[0] = 0.5 - (0.5 if dist.center else 0.0)
    return out


def _quadrature_coefficients(dist: Distribution, n_max: int, tol: float) -> np.ndarray:
    lo_x, hi_x = dist.support
    eps = CLIP_ANGLE / math.pi
    lo = 0.0 if math.isfinite(lo_x) else eps
    hi = 1.0 if math.isfinite(hi_x) else 1.0 - eps

    def g(y):
        return dist.quantile_closed(np.clip(y, 0.0, 1.0))

    c, _ = cosine_moments(g, n_max, lo, hi, tol=tol)
    out = 2.0 * c
    out[0] = c[0]
    return out


def cosine_coefficients(dist: Distribution, n_max: int | None = None, *,
                        method: Method | str | None = None,
                        tol: float = 1e-12) -> FourierSeries:
    """Truncated cosine series a_0..a_N of phi for ``dist``.

    By default atoms and empirical laws use the exact step formula, uniform
    laws the closed form, the Cantor law its self-similar recursion, and
    everything else adaptive quadrature.  ``method`` forces a path.
    """
    n_max = default_order(dist) if n_max is None else int(n_max)
    if n_max < 1:
        raise ValueError("truncation order must be at least 1")
    if method is None:
        if isinstance(dist, (Atoms, Empirical)):
            method = Method.ANALYTIC_STEP
        elif isinstance(dist, Uniform):
            method = Method.ANALYTIC_UNIFORM
        elif isinstance(dist, Cantor):
            method = Method.SELF_SIMILAR
        else:
            method = Method.QUADRATURE
    method = Method(method)

    if method is Method.ANALYTIC_STEP:
        coeffs = _atoms_coefficients(atoms_of(dist), n_max)
    elif method is Method.ANALYTIC_UNIFORM:
        if not isinstance(dist, Uniform):
            raise TypeError("analytic_uniform needs a uniform distribution")
        coeffs = _uniform_coefficients(dist, n_max)
    elif method is Method.SELF_SIMILAR:
        if not isinstance(dist, Cantor):
            raise TypeError("self_similar needs the Cantor distribution")
        coeffs = _cantor_coefficients(dist, n_max)
    else:
        coeffs = _quadrature_coefficients(dist, n_max, tol)

    tail = max(0.0, dist.variance - _half_energy(coeffs))
    return FourierSeries(coeffs, method, tail)


def _half_energy(coeffs: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.square(coeffs[1:])))


def expected_exit_time(series: FourierSeries) -> float:
    """Half the energy of the non-constant coefficients, sum_{n>=1} a_n^2 / 2."""
    return _half_energy(series.coeffs)


def exit_time_partial_sums(series: FourierSeries) -> np.ndarray:
    """Running values of sum_{n<=k} a_n^2 / 2 for k = 1..N."""
    return 0.5 * np.cumsum(np.square(series.coeffs[1:]))


def parseval_gap(dist: Distribution, series: FourierSeries) -> float:
    return dist.variance - expected_exit_time(series)


def start_point(series: FourierSeries) -> tuple[float, float]:
    """psi(0) = (a_0, 0)."""
    return float(series.coeffs[0]), 0.0


def format_csv(series: FourierSeries) -> str:
    lines = [f"# method={series.method.value},N={series.order},tail={series.tail_estimate:.17g}",
             "n,a_n"]
    lines += [f"{n},{a:.17g}" for n, a in enumerate(series.coeffs)]
    return "\n".join(lines) + "\n"


def write_csv(series: FourierSeries, path: str | Path) -> None:
    Path(path).write_text(format_csv(series), encoding="utf-8")


def read_csv(path: str | Path) -> FourierSeries:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    meta = dict(item.split("=", 1) for item in text[0].lstrip("# ").split(","))
    rows = [line.split(",") for line in text[2:] if line]
    coeffs = np.array([float(a) for _, a in rows])
    return FourierSeries(coeffs, Method(meta["method"]), float(meta["tail"]))
