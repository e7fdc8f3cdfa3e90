"""Target distributions: CDF, generalized inverse and the periodic profile phi.

Every distribution is an immutable value.  ``quantile`` follows the infimum
convention ``G(y) = inf{x : F(x) >= y}`` literally, so at a jump level of F the
left atom wins.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import ClassVar

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "Kind",
    "Distribution",
    "Atoms",
    "Uniform",
    "Gaussian",
    "Cantor",
    "Empirical",
    "geometric_atoms",
    "quantile",
    "phi",
    "moments",
    "QUANTILE_CLIP",
]

# Quantile levels are clipped to [QUANTILE_CLIP, 1 - QUANTILE_CLIP] wherever an
# unbounded G has to be turned into finite coordinates.
QUANTILE_CLIP = 1e-6

CANTOR_DIGITS = 40


class Kind(str, Enum):
    ATOMS = "atoms"
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"
    CANTOR = "cantor"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class Distribution(ABC):
    """Common interface of the supported target laws."""

    kind: ClassVar[Kind]

    @abstractmethod
    def _g(self, y: np.ndarray) -> np.ndarray:
        """Generalized inverse on the closed interval [0, 1].

        At 0 and 1 this returns the limits G(0+) and G(1-), i.e. the
        endpoints of the support, which may be infinite.
        """

    @abstractmethod
    def cdf(self, x):
        ...

    @property
    @abstractmethod
    def mean(self) -> float:
        ...

    @property
    @abstractmethod
    def variance(self) -> float:
        ...

    @property
    def is_atomic(self) -> bool:
        return False

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self._g(np.array([0.0, 1.0]))
        return float(lo), float(hi)

    @property
    def bounded(self) -> bool:
        lo, hi = self.support
        return math.isfinite(lo) and math.isfinite(hi)

    def quantile(self, y):
        """G(y) for y in the open interval (0, 1); vectorized."""
        arr = np.asarray(y, dtype=float)
        if np.any(~((arr > 0.0) & (arr < 1.0))):
            raise ValueError("quantile level must lie in the open interval (0, 1)")
        out = self._g(arr)
        return float(out) if out.ndim == 0 else out

    def quantile_closed(self, y, clip: float | None = None):
        """G on [0, 1], with optional clipping of levels at unbounded ends."""
        arr = np.asarray(y, dtype=float)
        if np.any((arr < 0.0) | (arr > 1.0)):
            raise ValueError("quantile level must lie in [0, 1]")
        if clip is not None:
            lo, hi = self.support
            if not math.isfinite(lo):
                arr = np.maximum(arr, clip)
            if not math.isfinite(hi):
                arr = np.minimum(arr, 1.0 - clip)
        out = self._g(arr)
        return float(out) if out.ndim == 0 else out

    def moments(self) -> tuple[float, float]:
        return self.mean, self.variance

    def jump_levels(self, depth: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Levels y in (0, 1) where G jumps, and the jump sizes."""
        return np.empty(0), np.empty(0)


@dataclass(frozen=True)
class Atoms(Distribution):
    """Finitely many atoms ``xs`` with probabilities ``ps``."""

    kind: ClassVar[Kind] = Kind.ATOMS

    xs: tuple[float, ...]
    ps: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ps = tuple(float(p) for p in self.ps)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ps", ps)
        if not xs or len(xs) != len(ps):
            raise ValueError("atoms need matching, nonempty x and p lists")
        if not all(math.isfinite(x) for x in xs):
            raise ValueError("atom locations must be finite")
        if any(not (p > 0.0) for p in ps):
            raise ValueError("atom probabilities must be positive")
        if abs(math.fsum(ps) - 1.0) > 1e-12:
            raise ValueError(f"atom probabilities sum to {math.fsum(ps)!r}, not 1")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("atom locations must be strictly increasing")

    @cached_property
    def _x(self) -> np.ndarray:
        return np.array(self.xs)

    @cached_property
    def cumulative(self) -> np.ndarray:
        """P(X <= x_i) for each atom; the last entry is exactly 1."""
        c = np.cumsum(np.array(self.ps))
        c[-1] = 1.0
        return np.minimum(c, 1.0)

    def _g(self, y):
        # first atom whose cumulative probability reaches y
        idx = np.searchsorted(self.cumulative, y, side="left")
        return self._x[np.minimum(idx, len(self.xs) - 1)]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._x, x, side="right")
        c = np.concatenate([[0.0], self.cumulative])
        out = c[idx]
        return float(out) if out.ndim == 0 else out

    @property
    def mean(self) -> float:
        return math.fsum(p * x for x, p in zip(self.xs, self.ps))

    @property
    def variance(self) -> float:
        m = self.mean
        return math.fsum(p * (x - m) ** 2 for x, p in zip(self.xs, self.ps))

    @property
    def is_atomic(self) -> bool:
        return True

    def jump_levels(self, depth=None):
        return self.cumulative[:-1].copy(), np.diff(self._x)


@dataclass(frozen=True)
class Uniform(Distribution):
    kind: ClassVar[Kind] = Kind.UNIFORM

    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError("uniform distribution needs finite a < b")

    def _g(self, y):
        return self.a + (self.b - self.a) * np.asarray(y, dtype=float)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def variance(self) -> float:
        return (self.b - self.a) ** 2 / 12.0


@dataclass(frozen=True)
class Gaussian(Distribution):
    kind: ClassVar[Kind] = Kind.GAUSSIAN

    mu: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sd) and self.sd > 0.0):
            raise ValueError("gaussian distribution needs finite mean and sd > 0")

    def _g(self, y):
        y = np.asarray(y, dtype=float)
        z = ndtri(y)
        return self.mu + self.sd * z

    def cdf(self, x):
        out = ndtr((np.asarray(x, dtype=float) - self.mu) / self.sd)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def variance(self) -> float:
        return self.sd ** 2


@dataclass(frozen=True)
class Cantor(Distribution):
    """The middle-thirds Cantor law on [0, 1], optionally shifted to mean zero."""

    kind: ClassVar[Kind] = Kind.CANTOR

    center: bool = True

    @property
    def _shift(self) -> float:
        return 0.5 if self.center else 0.0

    def _g(self, y):
        y = np.asarray(y, dtype=float)
        scale = float(2 ** CANTOR_DIGITS)
        # m/2^40 < y <= (m+1)/2^40; the digits of m followed by an infinite
        # tail of ones pick the left end of any gap, i.e. the infimum.
        m = np.ceil(y * scale).astype(np.int64) - 1
        x = np.zeros(y.shape)
        w = 1.0
        for k in range(CANTOR_DIGITS):
            w /= 3.0
            bit = (m >> (CANTOR_DIGITS - 1 - k)) & 1
            x = x + 2.0 * w * bit
        x = x + w  # sum over k > 40 of 2 * 3^-k
        x = np.where(m < 0, 0.0, x)
        x = np.where(y >= 1.0, 1.0, x)
        return x - self._shift

    def cdf(self, x):
        x = np.asarray(x, dtype=float) + self._shift
        u = np.clip(x, 0.0, 1.0)
        f = np.zeros(u.shape)
        live = (x > 0.0) & (x < 1.0)
        w = 0.5
        for _ in range(CANTOR_DIGITS + 20):
            u = u * 3.0
            d = np.floor(u)
            u = u - d
            middle = live & (d == 1.0)
            f = f + np.where(middle, w, 0.0) + np.where(live & (d == 2.0), w, 0.0)
            live = live & ~middle
            w *= 0.5
        f = np.where(x >= 1.0, 1.0, f)
        return float(f) if f.ndim == 0 else f

    @property
    def mean(self) -> float:
        return 0.5 - self._shift

    @property
    def variance(self) -> float:
        return 0.125

    def jump_levels(self, depth=None):
        # level (2j+1)/2^k opens the gap of width 3^-k
        depth = 12 if depth is None else depth
        levels, sizes = [], []
        for k in range(1, depth + 1):
            j = np.arange(2 ** (k - 1))
            levels.append((2 * j + 1) / 2.0 ** k)
            sizes.append(np.full(j.size, 3.0 ** -k))
        if not levels:
            return np.empty(0), np.empty(0)
        lv = np.concatenate(levels)
        sz = np.concatenate(sizes)
        order = np.argsort(lv)
        return lv[order], sz[order]


@dataclass(frozen=True)
class Empirical(Distribution):
    """Empirical law of a sample; G is the order-statistic step function."""

    kind: ClassVar[Kind] = Kind.EMPIRICAL

    samples: tuple[float, ...] = field(default=())

    def __post_init__(self):
        s = tuple(sorted(float(v) for v in self.samples))
        if not s:
            raise ValueError("empirical distribution needs at least one sample")
        if not all(math.isfinite(v) for v in s):
            raise ValueError("empirical samples must be finite")
        object.__setattr__(self, "samples", s)

    @cached_property
    def _s(self) -> np.ndarray:
        return np.array(self.samples)

    def _g(self, y):
        n = len(self.samples)
        y = np.asarray(y, dtype=float)
        # x_(ceil(n y)), 1-indexed; the endpoints map to min and max
        k = np.ceil(y * n).astype(np.int64)
        return self._s[np.clip(k, 1, n) - 1]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.searchsorted(self._s, x, side="right") / len(self.samples)
        return float(out) if out.ndim == 0 else out

    @property
    def mean(self) -> float:
        return math.fsum(self.samples) / len(self.samples)

    @property
    def variance(self) -> float:
        m = self.mean
        return math.fsum((v - m) ** 2 for v in self.samples) / len(self.samples)

    @property
    def is_atomic(self) -> bool:
        return True

    def as_atoms(self) -> Atoms:
        values, counts = np.unique(self._s, return_counts=True)
        n = len(self.samples)
        ps = counts / n
        ps[-1] = 1.0 - math.fsum(ps[:-1])
        return Atoms(tuple(values), tuple(ps))

    def jump_levels(self, depth=None):
        return self.as_atoms().jump_levels()


def geometric_atoms(last: int = 50) -> Atoms:
    """mu({k}) = 2^-(k+1) on k = 0..last, the tail mass lumped into ``last``."""
    xs = tuple(float(k) for k in range(last + 1))
    ps = [2.0 ** -(k + 1) for k in range(last)] + [2.0 ** -last]
    return Atoms(xs, tuple(ps))


def atoms_of(dist: Distribution) -> Atoms:
    if isinstance(dist, Atoms):
        return dist
    if isinstance(dist, Empirical):
        return dist.as_atoms()
    raise TypeError(f"{dist.kind.value} distribution is not atomic")


def quantile(dist: Distribution, y):
    return dist.quantile(y)


def phi(dist: Distribution, theta, clip: float | None = None):
    """phi(theta) = G(|theta| / pi) on [-pi, pi]; even in theta."""
    th = np.asarray(theta, dtype=float)
    if np.any(np.abs(th) > math.pi):
        raise ValueError("theta must lie in [-pi, pi]")
    return dist.quantile_closed(np.abs(th) / math.pi, clip=clip)


def moments(dist: Distribution) -> tuple[float, float]:
    return dist.moments()
