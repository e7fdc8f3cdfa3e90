"""The map psi, its boundary curve, and closed-form Hilbert transforms of steps.

On the circle the real part of psi(e^{i theta}) is phi(theta) exactly; the
imaginary part is the conjugate series sum a_n sin(n theta), evaluated here
with Abel damping r^n because it diverges at every jump of phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from . import _segments
from .distributions import QUANTILE_CLIP, Distribution, atoms_of
from .fourier import FourierSeries, start_point

__all__ = [
    "BoundaryCurve",
    "StepProfile",
    "RayTip",
    "RayTipSet",
    "RootFindingError",
    "psi_eval",
    "psi_derivative",
    "abel_radius",
    "divergence_cap",
    "conjugate_series",
    "conjugate_series_grid",
    "boundary_point",
    "trace",
    "curve_from_series",
    "hilbert_step",
    "hilbert_profile",
    "step_profile",
    "cot_sum",
    "ray_tips",
    "simplicity_check",
]


def _check_inside(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("psi is only evaluated inside the open unit disc; use boundary_point")
    return z


def psi_eval(series: FourierSeries, z):
    """Horner evaluation of sum_{n<=N} a_n z^n for |z| < 1."""
    z = _check_inside(z)
    out = P.polyval(z, series.coeffs)
    return complex(out) if np.ndim(out) == 0 else out


def psi_derivative(series: FourierSeries, z):
    z = _check_inside(z)
    out = P.polyval(z, P.polyder(series.coeffs))
    return complex(out) if np.ndim(out) == 0 else out


def abel_radius(series: FourierSeries) -> float:
    return 1.0 - 1.0 / series.order


def divergence_cap(dist: Distribution) -> float:
    return 1e3 * (1.0 + math.sqrt(dist.variance))


def conjugate_series(coeffs, theta, r: float, block: int = 256) -> np.ndarray:
    """sum_{n>=1} a_n r^n sin(n theta) at arbitrary angles."""
    a = np.asarray(coeffs, dtype=float)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    n = np.arange(1, a.size)
    damped = a[1:] * r ** n
    out = np.zeros(th.shape)
    for start in range(0, th.size, block):
        t = th[start:start + block]
        out[start:start + block] = np.sin(np.outer(t, n)) @ damped
    return out


def conjugate_series_grid(coeffs, r: float, m: int) -> np.ndarray:
    """The conjugate series at theta_k = 2 pi k / m, k = 0..m-1.

    Coefficients are folded modulo m, which is exact at the grid nodes, so
    the cost is one FFT of length m whatever the truncation order.
    """
    a = np.asarray(coeffs, dtype=float)
    c = a * r ** np.arange(a.size)
    c[0] = 0.0
    idx = np.arange(a.size) % m
    folded = np.bincount(idx, weights=c, minlength=m)
    return (np.fft.ifft(folded) * m).imag


def boundary_point(series: FourierSeries, dist: Distribution, theta: float,
                   r: float | None = None, clip: float | None = QUANTILE_CLIP):
    """(x, y, diverged) for psi(e^{i theta}).

    ``x`` is phi(theta), exact; quantile levels are clipped only at unbounded
    ends of the support.  ``y`` is the Abel-damped conjugate series.
    """
    if not -math.pi <= theta <= math.pi:
        raise ValueError("theta must lie in [-pi, pi]")
    r = abel_radius(series) if r is None else r
    x = float(dist.quantile_closed(abs(theta) / math.pi, clip=clip))
    if theta in (0.0, math.pi, -math.pi):
        y = 0.0
    else:
        y = float(conjugate_series(series.coeffs, theta, r)[0])
    diverged = (not math.isfinite(x)) or abs(y) > divergence_cap(dist)
    return x, y, diverged


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Samples of theta -> psi(e^{i theta}) on a uniform grid over [-pi, pi]."""

    theta: np.ndarray
    x: np.ndarray
    y: np.ndarray
    diverged: np.ndarray
    abel_radius: float
    grid_size: int
    start: tuple[float, float] = (0.0, 0.0)
    quantile_clip: float | None = None
    jump_flags: int = 0
    variance: float = float("nan")

    @property
    def good(self) -> np.ndarray:
        return ~self.diverged

    def rows(self):
        for t, x, y, d in zip(self.theta, self.x, self.y, self.diverged):
            yield float(t), float(x), float(y), bool(d)


def curve_from_series(coeffs, grid_size: int = 2001, r: float = 1.0) -> BoundaryCurve:
    """Boundary curve of a bare power series, both parts from the series.

    Used for synthetic maps that do not come from a distribution.
    """
    a = np.asarray(coeffs, dtype=float)
    theta = math.pi * np.linspace(-1.0, 1.0, grid_size)
    z = r * np.exp(1j * theta)
    w = P.polyval(z, a)
    y = w.imag.copy()
    # real coefficients: psi is real on the real axis
    y[[0, -1]] = 0.0
    y[np.abs(theta) == 0.0] = 0.0
    return BoundaryCurve(theta, w.real.copy(), y, np.zeros(grid_size, bool),
                         r, grid_size, start=(float(a[0]), 0.0))


def _cantor_jump_depth(grid_size: int) -> int:
    return max(1, int(math.floor(math.log2(max(2, (grid_size - 1) / 8)))))


def trace(series: FourierSeries, dist: Distribution, grid_size: int = 2001,
          r: float | None = None, jump_depth: int | None = None) -> BoundaryCurve:
    """Sample the boundary curve on a uniform grid with theta = 0 as a node.

    Only theta >= 0 is computed; the other half is the mirror image, so the
    conjugation symmetry holds exactly.  Nodes nearest a jump of phi are
    flagged diverged: there the true imaginary part is infinite and the
    boundary is a vertical ray.
    """
    if grid_size < 3 or grid_size % 2 == 0:
        raise ValueError("grid_size must be odd and at least 3")
    r = abel_radius(series) if r is None else r
    half = (grid_size - 1) // 2
    m = np.arange(half + 1)
    levels = m / half
    theta = math.pi * levels

    clip = None if dist.bounded else QUANTILE_CLIP
    x = np.asarray(dist.quantile_closed(levels, clip=clip), dtype=float)
    y = conjugate_series_grid(series.coeffs, r, grid_size - 1)[: half + 1]
    y[0] = 0.0
    y[-1] = 0.0

    diverged = ~np.isfinite(x) | (np.abs(y) > divergence_cap(dist))
    if jump_depth is None:
        jump_depth = _cantor_jump_depth(grid_size)
    jl, _ = dist.jump_levels(depth=jump_depth)
    flagged = 0
    if jl.size:
        nodes = np.unique(np.rint(jl * half).astype(np.int64))
        nodes = nodes[(nodes > 0) & (nodes < half)]
        diverged[nodes] = True
        flagged = int(nodes.size)

    full_theta = np.concatenate([-theta[:0:-1], theta])
    full_x = np.concatenate([x[:0:-1], x])
    full_y = np.concatenate([-y[:0:-1], y])
    full_div = np.concatenate([diverged[:0:-1], diverged])
    return BoundaryCurve(full_theta, full_x, full_y, full_div, r, grid_size,
                         start=start_point(series), quantile_clip=clip,
                         jump_flags=flagged, variance=dist.variance)


def hilbert_step(theta0: float, x):
    """Hilbert transform of the periodic step 1{theta0 <= |t| <= pi}.

    (1/pi) log|sin(theta0/2 - x/2) / sin(theta0/2 + x/2)|; -inf at x = theta0
    and +inf at x = -theta0.
    """
    if not 0.0 <= theta0 <= math.pi:
        raise ValueError("theta0 must lie in [0, pi]")
    x = np.asarray(x, dtype=float)
    num = np.abs(np.sin(0.5 * theta0 - 0.5 * x))
    den = np.abs(np.sin(0.5 * theta0 + 0.5 * x))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (np.log(num) - np.log(den)) / math.pi
    # theta0 in {0, pi}: the step is constant a.e., so its transform vanishes
    out = np.where(np.isnan(out), 0.0, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StepProfile:
    """phi = base + sum_i alpha_i 1{|theta| >= theta_i} for an atomic law."""

    base: float
    angles: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()
    atoms: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if len(self.angles) != len(self.weights):
            raise ValueError("angles and weights must match")
        if any(not 0.0 < t < math.pi for t in self.angles):
            raise ValueError("step angles must lie in (0, pi)")
        if any(b <= a for a, b in zip(self.angles, self.angles[1:])):
            raise ValueError("step angles must be strictly increasing")
        if any(w <= 0.0 for w in self.weights):
            raise ValueError("step weights must be positive")

    def __call__(self, theta):
        th = np.abs(np.asarray(theta, dtype=float))
        out = np.full(th.shape, self.base)
        for t, w in zip(self.angles, self.weights):
            out = out + w * (th >= t)
        return out


def step_profile(dist: Distribution) -> StepProfile:
    atoms = atoms_of(dist)
    levels, alphas = atoms.jump_levels()
    angles = math.pi * levels
    keep = (angles > 0.0) & (angles < math.pi)
    if not np.all(keep):
        raise ValueError("atomic law has steps that collapse onto 0 or pi")
    return StepProfile(float(atoms.xs[0]), tuple(float(a) for a in angles),
                       tuple(float(w) for w in alphas), tuple(atoms.xs))


def hilbert_profile(profile: StepProfile, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    for t, w in zip(profile.angles, profile.weights):
        out = out + w * hilbert_step(t, x)
    return float(out) if out.ndim == 0 else out


def cot_sum(profile: StepProfile, x):
    """sum_i alpha_i (cot(theta_i/2 - x/2) + cot(theta_i/2 + x/2)).

    Proportional to minus the derivative of ``hilbert_profile``.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    for t, w in zip(profile.angles, profile.weights):
        out = out + w * (1.0 / np.tan(0.5 * t - 0.5 * x) + 1.0 / np.tan(0.5 * t + 0.5 * x))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RayTip:
    atom_x: float
    critical_angle: float | None
    tip_y: float


@dataclass(frozen=True)
class RayTipSet:
    tips: tuple[RayTip, ...]

    def to_json(self) -> list[dict]:
        def num(v):
            if v is None:
                return None
            return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")

        return [{"atom_x": t.atom_x, "critical_angle": num(t.critical_angle),
                 "tip_y": num(t.tip_y)} for t in self.tips]


class RootFindingError(RuntimeError):
    pass


def _bracketed_root(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    flo, fhi = f(lo), f(hi)
    if np.sign(flo) * np.sign(fhi) > 0:
        raise RootFindingError(f"no sign change on [{lo!r}, {hi!r}]: f = {flo!r}, {fhi!r}")
    try:
        return float(brentq(f, lo, hi, xtol=tol, maxiter=200))
    except RuntimeError as exc:
        raise RootFindingError(f"root search on [{lo!r}, {hi!r}] failed: {exc}") from None


def ray_tips(profile: StepProfile, scan: int = 10_000, pole_gap: float = 1e-9) -> RayTipSet:
    """Tips of the vertical boundary rays above each atom.

    The interval between consecutive step angles belongs to one atom.  A root
    of the cot sum there is a critical point of the imaginary part; the tip
    ordinate is |H phi| at the highest one.  An interval without a root means
    the ray over that atom runs through the whole line.
    """
    if not profile.angles:
        raise ValueError("ray tips need at least one step")
    edges = (0.0,) + tuple(profile.angles) + (math.pi,)
    atoms = profile.atoms or tuple(
        profile.base + sum(profile.weights[:i]) for i in range(len(edges) - 1))

    def f(v):
        return cot_sum(profile, v)

    tips = []
    for i, atom in enumerate(atoms):
        lo, hi = edges[i] + pole_gap, edges[i + 1] - pole_gap
        if hi <= lo:
            # too thin to scan; between two poles the sum runs from -inf to +inf
            lo = np.nextafter(edges[i], math.inf)
            hi = np.nextafter(edges[i + 1], -math.inf)
            if hi <= lo:
                roots = [0.5 * (edges[i] + edges[i + 1])]
            else:
                with np.errstate(divide="ignore"):
                    bracketed = f(lo) * f(hi) < 0
                    roots = [_bracketed_root(f, lo, hi, 4 * np.spacing(hi)) if bracketed
                             else 0.5 * (lo + hi)]
        else:
            grid = np.linspace(lo, hi, scan)
            sign = np.sign(cot_sum(profile, grid))
            change = np.nonzero(sign[:-1] * sign[1:] <= 0)[0]
            roots = [_bracketed_root(f, grid[k], grid[k + 1]) for k in change]
        if not roots:
            tips.append(RayTip(float(atom), None, math.inf))
            continue
        with np.errstate(divide="ignore"):
            heights = [hilbert_profile(profile, v) for v in roots]
        best = int(np.argmax(heights))
        tips.append(RayTip(float(atom), float(roots[best]), abs(float(heights[best]))))
    return RayTipSet(tuple(tips))


def curve_segments(curve: BoundaryCurve):
    """Segments between consecutive non-diverged samples, with vertex ids."""
    pts = np.column_stack([curve.x, curve.y])
    good = curve.good
    i = np.nonzero(good[:-1] & good[1:])[0]
    v0, v1 = i.copy(), i + 1
    last = len(pts) - 1
    if np.array_equal(pts[0], pts[last]):
        v1 = np.where(v1 == last, 0, v1)
    return pts[i], pts[i + 1], v0, v1


def simplicity_check(curve: BoundaryCurve, allow_slits: bool = False):
    """(is_simple, first offending segment pair or None).

    Segments join consecutive non-diverged samples; neighbours are skipped.
    ``allow_slits`` tolerates a curve running back along itself, as it does on
    both sides of a finite ray.
    """
    start, end, v0, v1 = curve_segments(curve)
    hit = _segments.first_self_contact(start, end, v0, v1, allow_slits=allow_slits)
    if hit is None:
        return True, None
    i, j, _ = hit
    return False, ((int(v0[i]), int(v1[i])), (int(v0[j]), int(v1[j])))
