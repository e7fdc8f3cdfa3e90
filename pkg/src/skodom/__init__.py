"""Planar Brownian exit domains realizing a prescribed law on the real line."""

__version__ = "0.1.0"

from .distributions import (Atoms, Cantor, Distribution, Empirical, Gaussian, Uniform,
                            geometric_atoms, moments, phi, quantile)
from .fourier import FourierSeries, Method, cosine_coefficients, expected_exit_time
from .conformal import BoundaryCurve, RayTipSet, ray_tips, simplicity_check, step_profile, trace
from .geometry import RegionPolygon, boundary_distance, contains, polygonize
from .montecarlo import SimConfig, SimMode, SimulationReport, simulate_disc, simulate_domain

__all__ = [
    "Atoms", "Cantor", "Distribution", "Empirical", "Gaussian", "Uniform",
    "geometric_atoms", "moments", "phi", "quantile",
    "FourierSeries", "Method", "cosine_coefficients", "expected_exit_time",
    "BoundaryCurve", "RayTipSet", "ray_tips", "simplicity_check", "step_profile", "trace",
    "RegionPolygon", "boundary_distance", "contains", "polygonize",
    "SimConfig", "SimMode", "SimulationReport", "simulate_disc", "simulate_domain",
]
