"""Simulation and exact checks for squared Bessel particle systems.

Three equivalent representations are simulated: ordered particles, the
Wishart matrix whose eigenvalues they are, and the elementary symmetric
polynomials of the particles.
"""

from .analysis import McSummary, detect_hitting_times, drift_regression_ep, mc_estimate, moment_curve
from .constructions import build_non_unique, build_pinned_nonnegative, plan_glue, simulate_glued
from .domain import (
    ClassificationReport,
    SystemParams,
    classify,
    classify_nonnegative_solution,
    classify_strong_uniqueness,
    n_star,
    ranks,
    structure_prediction,
)
from .rng import RngSpec, gaussian_stream
from .sde import PathAborted, PathRecord, SimulationGrid, simulate_particles, simulate_polys, simulate_wishart

__all__ = [
    "ClassificationReport", "McSummary", "PathAborted", "PathRecord", "RngSpec", "SimulationGrid",
    "SystemParams", "build_non_unique", "build_pinned_nonnegative", "classify",
    "classify_nonnegative_solution", "classify_strong_uniqueness", "detect_hitting_times",
    "drift_regression_ep", "gaussian_stream", "mc_estimate", "moment_curve", "n_star", "plan_glue",
    "ranks", "simulate_glued", "simulate_particles", "simulate_polys", "simulate_wishart",
    "structure_prediction",
]
