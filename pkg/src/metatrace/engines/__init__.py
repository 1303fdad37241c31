"""Posterior engines: closed-form conjugate, joint-Gaussian labeled filter, and grid."""

from .conjugate import conjugate_update, effective_obs_variance, run_trace_re
from .grid import grid_posterior, rasterize, run_trace_grid
from .intervals import credible_interval
from .labeled import kalman_labeled_update, run_trace_labeled

__all__ = [
    "conjugate_update",
    "credible_interval",
    "effective_obs_variance",
    "grid_posterior",
    "kalman_labeled_update",
    "rasterize",
    "run_trace_grid",
    "run_trace_labeled",
    "run_trace_re",
]
