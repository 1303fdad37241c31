"""Learning metrics between successive posteriors.

Wasserstein distances use the one-dimensional quantile representation
W_p(a, b)^p = integral over u in (0, 1) of |F_a^-1(u) - F_b^-1(u)|^p.

Lindley's information follows the entropy definition
E_post[log post] - E_prior[log prior], which for Gaussians equals
log(sd_prior / sd_post): positive when the posterior narrows. The closed form
sometimes quoted with the opposite sign is not used.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import norm

from .engines.grid import grid_quantile
from .errors import GridUnderflow, InputError
from .model import Belief, GaussianBelief, GridBelief

# geometric halvings applied to the first and last quantile cells
TAIL_DEPTH = 16


def w2_gaussian(a: GaussianBelief, b: GaussianBelief) -> float:
    return math.hypot(b.mean - a.mean, b.sd - a.sd)


@lru_cache(maxsize=16)
def quantile_nodes(quantile_n: int, tail_depth: int = TAIL_DEPTH) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes u = (k - 1/2)/n with the two end cells split geometrically toward 0 and 1."""
    if quantile_n < 2:
        raise InputError(f"quantile_n must be >= 2, got {quantile_n}")
    h = 1.0 / quantile_n
    interior = (np.arange(2, quantile_n, dtype=float) - 0.5) * h

    j = np.arange(tail_depth, dtype=float)
    tail_nodes = np.append(0.75 * h / 2.0**j, h / 2.0 ** (tail_depth + 1))
    tail_weights = np.append(h / 2.0 ** (j + 1), h / 2.0**tail_depth)

    nodes = np.concatenate([tail_nodes[::-1], interior, 1.0 - tail_nodes])
    weights = np.concatenate([tail_weights[::-1], np.full(interior.size, h), tail_weights])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def belief_quantiles(belief: Belief, u: np.ndarray) -> np.ndarray:
    if isinstance(belief, GaussianBelief):
        return belief.mean + belief.sd * norm.ppf(u)
    return grid_quantile(belief, u)


def wp_numeric(a: Belief, b: Belief, p: int = 2, quantile_n: int = 1024) -> float:
    if p not in (1, 2):
        raise InputError(f"Only p = 1 and p = 2 are supported, got {p}")
    nodes, weights = quantile_nodes(quantile_n)
    gap = np.abs(belief_quantiles(a, nodes) - belief_quantiles(b, nodes))
    integral = float(np.sum(weights * gap**p))
    return integral ** (1.0 / p)


def lindley_gaussian(prior: GaussianBelief, post: GaussianBelief) -> float:
    return math.log(prior.sd / post.sd)


def _expected_log_density(belief: GridBelief) -> float:
    if not np.all(np.isfinite(belief.log_density)):
        raise GridUnderflow("Grid log density has non-finite values")
    return float(trapezoid(belief.density * belief.log_density, belief.points))


def lindley_numeric(prior: GridBelief, post: GridBelief) -> float:
    return _expected_log_density(post) - _expected_log_density(prior)
