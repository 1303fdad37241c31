from __future__ import annotations

import numpy as np
from scipy.stats import norm

from ..errors import InputError
from ..model import Belief, GaussianBelief
from .grid import grid_quantile


def credible_interval(belief: Belief, level: float = 0.95) -> tuple[float, float]:
    """Equal-tailed credible interval."""
    if not 0.0 < level < 1.0:
        raise InputError(f"Credible level must lie in (0, 1), got {level}")
    tail = (1.0 - level) / 2.0
    if isinstance(belief, GaussianBelief):
        z = float(norm.ppf(1.0 - tail))
        return belief.mean - z * belief.sd, belief.mean + z * belief.sd
    lo, hi = grid_quantile(belief, np.array([tail, 1.0 - tail]))
    return float(lo), float(hi)
