"""Classical inverse-variance meta-analysis: fixed-effect, DerSimonian-Laird random-effects, study weights."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import EmptySequence, InsufficientStudiesWarning, InputError
from .model import MetaEstimate, StudySequence, WeightMode, WeightModel, WeightRow


def _arrays(seq: StudySequence) -> tuple[np.ndarray, np.ndarray]:
    if len(seq) == 0:
        raise EmptySequence("Meta-analysis needs at least one study")
    estimates = np.array([record.estimate for record in seq.records], dtype=float)
    variances = np.array([record.std_error**2 for record in seq.records], dtype=float)
    return estimates, variances


def _dl_tau2(estimates: np.ndarray, variances: np.ndarray) -> float:
    n = estimates.size
    if n < 2:
        return 0.0
    w = 1.0 / variances
    sum_w = float(np.sum(w))
    pooled = float(np.sum(w * estimates)) / sum_w
    q = float(np.sum(w * (estimates - pooled) ** 2))
    c = sum_w - float(np.sum(w * w)) / sum_w
    return max(0.0, (q - (n - 1)) / c)


def _pooled(estimates: np.ndarray, variances: np.ndarray, tau2: float) -> MetaEstimate:
    w = 1.0 / (variances + tau2)
    sum_w = float(np.sum(w))
    return MetaEstimate(
        estimate=float(np.sum(w * estimates)) / sum_w,
        variance=1.0 / sum_w,
        tau2=tau2,
        weights=tuple(float(x) for x in w / sum_w),
    )


def fe_estimate(seq: StudySequence) -> MetaEstimate:
    estimates, variances = _arrays(seq)
    return _pooled(estimates, variances, 0.0)


def dl_tau(seq: StudySequence) -> float:
    """DerSimonian-Laird moment estimate of the between-study standard deviation."""
    estimates, variances = _arrays(seq)
    if estimates.size < 2:
        warnings.warn(
            "Heterogeneity is undefined for a single study; using tau = 0",
            InsufficientStudiesWarning,
            stacklevel=2,
        )
        return 0.0
    return math.sqrt(_dl_tau2(estimates, variances))


def re_estimate(seq: StudySequence, tau: float | None = None) -> MetaEstimate:
    estimates, variances = _arrays(seq)
    tau2 = _dl_tau2(estimates, variances) if tau is None else tau * tau
    return _pooled(estimates, variances, tau2)


def weights_table(seq: StudySequence, mode: WeightMode, model: WeightModel) -> list[WeightRow]:
    """Study weights in percent.

    Retrospective: every study's weight in the full-sequence meta-analysis.
    Sequential: at each prefix 1..m, the weight of study m, re-estimating tau per prefix under RE.
    """
    if model not in ("fe", "re"):
        raise InputError(f"Unknown weights model {model!r}")
    estimates, variances = _arrays(seq)
    ids = [record.id for record in seq.records]

    def tau2_for(prefix_estimates: np.ndarray, prefix_variances: np.ndarray) -> float:
        return _dl_tau2(prefix_estimates, prefix_variances) if model == "re" else 0.0

    if mode == "retrospective":
        pooled = _pooled(estimates, variances, tau2_for(estimates, variances))
        return [
            WeightRow(step=i, study_id=study_id, weight_percent=100.0 * weight)
            for i, (study_id, weight) in enumerate(zip(ids, pooled.weights), start=1)
        ]
    if mode == "sequential":
        rows: list[WeightRow] = []
        for m in range(1, len(ids) + 1):
            prefix_estimates, prefix_variances = estimates[:m], variances[:m]
            pooled = _pooled(prefix_estimates, prefix_variances, tau2_for(prefix_estimates, prefix_variances))
            rows.append(WeightRow(step=m, study_id=ids[m - 1], weight_percent=100.0 * pooled.weights[-1]))
        return rows
    raise InputError(f"Unknown weights mode {mode!r}")
