from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from metatrace.model import StudyRecord, StudySequence
from metatrace.sequence import validate_sequence


def make_sequence(
    estimates: Sequence[float],
    std_errors: Sequence[float] | float,
    *,
    labels: Sequence[str | None] | None = None,
    groups: Sequence[str] | None = None,
    prefix: str = "s",
) -> StudySequence:
    n = len(estimates)
    if isinstance(std_errors, (int, float)):
        std_errors = [float(std_errors)] * n
    labels = labels if labels is not None else [None] * n
    ids = [f"{prefix}{i + 1:02d}" for i in range(n)]
    groups = groups if groups is not None else ids
    return validate_sequence(
        StudyRecord(
            id=ids[i],
            seq_index=i + 1,
            group_id=groups[i],
            estimate=float(estimates[i]),
            std_error=float(std_errors[i]),
            label=labels[i],
        )
        for i in range(n)
    )


def fe_oracle(estimates: Sequence[float], std_errors: Sequence[float], tau: float = 0.0) -> tuple[float, float]:
    """Inverse-variance pooled estimate and variance, written out longhand."""
    total_w = 0.0
    total_wy = 0.0
    for y, se in zip(estimates, std_errors):
        w = 1.0 / (se * se + tau * tau)
        total_w += w
        total_wy += w * y
    return total_wy / total_w, 1.0 / total_w


def dl_tau2_oracle(estimates: Sequence[float], std_errors: Sequence[float]) -> float:
    w = [1.0 / (se * se) for se in std_errors]
    sum_w = sum(w)
    pooled = sum(wi * y for wi, y in zip(w, estimates)) / sum_w
    q = sum(wi * (y - pooled) ** 2 for wi, y in zip(w, estimates))
    c = sum_w - sum(wi * wi for wi in w) / sum_w
    return max(0.0, (q - (len(w) - 1)) / c)


def brute_force_labeled(
    prior_mean: float,
    prior_sd: float,
    records: Sequence[StudyRecord],
    tau: float,
    kappas: dict[str, float],
    *,
    half_width: float = 7.0,
    points: int = 141,
) -> tuple[float, float]:
    """Theta marginal (mean, sd) of the labeled model from a dense tensor grid over (theta, gamma_1..gamma_L)."""
    labels = list(dict.fromkeys(record.label for record in records))
    axis = np.linspace(-half_width, half_width, points)
    mesh = np.meshgrid(*([axis] * (1 + len(labels))), indexing="ij")
    theta = mesh[0]

    log_post = -0.5 * ((theta - prior_mean) / prior_sd) ** 2
    for k, label in enumerate(labels, start=1):
        log_post = log_post - 0.5 * (mesh[k] / kappas[label]) ** 2
    for record in records:
        gamma = mesh[1 + labels.index(record.label)]
        var = record.std_error**2 + tau**2
        log_post = log_post - 0.5 * (record.estimate - theta - gamma) ** 2 / var

    weights = np.exp(log_post - log_post.max())
    mass = weights.sum()
    mean = float((weights * theta).sum() / mass)
    var = float((weights * (theta - mean) ** 2).sum() / mass)
    return mean, math.sqrt(var)


def random_labeled_instance(rng: np.random.Generator, *, max_labels: int = 2, max_studies: int = 4):
    n_labels = int(rng.integers(1, max_labels + 1))
    names = ["A", "B"][:n_labels]
    n = int(rng.integers(1, max_studies + 1))
    labels = [names[int(rng.integers(0, n_labels))] for _ in range(n)]
    seq = make_sequence(
        rng.uniform(-1.0, 1.0, n),
        rng.uniform(0.3, 1.0, n),
        labels=labels,
    )
    kappas = {name: float(rng.uniform(0.3, 1.0)) for name in names}
    prior_sd = float(rng.uniform(0.3, 1.0))
    tau = float(rng.uniform(0.0, 0.3))
    return seq, kappas, prior_sd, tau


def permutations_of(seq: StudySequence, count: int, rng: np.random.Generator) -> list[StudySequence]:
    """Reassign seq_index so records arrive in shuffled order."""
    out: list[StudySequence] = []
    records = list(seq.records)
    for _ in range(count):
        order = rng.permutation(len(records))
        out.append(
            validate_sequence(
                StudyRecord(
                    id=records[j].id,
                    seq_index=i + 1,
                    group_id=records[j].id,
                    estimate=records[j].estimate,
                    std_error=records[j].std_error,
                    label=records[j].label,
                )
                for i, j in enumerate(order)
            )
        )
    return out


def is_nonincreasing(values: Sequence[float], slack: float = 0.0) -> bool:
    return all(b <= a + slack for a, b in itertools.pairwise(values))
