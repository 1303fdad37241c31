"""Labeled random-effects model as a static-state linear-Gaussian filter.

State vector is (theta, gamma_1, ..., gamma_L); gamma_k is the shared bias of
methodology k with prior N(0, kappa_k^2). Each study observes
theta + gamma_label with noise variance std_error^2 + tau^2.
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky

from ..errors import SingularCovariance, UnlabeledRecord, UnsupportedModel
from ..model import (
    BeliefSchedule,
    EngineOutput,
    FixedTau,
    GaussianBelief,
    JointGaussianState,
    ModelConfig,
    StudyRecord,
    StudySequence,
)
from ..sequence import kappa_at, step_time
from .conjugate import effective_obs_variance

logger = logging.getLogger(__name__)


def initial_state(prior: GaussianBelief) -> JointGaussianState:
    return JointGaussianState(
        mean=np.array([prior.mean], dtype=float),
        cov=np.array([[prior.variance]], dtype=float),
        label_order=(),
    )


def register_label(state: JointGaussianState, label: str, kappa: float) -> JointGaussianState:
    dim = state.mean.size
    mean = np.append(state.mean, 0.0)
    cov = np.zeros((dim + 1, dim + 1))
    cov[:dim, :dim] = state.cov
    cov[dim, dim] = kappa * kappa
    return JointGaussianState(mean=mean, cov=cov, label_order=(*state.label_order, label))


def _require_label(record: StudyRecord) -> str:
    if record.label is None:
        raise UnlabeledRecord("labeled model needs a methodology label on every study", record_id=record.id)
    return record.label


def _check_positive_definite(cov: np.ndarray) -> None:
    try:
        cholesky(cov, lower=True)
    except LinAlgError as exc:
        raise SingularCovariance(f"Joint covariance lost positive definiteness: {exc}") from exc


def kalman_labeled_update(
    state: JointGaussianState,
    group: Sequence[StudyRecord],
    tau: float,
    schedule: BeliefSchedule,
) -> JointGaussianState:
    time = step_time(tuple(group))
    for record in group:
        label = _require_label(record)
        if label not in state.label_order:
            state = register_label(state, label, kappa_at(schedule, label, time))

    mean = np.array(state.mean, dtype=float)
    cov = np.array(state.cov, dtype=float)
    identity = np.eye(mean.size)
    for record in sorted(group, key=lambda r: r.seq_index):
        h = np.zeros(mean.size)
        h[0] = 1.0
        h[state.index_of(record.label)] = 1.0
        noise = effective_obs_variance(record, tau)

        innovation_var = float(h @ cov @ h) + noise
        gain = cov @ h / innovation_var
        mean = mean + gain * (record.estimate - float(h @ mean))
        # Joseph form keeps the update symmetric and positive definite
        a = identity - np.outer(gain, h)
        cov = a @ cov @ a.T + noise * np.outer(gain, gain)
        cov = 0.5 * (cov + cov.T)

    _check_positive_definite(cov)
    return JointGaussianState(mean=mean, cov=cov, label_order=state.label_order)


def batch_labeled_posterior(
    prior: GaussianBelief,
    groups: Iterable[Sequence[StudyRecord]],
    tau: float,
    kappas: dict[str, float],
) -> JointGaussianState:
    """Joint posterior over all groups at once, in information form."""
    records = [record for group in groups for record in group]
    label_order = tuple(dict.fromkeys(_require_label(record) for record in records))
    dim = 1 + len(label_order)

    precision = np.zeros((dim, dim))
    information = np.zeros(dim)
    precision[0, 0] = 1.0 / prior.variance
    information[0] = prior.mean / prior.variance
    for k, label in enumerate(label_order, start=1):
        precision[k, k] = 1.0 / (kappas[label] * kappas[label])

    for record in records:
        h = np.zeros(dim)
        h[0] = 1.0
        h[1 + label_order.index(record.label)] = 1.0
        noise = effective_obs_variance(record, tau)
        precision += np.outer(h, h) / noise
        information += h * record.estimate / noise

    try:
        factor = cho_factor(precision, lower=True)
    except LinAlgError as exc:
        raise SingularCovariance(f"Joint precision is not positive definite: {exc}") from exc
    cov = cho_solve(factor, np.eye(dim))
    cov = 0.5 * (cov + cov.T)
    mean = cho_solve(factor, information)
    return JointGaussianState(mean=mean, cov=cov, label_order=label_order)


def run_trace_labeled(seq: StudySequence, config: ModelConfig) -> EngineOutput:
    if config.model != "labeled-random-effects":
        raise UnsupportedModel(f"run_trace_labeled cannot run model {config.model!r}")
    tau_spec = config.schedule.tau_spec
    if not isinstance(tau_spec, FixedTau):
        raise UnsupportedModel("labeled-random-effects model needs a fixed tau")
    for record in seq.records:
        _require_label(record)

    tau = tau_spec.value
    schedule = config.schedule
    groups = seq.groups()
    output = EngineOutput(posteriors=[config.prior], step_ids=[()])

    if schedule.is_static:
        state = initial_state(config.prior)
        for group in groups:
            state = kalman_labeled_update(state, group, tau, schedule)
            output.posteriors.append(state.theta_marginal())
            output.step_ids.append(tuple(record.id for record in group))
            output.taus.append(tau)
        output.final_state = state
        return output

    logger.debug("time-varying schedule: recomputing %d batch posteriors", len(groups))
    state = initial_state(config.prior)
    for t, group in enumerate(groups, start=1):
        now = step_time(group)
        prefix = groups[:t]
        labels = dict.fromkeys(record.label for g in prefix for record in g)
        kappas = {label: kappa_at(schedule, label, now) for label in labels}
        state = batch_labeled_posterior(config.prior, prefix, tau, kappas)
        output.posteriors.append(state.theta_marginal())
        output.step_ids.append(tuple(record.id for record in group))
        output.taus.append(tau)
    output.final_state = state
    return output
