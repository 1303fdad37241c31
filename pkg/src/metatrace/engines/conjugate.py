from __future__ import annotations

import logging
import math
from typing import Iterable

from ..errors import NonPositiveVariance, UnsupportedModel
from ..model import EngineOutput, FixedTau, GaussianBelief, ModelConfig, StudyRecord, StudySequence

logger = logging.getLogger(__name__)


def conjugate_update(prior: GaussianBelief, obs_mean: float, obs_var: float) -> GaussianBelief:
    if not (obs_var > 0):
        raise NonPositiveVariance(f"Observation variance must be > 0, got {obs_var}")
    prior_precision = 1.0 / prior.variance
    obs_precision = 1.0 / obs_var
    post_var = 1.0 / (prior_precision + obs_precision)
    post_mean = post_var * (prior.mean * prior_precision + obs_mean * obs_precision)
    return GaussianBelief(mean=post_mean, sd=math.sqrt(post_var))


def effective_obs_variance(record: StudyRecord, tau: float) -> float:
    """Sampling variance plus between-study variance, the random-effects marginal."""
    return record.std_error * record.std_error + tau * tau


def update_group(belief: GaussianBelief, group: Iterable[StudyRecord], tau: float) -> GaussianBelief:
    for record in group:
        belief = conjugate_update(belief, record.estimate, effective_obs_variance(record, tau))
    return belief


def batch_posterior(prior: GaussianBelief, records: Iterable[StudyRecord], tau: float) -> GaussianBelief:
    """Single-shot precision-weighted combination of the prior and all records."""
    precision = 1.0 / prior.variance
    weighted = prior.mean * precision
    for record in records:
        w = 1.0 / effective_obs_variance(record, tau)
        precision += w
        weighted += w * record.estimate
    return GaussianBelief(mean=weighted / precision, sd=math.sqrt(1.0 / precision))


def resolve_fixed_tau(config: ModelConfig, warnings: list[str]) -> float:
    tau_spec = config.schedule.tau_spec
    if config.model == "fixed-effect":
        if isinstance(tau_spec, FixedTau) and tau_spec.value != 0.0:
            warnings.append(f"fixed-effect model ignores tau={tau_spec.value}; using 0")
        return 0.0
    if not isinstance(tau_spec, FixedTau):
        raise UnsupportedModel("The closed-form engine needs a fixed tau; use the grid engine otherwise")
    return tau_spec.value


def run_trace_re(seq: StudySequence, config: ModelConfig) -> EngineOutput:
    if config.model not in ("fixed-effect", "random-effects"):
        raise UnsupportedModel(f"run_trace_re cannot run model {config.model!r}")

    output = EngineOutput(posteriors=[config.prior], step_ids=[()])
    tau = resolve_fixed_tau(config, output.warnings)

    belief = config.prior
    for step, group in enumerate(seq.groups(), start=1):
        belief = update_group(belief, group, tau)
        output.posteriors.append(belief)
        output.step_ids.append(tuple(record.id for record in group))
        output.taus.append(tau)
        logger.debug("step %d: mean=%.6g sd=%.6g", step, belief.mean, belief.sd)
    return output
