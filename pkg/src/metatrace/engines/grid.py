from __future__ import annotations

import logging
import math
import warnings
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.stats import halfnorm, norm

from ..classical import dl_tau
from ..errors import GridUnderflow, InsufficientStudiesWarning, NonMonotoneCDF, UnsupportedModel
from ..model import (
    EngineOutput,
    GaussianBelief,
    GridBelief,
    HalfNormalTau,
    ModelConfig,
    PlugInDL,
    StudyRecord,
    StudySequence,
    TauSpec,
)
from ..sequence import validate_sequence
from .conjugate import batch_posterior

logger = logging.getLogger(__name__)

# exp() underflows to zero below this
LOG_UNDERFLOW = -745.0
_LOG_FLOOR = -1000.0
_BOUND_SIGMAS = 6.0
_TAU_SCALES = 3.0


def normalize_log_density(lo: float, hi: float, log_values: np.ndarray) -> GridBelief:
    peak = float(np.max(log_values))
    if not math.isfinite(peak):
        raise GridUnderflow("Log density has no finite value on the grid")
    shifted = log_values - peak
    if int(np.count_nonzero(shifted > LOG_UNDERFLOW)) < 2:
        raise GridUnderflow("Density is concentrated in a single grid cell; widen the bounds or refine the grid")
    shifted = np.maximum(shifted, _LOG_FLOOR)
    x = np.linspace(lo, hi, shifted.size)
    mass = float(trapezoid(np.exp(shifted), x))
    return GridBelief(lo=lo, hi=hi, log_density=shifted - math.log(mass))


def rasterize(belief: GaussianBelief, lo: float, hi: float, n: int = 512) -> GridBelief:
    x = np.linspace(lo, hi, n)
    return normalize_log_density(lo, hi, norm.logpdf(x, loc=belief.mean, scale=belief.sd))


def grid_bounds(records: Sequence[StudyRecord], prior: GaussianBelief, tau_max: float) -> tuple[float, float]:
    estimates = [record.estimate for record in records]
    spread = max(math.sqrt(record.std_error**2 + tau_max**2) for record in records)
    lo = min(min(estimates) - _BOUND_SIGMAS * spread, prior.mean - _BOUND_SIGMAS * prior.sd)
    hi = max(max(estimates) + _BOUND_SIGMAS * spread, prior.mean + _BOUND_SIGMAS * prior.sd)
    return lo, hi


def grid_cdf(belief: GridBelief) -> np.ndarray:
    cdf = cumulative_trapezoid(belief.density, belief.points, initial=0.0)
    if np.any(np.diff(cdf) < -1e-12) or not cdf[-1] > 0:
        raise NonMonotoneCDF("Grid CDF is not monotone")
    return cdf / cdf[-1]


def grid_quantile(belief: GridBelief, u: np.ndarray) -> np.ndarray:
    return np.interp(u, grid_cdf(belief), belief.points)


def plugin_tau(records: Sequence[StudyRecord]) -> float:
    # a one-study prefix has no heterogeneity information; tau = 0 is the documented convention
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InsufficientStudiesWarning)
        return dl_tau(validate_sequence(records))


def _halfnormal_posterior(
    records: Sequence[StudyRecord],
    prior: GaussianBelief,
    scale: float,
    grid_n: int,
    bounds: tuple[float, float],
) -> tuple[GridBelief, float]:
    lo, hi = bounds
    theta = np.linspace(lo, hi, grid_n)
    taus = np.linspace(0.0, _TAU_SCALES * scale, grid_n)

    log_joint = norm.logpdf(theta, loc=prior.mean, scale=prior.sd)[:, None] + halfnorm.logpdf(taus, scale=scale)[None, :]
    for record in records:
        var = record.std_error**2 + taus**2
        resid = record.estimate - theta
        log_joint += -0.5 * np.log(2.0 * math.pi * var)[None, :] - 0.5 * (resid * resid)[:, None] / var[None, :]

    peak = float(np.max(log_joint))
    if not math.isfinite(peak):
        raise GridUnderflow("Joint (theta, tau) density has no finite value on the grid")
    joint = np.exp(log_joint - peak)
    marginal = trapezoid(joint, taus, axis=1)
    tau_marginal = trapezoid(joint, theta, axis=0)
    tau_mean = float(trapezoid(taus * tau_marginal, taus) / trapezoid(tau_marginal, taus))

    with np.errstate(divide="ignore"):
        log_marginal = np.log(marginal)
    return normalize_log_density(lo, hi, log_marginal), tau_mean


def grid_posterior(
    groups: Sequence[Sequence[StudyRecord]],
    prior: GaussianBelief,
    tau_spec: TauSpec,
    grid_n: int = 512,
    bounds: tuple[float, float] | None = None,
) -> GridBelief:
    records = [record for group in groups for record in group]
    if isinstance(tau_spec, HalfNormalTau):
        bounds = bounds or grid_bounds(records, prior, _TAU_SCALES * tau_spec.scale)
        belief, _ = _halfnormal_posterior(records, prior, tau_spec.scale, grid_n, bounds)
        return belief
    if isinstance(tau_spec, PlugInDL):
        tau_hat = plugin_tau(records)
        bounds = bounds or grid_bounds(records, prior, tau_hat)
        return rasterize(batch_posterior(prior, records, tau_hat), *bounds, n=grid_n)
    raise UnsupportedModel("grid_posterior needs a plug-in or HalfNormal tau specification")


def run_trace_grid(seq: StudySequence, config: ModelConfig) -> EngineOutput:
    tau_spec = config.schedule.tau_spec
    if config.model != "random-effects" or not isinstance(tau_spec, (PlugInDL, HalfNormalTau)):
        raise UnsupportedModel("The grid engine runs the random-effects model with a plug-in or HalfNormal tau")

    groups = seq.groups()
    records = list(seq.records)
    if isinstance(tau_spec, PlugInDL):
        prefix_taus = []
        for t in range(1, len(groups) + 1):
            prefix_taus.append(plugin_tau([record for group in groups[:t] for record in group]))
        bounds = grid_bounds(records, config.prior, max(prefix_taus))
    else:
        bounds = grid_bounds(records, config.prior, _TAU_SCALES * tau_spec.scale)

    output = EngineOutput(posteriors=[rasterize(config.prior, *bounds, n=config.grid_n)], step_ids=[()])
    for t, group in enumerate(groups, start=1):
        prefix = [record for g in groups[:t] for record in g]
        if isinstance(tau_spec, PlugInDL):
            tau = prefix_taus[t - 1]
            belief = rasterize(batch_posterior(config.prior, prefix, tau), *bounds, n=config.grid_n)
        else:
            belief, tau = _halfnormal_posterior(prefix, config.prior, tau_spec.scale, config.grid_n, bounds)
        output.posteriors.append(belief)
        output.step_ids.append(tuple(record.id for record in group))
        output.taus.append(tau)
        logger.debug("grid step %d: tau=%.6g mean=%.6g sd=%.6g", t, tau, belief.mean, belief.sd)
    return output
