from __future__ import annotations

import logging
from dataclasses import replace

from .engines import credible_interval, run_trace_grid, run_trace_labeled, run_trace_re
from .metrics import lindley_gaussian, lindley_numeric, w2_gaussian, wp_numeric
from .model import (
    Belief,
    EngineOutput,
    FixedTau,
    GaussianBelief,
    GridBelief,
    ModelConfig,
    ResearchTrace,
    StudySequence,
    TraceRow,
)
from .sequence import freeze_schedule

logger = logging.getLogger(__name__)


def run_engine(seq: StudySequence, config: ModelConfig) -> EngineOutput:
    if config.model == "labeled-random-effects":
        return run_trace_labeled(seq, config)
    if config.model == "random-effects" and not isinstance(config.schedule.tau_spec, FixedTau):
        return run_trace_grid(seq, config)
    return run_trace_re(seq, config)


def _contribution(prev: Belief, cur: Belief, config: ModelConfig) -> tuple[float, float, float]:
    if config.metric_p == 2 and isinstance(prev, GaussianBelief) and isinstance(cur, GaussianBelief):
        w = w2_gaussian(prev, cur)
    else:
        w = wp_numeric(prev, cur, p=config.metric_p, quantile_n=config.quantile_n)
    w1 = wp_numeric(prev, cur, p=1, quantile_n=config.quantile_n)
    if isinstance(prev, GridBelief) and isinstance(cur, GridBelief):
        lindley = lindley_numeric(prev, cur)
    else:
        lindley = lindley_gaussian(prev, cur)
    return w, w1, lindley


def build_trace(output: EngineOutput, config: ModelConfig) -> ResearchTrace:
    trace = ResearchTrace(model=config.model, warnings=list(output.warnings))
    previous: Belief | None = None
    for step, (belief, ids) in enumerate(zip(output.posteriors, output.step_ids)):
        if previous is None:
            w, w1, lindley = 0.0, 0.0, 0.0
        else:
            w, w1, lindley = _contribution(previous, belief, config)
        lo, hi = credible_interval(belief, 0.95)
        trace.rows.append(
            TraceRow(
                step=step,
                study_ids=ids,
                post_mean=float(belief.mean),
                post_sd=float(belief.sd),
                ci95_lo=lo,
                ci95_hi=hi,
                w_contribution=w,
                lindley_contribution=lindley,
                w1_contribution=w1,
            )
        )
        previous = belief
    return trace


def trace_research(seq: StudySequence, config: ModelConfig, *, retrospective_beliefs: bool = False) -> ResearchTrace:
    """Run the configured engine and measure every step's contribution."""
    if retrospective_beliefs:
        config = replace(config, schedule=freeze_schedule(config.schedule))
    output = run_engine(seq, config)
    trace = build_trace(output, config)
    logger.info("traced %d update steps under %s", len(trace.rows) - 1, config.model)
    return trace
