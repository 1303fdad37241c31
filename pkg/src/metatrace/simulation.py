"""Synthetic literatures with a methodological innovation.

The first `n_old` studies use an established method (label "method-1") whose
results carry a systematic bias of mean `beta`; the following `n_new`
studies use an unbiased method ("method-2"):

    z_i | l_i ~ N(beta * l_i, var_z)
    y_i | z_i ~ N(theta_star + z_i, var_y)
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .model import (
    BeliefSchedule,
    DGPParams,
    FixedTau,
    GaussianBelief,
    KappaEntry,
    ModelConfig,
    ScenarioSpec,
    StudyRecord,
    StudySequence,
)
from .sequence import KAPPA_UNBIASED, validate_sequence

LABEL_OLD = "method-1"
LABEL_NEW = "method-2"
RNG_IDENTITY = f"numpy.random.Generator(Philox)/numpy-{np.__version__}"

# not stated for the published simulations; narrow enough that the first biased study cannot outweigh the innovation
DEFAULT_SIMULATION_PRIOR = GaussianBelief(mean=0.0, sd=0.5)

SCENARIOS: dict[str, ScenarioSpec] = {
    "innovation-I": ScenarioSpec(
        name="innovation-I", kappa_old_before=1.0, kappa_old_after=1.0, kappa_new=KAPPA_UNBIASED
    ),
    "innovation-II": ScenarioSpec(
        name="innovation-II", kappa_old_before=KAPPA_UNBIASED, kappa_old_after=1.0, kappa_new=KAPPA_UNBIASED
    ),
    "innovation-II-doubt-0.2": ScenarioSpec(
        name="innovation-II", kappa_old_before=KAPPA_UNBIASED, kappa_old_after=0.2, kappa_new=KAPPA_UNBIASED
    ),
    "innovation-II-unchanged": ScenarioSpec(
        name="innovation-II",
        kappa_old_before=KAPPA_UNBIASED,
        kappa_old_after=KAPPA_UNBIASED,
        kappa_new=KAPPA_UNBIASED,
    ),
}


def _check_params(params: DGPParams) -> None:
    if not (params.var_z > 0 and params.var_y > 0):
        raise InputError("DGP variances must be > 0")
    if params.n_old < 0 or params.n_new < 0 or params.n_old + params.n_new < 1:
        raise InputError("DGP needs n_old, n_new >= 0 and at least one study")
    if not 0 <= params.seed < 2**64:
        raise InputError("seed must be a 64-bit unsigned integer")
    if params.reported_se is not None and not params.reported_se > 0:
        raise InputError("reported_se must be > 0")


def simulate_dgp(params: DGPParams) -> StudySequence:
    _check_params(params)
    total = params.n_old + params.n_new
    rng = np.random.Generator(np.random.Philox(params.seed))

    method = np.array([1.0] * params.n_old + [0.0] * params.n_new)
    z = rng.normal(params.beta * method, math.sqrt(params.var_z))
    y = rng.normal(params.theta_star + z, math.sqrt(params.var_y))

    width = max(2, len(str(total)))
    records: list[StudyRecord] = []
    for i in range(total):
        is_old = i < params.n_old
        if params.reported_se is not None:
            se = params.reported_se
        elif is_old:
            se = math.sqrt(params.var_y + params.var_z)
        else:
            se = math.sqrt(params.var_y)
        study_id = f"s{i + 1:0{width}d}"
        records.append(
            StudyRecord(
                id=study_id,
                seq_index=i + 1,
                group_id=study_id,
                estimate=float(y[i]),
                std_error=se,
                label=LABEL_OLD if is_old else LABEL_NEW,
            )
        )
    return validate_sequence(records)


def scenario_schedule(spec: ScenarioSpec) -> BeliefSchedule:
    tau_spec = FixedTau(spec.tau)
    if spec.name == "innovation-I":
        entries = (
            KappaEntry(1, LABEL_OLD, spec.kappa_old_before),
            KappaEntry(1, LABEL_NEW, spec.kappa_new),
        )
        return BeliefSchedule(entries=entries, tau_spec=tau_spec)
    if spec.name == "innovation-II":
        if spec.switch_step < 2:
            raise InputError("innovation-II needs switch_step >= 2")
        entries = (
            KappaEntry(1, LABEL_OLD, spec.kappa_old_before),
            KappaEntry(spec.switch_step, LABEL_OLD, spec.kappa_old_after),
            KappaEntry(spec.switch_step, LABEL_NEW, spec.kappa_new),
        )
        return BeliefSchedule(entries=entries, tau_spec=tau_spec)
    raise InputError(f"Unknown scenario {spec.name!r}")


def scenario_config(
    spec: ScenarioSpec,
    params: DGPParams | None = None,
    prior: GaussianBelief = DEFAULT_SIMULATION_PRIOR,
) -> ModelConfig:
    params = params or DGPParams()
    if not 1 <= spec.switch_step <= params.n_old + params.n_new:
        raise InputError(f"switch_step {spec.switch_step} is outside the simulated sequence")
    return ModelConfig(model="labeled-random-effects", prior=prior, schedule=scenario_schedule(spec))
