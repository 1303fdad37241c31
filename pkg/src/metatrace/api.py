from __future__ import annotations

import logging
import math
from dataclasses import asdict, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .classical import weights_table
from .config import parse_config_json, write_config_json
from .errors import EmptyValueGrid, FocusStepOutOfRange, InputError, UnknownLabel, UnsupportedModel
from .manifest import build_manifest, digest_file, manifest_path_for, write_manifest
from .model import (
    DGPParams,
    ModelConfig,
    ResearchTrace,
    RunManifest,
    StudySequence,
    SweepRow,
    WeightMode,
    WeightModel,
    WeightRow,
)
from .render import MetricColumns, write_sweep_csv, write_trace_csv, write_weights_csv
from .sequence import substitute_kappa
from .simulation import RNG_IDENTITY, SCENARIOS, scenario_config, simulate_dgp
from .studies_csv import parse_studies_csv, write_studies_csv
from .trace import trace_research

logger = logging.getLogger(__name__)


def load_studies(path: str | Path) -> StudySequence:
    return parse_studies_csv(path)


def load_config(path: str | Path) -> ModelConfig:
    return parse_config_json(path)


def run_trace(
    studies_path: str | Path,
    config_path: str | Path,
    output: str | Path,
    *,
    retrospective_beliefs: bool = False,
    metric: MetricColumns = "w2",
) -> tuple[ResearchTrace, RunManifest]:
    seq = load_studies(studies_path)
    config = load_config(config_path)
    trace = trace_research(seq, config, retrospective_beliefs=retrospective_beliefs)
    write_trace_csv(trace, output, metric)

    manifest = build_manifest(
        config,
        digest_file(studies_path),
        parameters={"retrospective_beliefs": retrospective_beliefs, "metric": metric},
    )
    write_manifest(manifest, manifest_path_for(output))
    return trace, manifest


def run_weights(
    studies_path: str | Path,
    output: str | Path,
    *,
    mode: WeightMode = "sequential",
    model: WeightModel = "fe",
) -> list[WeightRow]:
    rows = weights_table(load_studies(studies_path), mode, model)
    write_weights_csv(rows, output)
    logger.info("wrote %d %s %s weights", len(rows), mode, model)
    return rows


def simulate_scenario(
    scenario: str,
    params: DGPParams | None = None,
    *,
    kappa_old_after: float | None = None,
    tau: float | None = None,
) -> tuple[StudySequence, ModelConfig]:
    if scenario not in SCENARIOS:
        raise InputError(f"Unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    params = params or DGPParams()
    spec = SCENARIOS[scenario]
    total = params.n_old + params.n_new
    if spec.name == "innovation-II":
        spec = replace(spec, switch_step=params.n_old + 1)
    else:
        spec = replace(spec, switch_step=max(1, min(params.n_old + 1, total)))
    if kappa_old_after is not None:
        if spec.name != "innovation-II":
            raise InputError("--kappa-old-after only applies to innovation-II scenarios")
        spec = replace(spec, kappa_old_after=kappa_old_after)
    if tau is not None:
        spec = replace(spec, tau=tau)

    seq = simulate_dgp(params)
    config = scenario_config(spec, params)
    return seq, config


def simulate_to_dir(
    out_dir: str | Path,
    scenario: str,
    params: DGPParams | None = None,
    *,
    kappa_old_after: float | None = None,
    tau: float | None = None,
) -> dict[str, Path]:
    """Write studies.csv, config.json and manifest.json for one simulated literature."""
    params = params or DGPParams()
    seq, config = simulate_scenario(scenario, params, kappa_old_after=kappa_old_after, tau=tau)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "studies": out / "studies.csv",
        "config": out / "config.json",
        "manifest": out / "manifest.json",
    }
    write_studies_csv(seq, paths["studies"])
    write_config_json(config, paths["config"])

    parameters = {"scenario": scenario, **asdict(params)}
    manifest = build_manifest(
        config,
        digest_file(paths["studies"]),
        rng_identity=RNG_IDENTITY,
        parameters=parameters,
    )
    write_manifest(manifest, paths["manifest"])
    logger.info("simulated %d studies for %s (seed %d) into %s", len(seq), scenario, params.seed, out)
    return paths


def parse_sweep_param(param: str) -> str:
    kind, _, label = param.partition(":")
    if kind != "kappa" or not label:
        raise InputError(f"--param must look like kappa:<label>, got {param!r}")
    return label


def parse_value_grid(spec: str) -> np.ndarray:
    """`lo:hi:step` inclusive of both ends, or a single value."""
    parts = spec.split(":")
    try:
        numbers = [float(part) for part in parts]
    except ValueError:
        raise InputError(f"--values must be numbers, got {spec!r}") from None
    if not all(math.isfinite(x) for x in numbers):
        raise InputError(f"--values must be finite, got {spec!r}")

    if len(numbers) == 1:
        values = np.array(numbers)
    elif len(numbers) == 3:
        lo, hi, step = numbers
        if step <= 0 or hi < lo:
            raise EmptyValueGrid(f"--values {spec!r} describes no values")
        count = int(round((hi - lo) / step)) + 1
        values = np.linspace(lo, lo + step * (count - 1), count)
    else:
        raise InputError(f"--values must be lo:hi:step or a single value, got {spec!r}")

    if values.size == 0:
        raise EmptyValueGrid(f"--values {spec!r} describes no values")
    if np.any(values <= 0):
        raise InputError(f"kappa values must be > 0, got {spec!r}")
    return values


def sweep_kappa(
    seq: StudySequence,
    config: ModelConfig,
    label: str,
    values: Sequence[float] | np.ndarray,
    focus_step: int,
) -> list[SweepRow]:
    """Re-run the whole trace once per kappa value for `label`."""
    if config.model != "labeled-random-effects":
        raise UnsupportedModel("kappa sweeps need the labeled-random-effects model")
    if label not in seq.labels:
        raise UnknownLabel(f"Label {label!r} does not occur in the studies")
    if len(values) == 0:
        raise EmptyValueGrid("Sweep needs at least one value")
    steps = len(seq.groups())
    if not 1 <= focus_step <= steps:
        raise FocusStepOutOfRange(f"focus step must be in 1..{steps}, got {focus_step}")

    rows: list[SweepRow] = []
    for value in values:
        swept = replace(config, schedule=substitute_kappa(config.schedule, label, float(value)))
        trace = trace_research(seq, swept)
        final = trace.rows[-1]
        rows.append(
            SweepRow(
                kappa_value=float(value),
                w_contribution=trace.rows[focus_step].w_contribution,
                post_mean_final=final.post_mean,
                post_sd_final=final.post_sd,
            )
        )
        logger.debug("kappa[%s]=%r -> contribution %r", label, float(value), rows[-1].w_contribution)
    return rows


def run_sweep(
    studies_path: str | Path,
    config_path: str | Path,
    output: str | Path,
    *,
    param: str,
    values: str,
    focus_step: int,
) -> tuple[list[SweepRow], RunManifest]:
    label = parse_sweep_param(param)
    grid = parse_value_grid(values)
    config = load_config(config_path)
    rows = sweep_kappa(load_studies(studies_path), config, label, grid, focus_step)
    write_sweep_csv(rows, output)

    manifest = build_manifest(
        config,
        digest_file(studies_path),
        parameters={"param": param, "values": values, "focus_step": focus_step, "count": len(rows)},
    )
    write_manifest(manifest, manifest_path_for(output))
    logger.info("swept %d values of kappa[%s]", len(rows), label)
    return rows, manifest
