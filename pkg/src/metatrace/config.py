from __future__ import annotations

import json
import math
import re
from pathlib import Path
from typing import Any, get_args

from .errors import InputError, SchemaViolation
from .model import (
    BeliefSchedule,
    FixedTau,
    GaussianBelief,
    HalfNormalTau,
    KappaEntry,
    ModelConfig,
    ModelName,
    PlugInDL,
    TauSpec,
)

SCHEMA_VERSION = 1
_TOP_KEYS = {"schema", "model", "prior", "tau", "kappa_schedule", "metric", "grid"}
_LABEL_RE = re.compile(r"^[A-Za-z0-9_-]+$")


def _object(value: Any, path: str, allowed: set[str], required: set[str]) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise SchemaViolation(path, "expected an object")
    for key in value:
        if key not in allowed:
            raise SchemaViolation(f"{path}/{key}", "unknown key")
    for key in sorted(required):
        if key not in value:
            raise SchemaViolation(f"{path}/{key}", "required key is missing")
    return value


def _number(value: Any, path: str, *, minimum: float | None = None, exclusive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaViolation(path, f"expected a finite number, got {value!r}")
    number = float(value)
    if minimum is not None:
        if exclusive and not number > minimum:
            raise SchemaViolation(path, f"must be > {minimum:g}, got {number!r}")
        if not exclusive and not number >= minimum:
            raise SchemaViolation(path, f"must be >= {minimum:g}, got {number!r}")
    return number


def _integer(value: Any, path: str, *, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(path, f"expected an integer, got {value!r}")
    if value < minimum:
        raise SchemaViolation(path, f"must be >= {minimum}, got {value}")
    return value


def _parse_prior(value: Any) -> GaussianBelief:
    prior = _object(value, "/prior", {"mean", "sd", "widen"}, {"mean", "sd"})
    mean = _number(prior["mean"], "/prior/mean")
    sd = _number(prior["sd"], "/prior/sd", minimum=0.0, exclusive=True)
    widen = _number(prior.get("widen", 0.0), "/prior/widen", minimum=0.0)
    return GaussianBelief(mean=mean, sd=math.hypot(sd, widen))


def _parse_tau(value: Any) -> TauSpec:
    tau = _object(value, "/tau", {"mode", "value", "scale"}, {"mode"})
    mode = tau["mode"]
    if mode == "fixed":
        _object(tau, "/tau", {"mode", "value"}, {"value"})
        return FixedTau(_number(tau["value"], "/tau/value", minimum=0.0))
    if mode == "plugin-dl":
        _object(tau, "/tau", {"mode"}, set())
        return PlugInDL()
    if mode == "halfnormal":
        _object(tau, "/tau", {"mode", "scale"}, {"scale"})
        return HalfNormalTau(_number(tau["scale"], "/tau/scale", minimum=0.0, exclusive=True))
    raise SchemaViolation("/tau/mode", f"expected 'fixed', 'plugin-dl' or 'halfnormal', got {mode!r}")


def _parse_schedule(value: Any, tau_spec: TauSpec) -> BeliefSchedule:
    if not isinstance(value, list):
        raise SchemaViolation("/kappa_schedule", "expected an array")
    entries: list[KappaEntry] = []
    for i, item in enumerate(value):
        path = f"/kappa_schedule/{i}"
        entry = _object(item, path, {"from", "label", "kappa"}, {"from", "label", "kappa"})
        label = entry["label"]
        if not isinstance(label, str) or not _LABEL_RE.match(label):
            raise SchemaViolation(f"{path}/label", f"expected an identifier, got {label!r}")
        entries.append(
            KappaEntry(
                effective_from=_integer(entry["from"], f"{path}/from", minimum=1),
                label=label,
                kappa=_number(entry["kappa"], f"{path}/kappa", minimum=0.0, exclusive=True),
            )
        )
    try:
        return BeliefSchedule(entries=tuple(entries), tau_spec=tau_spec)
    except InputError as exc:
        raise SchemaViolation("/kappa_schedule", str(exc)) from exc


def config_from_dict(data: Any) -> ModelConfig:
    root = _object(data, "", _TOP_KEYS, {"schema", "model", "prior"})
    if type(root["schema"]) is not int or root["schema"] != SCHEMA_VERSION:
        raise SchemaViolation("/schema", f"unsupported schema version {root['schema']!r}")

    model = root["model"]
    if model not in get_args(ModelName):
        raise SchemaViolation("/model", f"unknown model {model!r}")

    if "tau" in root:
        tau_spec = _parse_tau(root["tau"])
    elif model == "fixed-effect":
        tau_spec = FixedTau(0.0)
    else:
        raise SchemaViolation("/tau", "required key is missing")
    if model != "random-effects" and not isinstance(tau_spec, FixedTau):
        raise SchemaViolation("/tau/mode", f"model {model!r} needs a fixed tau")

    metric = _object(root.get("metric", {}), "/metric", {"p"}, set())
    p = _integer(metric.get("p", 2), "/metric/p", minimum=1)
    if p not in (1, 2):
        raise SchemaViolation("/metric/p", f"only 1 and 2 are supported, got {p}")

    grid = _object(root.get("grid", {}), "/grid", {"n", "quantile_n"}, set())
    sizes: dict[str, int] = {}
    for key, default in (("n", 512), ("quantile_n", 1024)):
        size = _integer(grid.get(key, default), f"/grid/{key}", minimum=64)
        if size & (size - 1):
            raise SchemaViolation(f"/grid/{key}", f"must be a power of two, got {size}")
        sizes[key] = size

    return ModelConfig(
        model=model,
        prior=_parse_prior(root["prior"]),
        schedule=_parse_schedule(root.get("kappa_schedule", []), tau_spec),
        metric_p=p,
        grid_n=sizes["n"],
        quantile_n=sizes["quantile_n"],
    )


def parse_config_json(path: str | Path) -> ModelConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except UnicodeDecodeError as exc:
        raise SchemaViolation("", f"config is not valid UTF-8 (byte {exc.start})") from exc
    except json.JSONDecodeError as exc:
        raise SchemaViolation("", f"invalid JSON: {exc}") from exc
    return config_from_dict(data)


def _tau_to_dict(tau_spec: TauSpec) -> dict[str, Any]:
    if isinstance(tau_spec, FixedTau):
        return {"mode": "fixed", "value": tau_spec.value}
    if isinstance(tau_spec, HalfNormalTau):
        return {"mode": "halfnormal", "scale": tau_spec.scale}
    return {"mode": "plugin-dl"}


def config_to_dict(config: ModelConfig) -> dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "model": config.model,
        "prior": {"mean": config.prior.mean, "sd": config.prior.sd},
        "tau": _tau_to_dict(config.schedule.tau_spec),
        "kappa_schedule": [
            {"from": entry.effective_from, "label": entry.label, "kappa": entry.kappa}
            for entry in config.schedule.entries
        ],
        "metric": {"p": config.metric_p},
        "grid": {"n": config.grid_n, "quantile_n": config.quantile_n},
    }


def write_config_json(config: ModelConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n", encoding="utf-8")
