from __future__ import annotations

import json
import math

import pytest

from metatrace.config import config_from_dict, config_to_dict, parse_config_json, write_config_json
from metatrace.errors import SchemaViolation
from metatrace.model import FixedTau, HalfNormalTau, PlugInDL
from metatrace.sequence import kappa_at


def _base(**overrides):
    data = {
        "schema": 1,
        "model": "random-effects",
        "prior": {"mean": 0.0, "sd": 1.0},
        "tau": {"mode": "fixed", "value": 0.1},
    }
    data.update(overrides)
    return data


def test_minimum_wage_config(sample_files) -> None:
    config = parse_config_json(sample_files["minimum_wage_config"])
    assert config.model == "labeled-random-effects"
    assert config.prior.mean == -0.15
    assert config.prior.sd == pytest.approx(0.30805843601498725, abs=1e-9)
    assert config.prior.sd == pytest.approx(math.sqrt(0.07**2 + 0.3**2))
    assert config.schedule.tau_spec == FixedTau(0.0)
    assert config.schedule.is_static
    assert {label: kappa_at(config.schedule, label, 6) for label in config.schedule.labels} == {
        "fed": 0.3,
        "st": 0.3,
        "DID": 0.3,
        "CK": 0.05,
    }


def test_defaults() -> None:
    config = config_from_dict(_base())
    assert (config.metric_p, config.grid_n, config.quantile_n) == (2, 512, 1024)
    assert config.schedule.entries == ()

    fixed_effect = config_from_dict({"schema": 1, "model": "fixed-effect", "prior": {"mean": 0, "sd": 2}})
    assert fixed_effect.schedule.tau_spec == FixedTau(0.0)


def test_tau_modes() -> None:
    assert config_from_dict(_base(tau={"mode": "plugin-dl"})).schedule.tau_spec == PlugInDL()
    assert config_from_dict(_base(tau={"mode": "halfnormal", "scale": 0.5})).schedule.tau_spec == HalfNormalTau(0.5)


@pytest.mark.parametrize(
    ("data", "pointer"),
    [
        (_base(kappa_schedule=[{"from": 1, "label": "A", "kappa": 0}]), "/kappa_schedule/0/kappa"),
        (_base(tau={"mode": "halfnormal"}), "/tau/scale"),
        (_base(tau={"mode": "fixed", "value": 0.1, "scale": 1.0}), "/tau/scale"),
        (_base(tau={"mode": "gamma"}), "/tau/mode"),
        (_base(extra=True), "/extra"),
        (_base(prior={"mean": 0.0, "sd": -1.0}), "/prior/sd"),
        (_base(prior={"mean": 0.0}), "/prior/sd"),
        (_base(prior={"mean": "zero", "sd": 1.0}), "/prior/mean"),
        (_base(metric={"p": 3}), "/metric/p"),
        (_base(grid={"n": 500}), "/grid/n"),
        (_base(grid={"quantile_n": 32}), "/grid/quantile_n"),
        (_base(model="mixed"), "/model"),
        (_base(schema=2), "/schema"),
        (_base(schema=1.0), "/schema"),
        (_base(schema=True), "/schema"),
        (_base(kappa_schedule=[{"from": 0, "label": "A", "kappa": 1}]), "/kappa_schedule/0/from"),
        (_base(kappa_schedule=[{"from": 1, "label": "A B", "kappa": 1}]), "/kappa_schedule/0/label"),
        (
            _base(kappa_schedule=[{"from": 3, "label": "A", "kappa": 1}, {"from": 2, "label": "A", "kappa": 2}]),
            "/kappa_schedule",
        ),
        (
            _base(model="labeled-random-effects", tau={"mode": "plugin-dl"}),
            "/tau/mode",
        ),
        ({"schema": 1, "model": "random-effects", "prior": {"mean": 0, "sd": 1}}, "/tau"),
    ],
)
def test_schema_violations_point_at_the_offending_value(data, pointer: str) -> None:
    with pytest.raises(SchemaViolation) as info:
        config_from_dict(data)
    assert info.value.path == pointer
    assert str(info.value).startswith(pointer + ":")


def test_invalid_json(tmp_path) -> None:
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaViolation) as info:
        parse_config_json(path)
    assert info.value.path == "/"


def test_non_utf8_config(tmp_path) -> None:
    path = tmp_path / "config.json"
    path.write_bytes(b'{"schema": 1, "model": "\xe9"}')
    with pytest.raises(SchemaViolation, match="UTF-8") as info:
        parse_config_json(path)
    assert info.value.path == "/"


def test_canonical_form_reparses(tmp_path) -> None:
    source = _base(
        model="labeled-random-effects",
        prior={"mean": -0.15, "sd": 0.07, "widen": 0.3},
        tau={"mode": "fixed", "value": 0.0},
        kappa_schedule=[{"from": 1, "label": "A", "kappa": 1e-4}, {"from": 11, "label": "A", "kappa": 1.0}],
        metric={"p": 1},
    )
    config = config_from_dict(source)
    path = tmp_path / "config.json"
    write_config_json(config, path)
    assert parse_config_json(path) == config

    canonical = json.loads(path.read_text(encoding="utf-8"))
    assert canonical == config_to_dict(config)
    assert "widen" not in canonical["prior"]
