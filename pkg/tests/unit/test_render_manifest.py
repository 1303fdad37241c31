from __future__ import annotations

import csv
import json
import re
from dataclasses import replace

from metatrace.manifest import (
    build_manifest,
    digest_bytes,
    digest_config,
    manifest_path_for,
    write_manifest,
)
from metatrace.model import GaussianBelief, ResearchTrace, SweepRow, TraceRow, WeightRow
from metatrace.render import write_sweep_csv, write_trace_csv, write_weights_csv


def _trace() -> ResearchTrace:
    return ResearchTrace(
        model="random-effects",
        rows=[
            TraceRow(0, (), 0.0, 1.0, -1.96, 1.96, 0.0, 0.0, 0.0),
            TraceRow(1, ("a", "b"), 0.1 + 0.2, 0.5, -0.68, 1.28, 0.7071067811865476, 0.6931471805599453, 0.6),
        ],
    )


def _read(path):
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.reader(handle))


def test_trace_csv_columns(tmp_path) -> None:
    plain = tmp_path / "trace.csv"
    write_trace_csv(_trace(), plain)
    rows = _read(plain)
    assert rows[0] == ["step", "study_ids", "post_mean", "post_sd", "ci95_lo", "ci95_hi", "w_contribution"]
    assert rows[2][:2] == ["1", "a;b"]
    assert float(rows[2][2]) == 0.1 + 0.2
    assert rows[2][2] == "0.30000000000000004"

    full = tmp_path / "full.csv"
    write_trace_csv(_trace(), full, metric="all")
    rows = _read(full)
    assert rows[0][-2:] == ["w1", "lindley"]
    assert rows[2][-2:] == ["0.6", "0.6931471805599453"]

    write_trace_csv(_trace(), full, metric="lindley")
    assert _read(full)[0][-1] == "lindley"
    assert not plain.read_bytes().count(b"\r")


def test_weights_and_sweep_csv(tmp_path) -> None:
    weights = tmp_path / "weights.csv"
    write_weights_csv([WeightRow(1, "s01", 100.0), WeightRow(2, "s02", 50.0)], weights)
    assert _read(weights) == [["step", "study_id", "weight_percent"], ["1", "s01", "100.0"], ["2", "s02", "50.0"]]

    sweep = tmp_path / "sweep.csv"
    write_sweep_csv([SweepRow(0.01, 0.2, -0.1, 0.05)], sweep)
    assert _read(sweep) == [
        ["kappa_value", "w_contribution_at_focus_step", "post_mean_final", "post_sd_final"],
        ["0.01", "0.2", "-0.1", "0.05"],
    ]


def test_digests_ignore_line_endings() -> None:
    assert digest_bytes(b"a,b\r\n1,2\r\n") == digest_bytes(b"a,b\n1,2\n")
    assert digest_bytes(b"a,b\n1,2\n") != digest_bytes(b"a,b\n1,3\n")
    assert re.fullmatch(r"[0-9a-f]{64}", digest_bytes(b""))


def test_config_digest_tracks_content(minimum_wage) -> None:
    _, config = minimum_wage
    assert digest_config(config) == digest_config(replace(config))
    assert digest_config(config) != digest_config(replace(config, prior=GaussianBelief(-0.15, 0.3)))


def test_manifest_file(tmp_path, minimum_wage) -> None:
    _, config = minimum_wage
    manifest = build_manifest(config, "ab" * 32, parameters={"metric": "w2"})
    assert re.fullmatch(r"\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ", manifest.timestamp)

    path = manifest_path_for(tmp_path / "trace.csv")
    assert path.name == "trace.manifest.json"
    write_manifest(manifest, path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["hash"] == "sha256"
    assert payload["input_digest"] == "ab" * 32
    assert payload["config_digest"] == digest_config(config)
    assert payload["parameters"] == {"metric": "w2"}
    assert "rng_identity" not in payload
