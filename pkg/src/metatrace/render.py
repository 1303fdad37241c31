from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Literal, Sequence

from .model import ResearchTrace, SweepRow, WeightRow

MetricColumns = Literal["w1", "w2", "lindley", "all"]

TRACE_COLUMNS = ("step", "study_ids", "post_mean", "post_sd", "ci95_lo", "ci95_hi", "w_contribution")
WEIGHTS_COLUMNS = ("step", "study_id", "weight_percent")
SWEEP_COLUMNS = ("kappa_value", "w_contribution_at_focus_step", "post_mean_final", "post_sd_final")


def _num(value: float) -> str:
    # repr is the shortest string that round-trips
    return repr(float(value))


def _write_rows(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def extra_trace_columns(metric: MetricColumns) -> tuple[str, ...]:
    if metric == "w1":
        return ("w1",)
    if metric == "lindley":
        return ("lindley",)
    if metric == "all":
        return ("w1", "lindley")
    return ()


def trace_table(trace: ResearchTrace, metric: MetricColumns = "w2") -> tuple[tuple[str, ...], list[list[str]]]:
    extras = extra_trace_columns(metric)
    header = TRACE_COLUMNS + extras
    rows: list[list[str]] = []
    for row in trace.rows:
        cells = [
            str(row.step),
            ";".join(row.study_ids),
            _num(row.post_mean),
            _num(row.post_sd),
            _num(row.ci95_lo),
            _num(row.ci95_hi),
            _num(row.w_contribution),
        ]
        for column in extras:
            cells.append(_num(row.w1_contribution if column == "w1" else row.lindley_contribution))
        rows.append(cells)
    return header, rows


def write_trace_csv(trace: ResearchTrace, path: str | Path, metric: MetricColumns = "w2") -> None:
    header, rows = trace_table(trace, metric)
    _write_rows(path, header, rows)


def write_weights_csv(rows: Iterable[WeightRow], path: str | Path) -> None:
    _write_rows(
        path,
        WEIGHTS_COLUMNS,
        ([str(row.step), row.study_id, _num(row.weight_percent)] for row in rows),
    )


def write_sweep_csv(rows: Iterable[SweepRow], path: str | Path) -> None:
    _write_rows(
        path,
        SWEEP_COLUMNS,
        (
            [_num(row.kappa_value), _num(row.w_contribution), _num(row.post_mean_final), _num(row.post_sd_final)]
            for row in rows
        ),
    )
