from __future__ import annotations

import csv
import math
import re
from pathlib import Path

from .errors import (
    DuplicateStudyId,
    InvalidIdentifier,
    MissingColumn,
    NonFiniteEstimate,
    NonPositiveStdError,
    RecordError,
    UnexpectedColumn,
    UnparsableNumber,
    UnreadableText,
)
from .model import StudyRecord, StudySequence
from .sequence import validate_sequence

STUDY_COLUMNS = ("id", "seq_index", "group_id", "estimate", "std_error", "label")
_IDENT_RE = re.compile(r"^[A-Za-z0-9_-]+$")


def _parse_float(value: str, column: str, row: int, record_id: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise UnparsableNumber(f"{column} is not a number: {value!r}", record_id=record_id, row=row) from None


def _parse_row(fields: dict[str, str], row: int) -> StudyRecord:
    record_id = fields["id"]
    if not _IDENT_RE.match(record_id):
        raise InvalidIdentifier(f"id must match [A-Za-z0-9_-]+, got {record_id!r}", row=row)
    group_id = fields["group_id"] or record_id
    if not _IDENT_RE.match(group_id):
        raise InvalidIdentifier(f"group_id must match [A-Za-z0-9_-]+, got {group_id!r}", record_id=record_id, row=row)
    label = fields["label"] or None
    if label is not None and not _IDENT_RE.match(label):
        raise InvalidIdentifier(f"label must match [A-Za-z0-9_-]+, got {label!r}", record_id=record_id, row=row)

    try:
        seq_index = int(fields["seq_index"])
    except ValueError:
        raise UnparsableNumber(
            f"seq_index is not an integer: {fields['seq_index']!r}", record_id=record_id, row=row
        ) from None

    estimate = _parse_float(fields["estimate"], "estimate", row, record_id)
    if not math.isfinite(estimate):
        raise NonFiniteEstimate(f"estimate must be finite, got {estimate}", record_id=record_id, row=row)
    std_error = _parse_float(fields["std_error"], "std_error", row, record_id)
    if not (math.isfinite(std_error) and std_error > 0):
        raise NonPositiveStdError(f"std_error must be > 0, got {std_error}", record_id=record_id, row=row)

    return StudyRecord(
        id=record_id,
        seq_index=seq_index,
        group_id=group_id,
        estimate=estimate,
        std_error=std_error,
        label=label,
    )


def parse_studies_csv(path: str | Path) -> StudySequence:
    """Read a studies CSV; row numbers in errors are file line numbers (header is row 1)."""
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except UnicodeDecodeError as exc:
        raise UnreadableText(f"{path}: studies CSV is not valid UTF-8 (byte {exc.start})") from exc
    reader = csv.reader(text.splitlines())
    header = [name.strip() for name in next(reader, [])]

    for column in STUDY_COLUMNS:
        if column not in header:
            raise MissingColumn(f"Studies CSV is missing column {column!r}")
    extra = [name for name in header if name not in STUDY_COLUMNS]
    if extra:
        raise UnexpectedColumn(f"Studies CSV has unexpected columns: {', '.join(extra)}")

    records: list[StudyRecord] = []
    rows_by_id: dict[str, int] = {}
    for row, values in enumerate(reader, start=2):
        if not any(value.strip() for value in values):
            continue
        if len(values) != len(header):
            raise MissingColumn(f"row {row}: expected {len(header)} fields, got {len(values)}")
        fields = {name: value.strip() for name, value in zip(header, values)}
        record = _parse_row(fields, row)
        if record.id in rows_by_id:
            raise DuplicateStudyId(
                f"study id already used on row {rows_by_id[record.id]}", record_id=record.id, row=row
            )
        records.append(record)
        rows_by_id[record.id] = row

    try:
        return validate_sequence(records)
    except RecordError as exc:
        raise type(exc)(exc.detail, record_id=exc.record_id, row=rows_by_id.get(exc.record_id or "")) from exc


def write_studies_csv(seq: StudySequence, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(STUDY_COLUMNS)
        for record in seq.records:
            writer.writerow(
                [
                    record.id,
                    record.seq_index,
                    record.group_id,
                    repr(float(record.estimate)),
                    repr(float(record.std_error)),
                    record.label or "",
                ]
            )
