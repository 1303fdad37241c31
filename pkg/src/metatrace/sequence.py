from __future__ import annotations

import math
import sys
from dataclasses import replace
from typing import Iterable

from .errors import (
    DuplicateSeqIndex,
    DuplicateStudyId,
    EmptySequence,
    InvalidSeqIndex,
    LabelUnknownAtTime,
    NonContiguousGroup,
    NonFiniteEstimate,
    NonPositiveStdError,
)
from .model import BeliefSchedule, KappaEntry, StudyRecord, StudySequence

# kappa used to say "this methodology is believed unbiased"; zero would make the joint covariance singular
KAPPA_UNBIASED = 1e-4


def _precision_representable(std_error: float) -> bool:
    # inverse variance and its square (DL weights) must stay finite and nonzero
    variance = std_error * std_error
    return sys.float_info.min <= variance * variance < math.inf


def validate_sequence(records: Iterable[StudyRecord]) -> StudySequence:
    items = list(records)
    if not items:
        raise EmptySequence("At least one study record is required")

    seen_ids: set[str] = set()
    for record in items:
        if record.id in seen_ids:
            raise DuplicateStudyId(f"study id {record.id!r} appears more than once", record_id=record.id)
        seen_ids.add(record.id)
        if not (math.isfinite(record.std_error) and record.std_error > 0):
            raise NonPositiveStdError(f"std_error must be > 0, got {record.std_error}", record_id=record.id)
        if not _precision_representable(record.std_error):
            raise NonPositiveStdError(
                f"std_error {record.std_error} is outside the range whose precision is representable",
                record_id=record.id,
            )
        if not math.isfinite(record.estimate):
            raise NonFiniteEstimate(f"estimate must be finite, got {record.estimate}", record_id=record.id)
        if record.seq_index < 1:
            raise InvalidSeqIndex(f"seq_index must be >= 1, got {record.seq_index}", record_id=record.id)

    ordered = sorted(items, key=lambda record: record.seq_index)
    for previous, current in zip(ordered, ordered[1:]):
        if previous.seq_index == current.seq_index:
            raise DuplicateSeqIndex(
                f"seq_index {current.seq_index} also used by {previous.id!r}", record_id=current.id
            )

    last_seen: dict[str, int] = {}
    for position, record in enumerate(ordered):
        previous_position = last_seen.get(record.group_id)
        if previous_position is not None:
            previous = ordered[previous_position]
            if previous_position != position - 1 or record.seq_index != previous.seq_index + 1:
                raise NonContiguousGroup(
                    f"group {record.group_id!r} is interrupted between seq_index "
                    f"{previous.seq_index} and {record.seq_index}",
                    record_id=record.id,
                )
        last_seen[record.group_id] = position

    normalized = tuple(replace(record, label=record.label or None) for record in ordered)
    labels = frozenset(record.label for record in normalized if record.label is not None)
    return StudySequence(records=normalized, labels=labels)


def step_time(group: tuple[StudyRecord, ...]) -> int:
    """The seq_index at which an update group enters the literature."""
    return min(record.seq_index for record in group)


def kappa_at(schedule: BeliefSchedule, label: str, seq_index: int) -> float:
    current: KappaEntry | None = None
    for entry in schedule.entries:
        if entry.label != label or entry.effective_from > seq_index:
            continue
        if current is None or entry.effective_from > current.effective_from:
            current = entry
    if current is None:
        raise LabelUnknownAtTime(label, seq_index)
    return current.kappa


def freeze_schedule(schedule: BeliefSchedule) -> BeliefSchedule:
    """Replace every label's history by its final kappa, effective from the first study."""
    final: dict[str, float] = {}
    for entry in sorted(schedule.entries, key=lambda e: e.effective_from):
        final[entry.label] = entry.kappa
    entries = tuple(KappaEntry(1, label, final[label]) for label in schedule.labels)
    return BeliefSchedule(entries=entries, tau_spec=schedule.tau_spec)


def substitute_kappa(schedule: BeliefSchedule, label: str, kappa: float) -> BeliefSchedule:
    """Swap in `kappa` for every entry of `label`, keeping effective_from; adds a static entry if absent."""
    if label not in schedule.labels:
        entries = (*schedule.entries, KappaEntry(1, label, kappa))
    else:
        entries = tuple(
            replace(entry, kappa=kappa) if entry.label == label else entry for entry in schedule.entries
        )
    return BeliefSchedule(entries=entries, tau_spec=schedule.tau_spec)
