from __future__ import annotations

import pytest

from metatrace.errors import (
    DuplicateSeqIndex,
    DuplicateStudyId,
    EmptySequence,
    InvalidSchedule,
    InvalidSeqIndex,
    LabelUnknownAtTime,
    NonContiguousGroup,
    NonFiniteEstimate,
    NonPositiveStdError,
)
from metatrace.model import BeliefSchedule, KappaEntry, StudyRecord
from metatrace.sequence import freeze_schedule, kappa_at, step_time, substitute_kappa, validate_sequence


def _record(record_id: str, seq: int, *, group: str | None = None, est: float = 0.5, se: float = 0.1, label=None):
    return StudyRecord(id=record_id, seq_index=seq, group_id=group or record_id, estimate=est, std_error=se, label=label)


def test_single_record_is_valid() -> None:
    seq = validate_sequence([_record("a", 1)])
    assert len(seq) == 1
    assert seq.labels == frozenset()
    assert seq.groups() == [(seq.records[0],)]


def test_records_are_sorted_and_labels_collected() -> None:
    seq = validate_sequence([_record("b", 3, label="x"), _record("a", 1, label="y"), _record("c", 2, label="")])
    assert [r.id for r in seq.records] == ["a", "c", "b"]
    assert seq.records[1].label is None
    assert seq.labels == frozenset({"x", "y"})


def test_validation_is_idempotent() -> None:
    seq = validate_sequence([_record("a", 2), _record("b", 1)])
    assert validate_sequence(seq.records) == seq


def test_empty_input_rejected() -> None:
    with pytest.raises(EmptySequence):
        validate_sequence([])


def test_duplicate_seq_index_names_record() -> None:
    with pytest.raises(DuplicateSeqIndex) as info:
        validate_sequence([_record("a", 1), _record("b", 1)])
    assert info.value.record_id == "b"


@pytest.mark.parametrize("se", [0.0, -0.1, float("inf"), float("nan")])
def test_bad_std_error_rejected(se: float) -> None:
    with pytest.raises(NonPositiveStdError) as info:
        validate_sequence([_record("a", 1, se=se)])
    assert "'a'" in str(info.value)


def test_non_finite_estimate_and_bad_seq_index() -> None:
    with pytest.raises(NonFiniteEstimate):
        validate_sequence([_record("a", 1, est=float("nan"))])
    with pytest.raises(InvalidSeqIndex):
        validate_sequence([_record("a", 0)])


def test_groups_must_be_contiguous() -> None:
    with pytest.raises(NonContiguousGroup):
        validate_sequence([_record("a", 1, group="g"), _record("b", 2), _record("c", 3, group="g")])
    with pytest.raises(NonContiguousGroup):
        validate_sequence([_record("a", 1, group="g"), _record("c", 3, group="g")])


def test_grouped_records_form_one_step() -> None:
    seq = validate_sequence(
        [_record("a", 1), _record("b1", 2, group="b"), _record("b2", 3, group="b"), _record("c", 4)]
    )
    groups = seq.groups()
    assert [[r.id for r in g] for g in groups] == [["a"], ["b1", "b2"], ["c"]]
    assert step_time(groups[1]) == 2


def test_kappa_at_lookup_is_right_continuous() -> None:
    schedule = BeliefSchedule(entries=(KappaEntry(1, "A", 1.0), KappaEntry(11, "A", 0.2)))
    assert kappa_at(schedule, "A", 5) == 1.0
    assert kappa_at(schedule, "A", 10) == 1.0
    assert kappa_at(schedule, "A", 11) == 0.2
    assert kappa_at(schedule, "A", 500) == 0.2
    with pytest.raises(LabelUnknownAtTime):
        kappa_at(schedule, "B", 5)


def test_kappa_before_first_entry_is_unknown() -> None:
    schedule = BeliefSchedule(entries=(KappaEntry(3, "A", 1.0),))
    with pytest.raises(LabelUnknownAtTime) as info:
        kappa_at(schedule, "A", 2)
    assert (info.value.label, info.value.seq_index) == ("A", 2)


@pytest.mark.parametrize(
    "entries",
    [
        (KappaEntry(0, "A", 1.0),),
        (KappaEntry(1, "A", 0.0),),
        (KappaEntry(2, "A", 1.0), KappaEntry(2, "A", 0.5)),
        (KappaEntry(5, "A", 1.0), KappaEntry(2, "A", 0.5)),
    ],
)
def test_invalid_schedules(entries) -> None:
    with pytest.raises(InvalidSchedule):
        BeliefSchedule(entries=entries)


def test_static_detection_and_freezing() -> None:
    schedule = BeliefSchedule(
        entries=(KappaEntry(1, "old", 1e-4), KappaEntry(11, "old", 1.0), KappaEntry(11, "new", 1e-4))
    )
    assert not schedule.is_static
    frozen = freeze_schedule(schedule)
    assert frozen.is_static
    assert kappa_at(frozen, "old", 1) == 1.0
    assert kappa_at(frozen, "new", 1) == 1e-4


def test_substitute_kappa_keeps_timing() -> None:
    schedule = BeliefSchedule(entries=(KappaEntry(1, "A", 1e-4), KappaEntry(11, "A", 1.0), KappaEntry(1, "B", 0.3)))
    swapped = substitute_kappa(schedule, "A", 0.5)
    assert kappa_at(swapped, "A", 3) == 0.5
    assert kappa_at(swapped, "A", 11) == 0.5
    assert kappa_at(swapped, "B", 3) == 0.3

    added = substitute_kappa(schedule, "C", 0.7)
    assert kappa_at(added, "C", 1) == 0.7


def test_repeated_study_id_is_rejected() -> None:
    with pytest.raises(DuplicateStudyId) as info:
        validate_sequence([_record("a", 1), _record("a", 2)])
    assert info.value.record_id == "a"


@pytest.mark.parametrize("se", [1e-170, 1e-80, 1e80, 1e200])
def test_std_error_must_have_a_representable_precision(se: float) -> None:
    with pytest.raises(NonPositiveStdError) as info:
        validate_sequence([_record("a", 1), _record("b", 2, se=se)])
    assert info.value.record_id == "b"


def test_small_but_usable_std_error_is_kept() -> None:
    seq = validate_sequence([_record("a", 1, se=1e-60)])
    assert seq.records[0].std_error == 1e-60
