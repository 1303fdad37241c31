from __future__ import annotations


class MetaTraceError(Exception):
    """Base class for every error raised by metatrace."""


class InputError(MetaTraceError, ValueError):
    """Invalid data, configuration, or command-line input."""


class NumericalError(MetaTraceError, ArithmeticError):
    """An engine could not produce a numerically valid result."""


class RecordError(InputError):
    def __init__(self, message: str, *, record_id: str | None = None, row: int | None = None) -> None:
        self.detail = message
        self.record_id = record_id
        self.row = row
        where: list[str] = []
        if row is not None:
            where.append(f"row {row}")
        if record_id is not None:
            where.append(f"record {record_id!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class EmptySequence(InputError):
    pass


class NonPositiveStdError(RecordError):
    pass


class NonFiniteEstimate(RecordError):
    pass


class InvalidSeqIndex(RecordError):
    pass


class DuplicateSeqIndex(RecordError):
    pass


class DuplicateStudyId(RecordError):
    pass


class NonContiguousGroup(RecordError):
    pass


class UnlabeledRecord(RecordError):
    pass


class UnparsableNumber(RecordError):
    pass


class InvalidIdentifier(RecordError):
    pass


class InvalidSchedule(InputError):
    pass


class LabelUnknownAtTime(InputError):
    def __init__(self, label: str, seq_index: int) -> None:
        self.label = label
        self.seq_index = seq_index
        super().__init__(f"No kappa for label {label!r} at seq_index {seq_index}")


class NonPositiveVariance(InputError):
    pass


class InvalidBelief(InputError):
    pass


class UnsupportedModel(InputError):
    pass


class UnreadableText(InputError):
    pass


class MissingColumn(InputError):
    pass


class UnexpectedColumn(InputError):
    pass


class SchemaViolation(InputError):
    def __init__(self, path: str, message: str) -> None:
        self.path = path or "/"
        super().__init__(f"{self.path}: {message}")


class UnknownLabel(InputError):
    pass


class EmptyValueGrid(InputError):
    pass


class FocusStepOutOfRange(InputError):
    pass


class SingularCovariance(NumericalError):
    pass


class GridUnderflow(NumericalError):
    pass


class NonMonotoneCDF(NumericalError):
    pass


class InsufficientStudiesWarning(UserWarning):
    """Heterogeneity requested from fewer than two studies."""
