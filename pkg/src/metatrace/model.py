from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from scipy.integrate import trapezoid

from .errors import InvalidBelief, InvalidSchedule, UnsupportedModel

ModelName = Literal["fixed-effect", "random-effects", "labeled-random-effects"]
WeightMode = Literal["sequential", "retrospective"]
WeightModel = Literal["fe", "re"]
ScenarioName = Literal["innovation-I", "innovation-II"]


@dataclass(frozen=True, slots=True)
class StudyRecord:
    id: str
    seq_index: int
    group_id: str
    estimate: float
    std_error: float
    label: str | None = None


@dataclass(frozen=True, slots=True)
class StudySequence:
    records: tuple[StudyRecord, ...]
    labels: frozenset[str]

    def __len__(self) -> int:
        return len(self.records)

    def groups(self) -> list[tuple[StudyRecord, ...]]:
        """Update steps in arrival order; members of a group stay in seq_index order."""
        steps: list[list[StudyRecord]] = []
        for record in self.records:
            if steps and steps[-1][-1].group_id == record.group_id:
                steps[-1].append(record)
            else:
                steps.append([record])
        return [tuple(step) for step in steps]


@dataclass(frozen=True, slots=True)
class GaussianBelief:
    mean: float
    sd: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise InvalidBelief(f"Belief mean must be finite, got {self.mean}")
        if not (math.isfinite(self.sd) and self.sd > 0):
            raise InvalidBelief(f"Belief sd must be positive and finite, got {self.sd}")

    @property
    def variance(self) -> float:
        return self.sd * self.sd


@dataclass(frozen=True, slots=True, eq=False)
class JointGaussianState:
    """Joint Gaussian over (theta, gamma_1..gamma_L); theta is always index 0."""

    mean: np.ndarray
    cov: np.ndarray
    label_order: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean", np.array(self.mean, dtype=float, copy=True))
        object.__setattr__(self, "cov", np.array(self.cov, dtype=float, copy=True))
        dim = 1 + len(self.label_order)
        if self.mean.shape != (dim,) or self.cov.shape != (dim, dim):
            raise InvalidBelief(
                f"State dimension mismatch: mean {self.mean.shape}, cov {self.cov.shape}, labels {len(self.label_order)}"
            )
        scale = max(float(np.max(np.abs(self.cov))), 1e-300)
        if float(np.max(np.abs(self.cov - self.cov.T))) > 1e-10 * scale:
            raise InvalidBelief("State covariance is not symmetric")
        self.mean.setflags(write=False)
        self.cov.setflags(write=False)

    def index_of(self, label: str) -> int:
        return 1 + self.label_order.index(label)

    def theta_marginal(self) -> GaussianBelief:
        return GaussianBelief(mean=float(self.mean[0]), sd=math.sqrt(float(self.cov[0, 0])))


@dataclass(frozen=True, slots=True, eq=False)
class GridBelief:
    """Log density on a uniform grid over [lo, hi], normalized under the trapezoid rule."""

    lo: float
    hi: float
    log_density: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "log_density", np.array(self.log_density, dtype=float, copy=True))
        if not self.hi > self.lo:
            raise InvalidBelief(f"Grid bounds must satisfy hi > lo, got [{self.lo}, {self.hi}]")
        if self.log_density.ndim != 1 or self.log_density.size < 64:
            raise InvalidBelief(f"Grid needs at least 64 points, got {self.log_density.size}")
        mass = float(trapezoid(self.density, self.points))
        if abs(mass - 1.0) > 1e-6:
            raise InvalidBelief(f"Grid density integrates to {mass}, expected 1")
        self.log_density.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.log_density.size)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def density(self) -> np.ndarray:
        return np.exp(self.log_density)

    @property
    def mean(self) -> float:
        return float(trapezoid(self.points * self.density, self.points))

    @property
    def sd(self) -> float:
        x = self.points
        centered = x - self.mean
        return math.sqrt(float(trapezoid(centered * centered * self.density, x)))


Belief = GaussianBelief | GridBelief


@dataclass(frozen=True, slots=True)
class FixedTau:
    value: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value >= 0):
            raise InvalidSchedule(f"Fixed tau must be >= 0, got {self.value}")


@dataclass(frozen=True, slots=True)
class PlugInDL:
    pass


@dataclass(frozen=True, slots=True)
class HalfNormalTau:
    scale: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise InvalidSchedule(f"HalfNormal scale must be > 0, got {self.scale}")


TauSpec = FixedTau | PlugInDL | HalfNormalTau


@dataclass(frozen=True, slots=True)
class KappaEntry:
    effective_from: int
    label: str
    kappa: float


@dataclass(frozen=True, slots=True)
class BeliefSchedule:
    entries: tuple[KappaEntry, ...] = ()
    tau_spec: TauSpec = field(default_factory=FixedTau)

    def __post_init__(self) -> None:
        last_from: dict[str, int] = {}
        for entry in self.entries:
            if entry.effective_from < 1:
                raise InvalidSchedule(f"Entry for {entry.label!r} must start at seq_index >= 1")
            if not (math.isfinite(entry.kappa) and entry.kappa > 0):
                raise InvalidSchedule(f"kappa for {entry.label!r} must be > 0, got {entry.kappa}")
            previous = last_from.get(entry.label)
            if previous is not None and entry.effective_from <= previous:
                raise InvalidSchedule(
                    f"Entries for {entry.label!r} must have strictly increasing effective_from"
                )
            last_from[entry.label] = entry.effective_from

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(entry.label for entry in self.entries))

    @property
    def is_static(self) -> bool:
        return all(sum(1 for e in self.entries if e.label == label) == 1 for label in self.labels)


def _is_power_of_two(value: int) -> bool:
    return value >= 64 and value & (value - 1) == 0


@dataclass(frozen=True, slots=True)
class ModelConfig:
    model: ModelName
    prior: GaussianBelief
    schedule: BeliefSchedule = field(default_factory=BeliefSchedule)
    metric_p: int = 2
    grid_n: int = 512
    quantile_n: int = 1024

    def __post_init__(self) -> None:
        if self.metric_p not in (1, 2):
            raise UnsupportedModel(f"metric_p must be 1 or 2, got {self.metric_p}")
        if not _is_power_of_two(self.grid_n) or not _is_power_of_two(self.quantile_n):
            raise UnsupportedModel("grid_n and quantile_n must be powers of two >= 64")


@dataclass(frozen=True, slots=True)
class TraceRow:
    step: int
    study_ids: tuple[str, ...]
    post_mean: float
    post_sd: float
    ci95_lo: float
    ci95_hi: float
    w_contribution: float
    lindley_contribution: float
    w1_contribution: float


@dataclass(slots=True)
class ResearchTrace:
    model: ModelName
    rows: list[TraceRow] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass(slots=True)
class EngineOutput:
    """Index 0 of `posteriors` is the prior; one entry per update step after that."""

    posteriors: list[Belief]
    step_ids: list[tuple[str, ...]]
    final_state: JointGaussianState | None = None
    taus: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class MetaEstimate:
    estimate: float
    variance: float
    tau2: float
    weights: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class WeightRow:
    step: int
    study_id: str
    weight_percent: float


@dataclass(frozen=True, slots=True)
class SweepRow:
    kappa_value: float
    w_contribution: float
    post_mean_final: float
    post_sd_final: float


@dataclass(frozen=True, slots=True)
class DGPParams:
    theta_star: float = 0.0
    beta: float = 1.0
    var_z: float = 0.01
    var_y: float = 0.01
    n_old: int = 10
    n_new: int = 20
    seed: int = 0
    reported_se: float | None = None


@dataclass(frozen=True, slots=True)
class ScenarioSpec:
    name: ScenarioName
    kappa_old_before: float
    kappa_old_after: float
    kappa_new: float
    switch_step: int = 11
    tau: float = 0.01


@dataclass(frozen=True, slots=True)
class RunManifest:
    tool_version: str
    config_digest: str
    input_digest: str
    timestamp: str
    rng_identity: str | None = None
    parameters: dict[str, Any] = field(default_factory=dict)
