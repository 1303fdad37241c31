from .api import load_config, load_studies, run_sweep, run_trace, run_weights, simulate_to_dir, sweep_kappa
from .manifest import TOOL_VERSION as __version__
from .model import (
    BeliefSchedule,
    DGPParams,
    FixedTau,
    GaussianBelief,
    GridBelief,
    HalfNormalTau,
    KappaEntry,
    ModelConfig,
    PlugInDL,
    ResearchTrace,
    StudyRecord,
    StudySequence,
)
from .sequence import validate_sequence
from .trace import trace_research

__all__ = [
    "__version__",
    "BeliefSchedule",
    "DGPParams",
    "FixedTau",
    "GaussianBelief",
    "GridBelief",
    "HalfNormalTau",
    "KappaEntry",
    "ModelConfig",
    "PlugInDL",
    "ResearchTrace",
    "StudyRecord",
    "StudySequence",
    "load_config",
    "load_studies",
    "run_sweep",
    "run_trace",
    "run_weights",
    "simulate_to_dir",
    "sweep_kappa",
    "trace_research",
    "validate_sequence",
]
