from ..metrics import MetricsPoint, MetricsSeries, WindowAggregator
from .compare import ComparisonReport, RunComparison, compare, convergence_step
from .experiment import (
    EvalResult,
    ExperimentConfig,
    ExperimentError,
    evaluate,
    run_experiment,
)
from .presets import PRESET_NAMES, build_preset

__all__ = [
    "ComparisonReport",
    "EvalResult",
    "ExperimentConfig",
    "ExperimentError",
    "MetricsPoint",
    "MetricsSeries",
    "PRESET_NAMES",
    "RunComparison",
    "WindowAggregator",
    "build_preset",
    "compare",
    "convergence_step",
    "evaluate",
    "run_experiment",
]
