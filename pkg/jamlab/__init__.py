from .core import (
    Model,
    RngSpec,
    StatSummary,
    StopTimeCalculator,
    build_rsa_model,
    builtin_model,
    estimate_mean_duration,
    estimate_p,
    estimate_stop_time,
    exact_expected_duration,
    load_model,
    mean_stop_time,
    run_rsa,
)

from ._version import __version__  # noqa: F401

__all__ = [
    "Model",
    "RngSpec",
    "StatSummary",
    "StopTimeCalculator",
    "build_rsa_model",
    "builtin_model",
    "estimate_mean_duration",
    "estimate_p",
    "estimate_stop_time",
    "exact_expected_duration",
    "load_model",
    "mean_stop_time",
    "run_rsa",
]
