from . import _utils
from ._base import (
    CapacityError,
    ConsistencyError,
    DomainError,
    JamLabError,
    ModelInvalidError,
    ReplicationEngine,
    StatSummary,
    UsageError,
)
from ._utils import RngSpec
from .annihilation import (
    AnniState,
    AnnihilationEngine,
    IdentityCheck,
    StopTimeCalculator,
    build_rsa_model,
    cdf_from_gf,
    cdf_recursive,
    check_harmonic_identity,
    empirical_cdf,
    estimate_stop_time,
    mean_stop_time,
    simulate_annihilation,
    stop_time_gap,
    survival_coefficients,
)
from .expoly import ExpPoly, SeriesGF
from .lattice import (
    BUILTIN_TYPES,
    ConfigInstance,
    ConfigType,
    ConflictGraph,
    Model,
    Region,
    blocks,
    builtin_model,
    conflict_graph,
    enumerate_configs,
    load_model,
    model_family,
    twin_classes,
    with_boundary,
)
from .oracle import OraclePMF, exact_expected_duration, exact_trailing_pmf
from .rsa import (
    DurationEngine,
    GhostEngine,
    ResultRecord,
    RunResult,
    estimate_mean_duration,
    estimate_mean_p,
    estimate_p,
    replay_arrivals,
    run_rsa,
    sweep,
)
from .theory import (
    KNOWN,
    KnownConstants,
    asymptotic_prediction,
    geometric_trailing_pmf,
    harmonic,
    independent_model_mean,
    known_p,
)

__all__ = [
    "_utils",
    "AnniState",
    "AnnihilationEngine",
    "BUILTIN_TYPES",
    "CapacityError",
    "ConfigInstance",
    "ConfigType",
    "ConflictGraph",
    "ConsistencyError",
    "DomainError",
    "DurationEngine",
    "ExpPoly",
    "GhostEngine",
    "IdentityCheck",
    "JamLabError",
    "KNOWN",
    "KnownConstants",
    "Model",
    "ModelInvalidError",
    "OraclePMF",
    "Region",
    "ReplicationEngine",
    "ResultRecord",
    "RngSpec",
    "RunResult",
    "SeriesGF",
    "StatSummary",
    "StopTimeCalculator",
    "UsageError",
    "asymptotic_prediction",
    "blocks",
    "build_rsa_model",
    "builtin_model",
    "cdf_from_gf",
    "cdf_recursive",
    "check_harmonic_identity",
    "conflict_graph",
    "empirical_cdf",
    "enumerate_configs",
    "estimate_mean_duration",
    "estimate_mean_p",
    "estimate_p",
    "estimate_stop_time",
    "exact_expected_duration",
    "exact_trailing_pmf",
    "geometric_trailing_pmf",
    "harmonic",
    "independent_model_mean",
    "known_p",
    "load_model",
    "mean_stop_time",
    "model_family",
    "replay_arrivals",
    "run_rsa",
    "simulate_annihilation",
    "stop_time_gap",
    "survival_coefficients",
    "sweep",
    "twin_classes",
    "with_boundary",
]
