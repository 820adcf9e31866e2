import argparse
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import (
    Any,
    Callable,
    Dict,
    Iterator,
    List,
    Literal,
    Optional,
    Sequence,
    TextIO,
    Tuple,
)

import pandas as pd
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)

from .config import Settings
from .core import (
    KNOWN,
    ConsistencyError,
    JamLabError,
    Model,
    ResultRecord,
    StopTimeCalculator,
    UsageError,
    asymptotic_prediction,
    build_rsa_model,
    builtin_model,
    conflict_graph,
    estimate_mean_duration,
    estimate_mean_p,
    estimate_p,
    estimate_stop_time,
    exact_trailing_pmf,
    known_p,
    load_model,
    model_family,
    sweep,
    with_boundary,
)
from .core._types import Boundary, OutputFormat
from .core._utils import fraction_str
from .core.lattice import BUILTIN_TYPES, shape_for_size
from .core.oracle import expected_duration_from_pmf
from .core.rsa import RECORD_FIELDS
from .core.theory import NAMED_P, harmonic_float

logger = logging.getLogger(__name__)

Command = Literal[
    "predict",
    "rsa-run",
    "rsa-sweep",
    "p-estimate",
    "oracle",
    "anni-exact",
    "anni-identity",
    "anni-simulate",
    "anni-rsa",
]

STATISTICAL = {"rsa-run", "rsa-sweep", "p-estimate", "anni-simulate", "anni-rsa"}
NEEDS_MODEL = {"rsa-run", "p-estimate", "oracle"}
NEEDS_N = {"anni-exact", "anni-simulate", "anni-rsa"}


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    builtin: Optional[str] = None
    model_file: Optional[Path] = None
    model: Optional[Model] = None
    n: Optional[int] = Field(default=None, ge=0)
    shape: Optional[Tuple[int, ...]] = None
    boundary: Boundary = "torus"
    sizes: Tuple[int, ...] = ()
    reps: int = 10_000
    seed: int = Field(ge=0, lt=2**64)
    t_horizon: float = Field(default=30.0, gt=0)
    tagged_type: Optional[int] = Field(default=None, ge=0)
    p: Optional[float] = Field(default=None, gt=0, le=1)
    p_estimate: bool = False
    total: Optional[int] = Field(default=None, ge=1)
    k: Optional[int] = Field(default=None, ge=1)
    max_n: Optional[int] = Field(default=None, ge=2)
    fmt: OutputFormat = "csv"
    output: Optional[Path] = None
    workers: int = Field(default=1, ge=1)
    oracle_limit: int = Field(default=9, ge=1, le=10)
    exact_n_cap: int = Field(default=64, ge=1)

    @field_validator("reps")
    @classmethod
    def _check_reps(cls, reps: int, info: ValidationInfo) -> int:
        if info.data.get("command") in STATISTICAL and reps < 2:
            raise ValueError("must be at least 2, the variance is undefined otherwise")
        return reps

    @model_validator(mode="after")
    def _check_command(self) -> "ExperimentSpec":
        if self.command in NEEDS_MODEL | {"rsa-sweep"}:
            if (self.builtin is None) == (self.model is None):
                raise ValueError("give exactly one of --builtin or --model-file")
            if self.builtin is not None and self.command != "rsa-sweep":
                if self.shape is None and self.n is None:
                    raise ValueError(f"--builtin {self.builtin} needs --n or --shape")

        if self.command == "rsa-sweep":
            if self.builtin is None:
                raise ValueError("rsa-sweep works on a --builtin model family")
            if not self.sizes:
                raise ValueError("rsa-sweep needs --sizes")

        if self.command == "predict":
            if self.total is None and (self.n is None or self.k is None):
                raise ValueError("predict needs --N, or --n together with --k")
            if self.p is None and not self.p_estimate:
                raise ValueError("predict needs --p")
            if self.p_estimate and self.builtin is None:
                raise ValueError("--p estimate needs a --builtin model to estimate on")

        if self.command in NEEDS_N and self.n is None:
            raise ValueError(f"{self.command} needs --n")
        if self.command == "anni-identity" and self.max_n is None:
            raise ValueError("anni-identity needs --max-n")

        return self

    def resolve_model(self) -> Model:
        if self.model is not None:
            return self.model

        assert self.builtin is not None
        shape = self.shape if self.shape is not None else shape_for_size(self.builtin, self.n or 0)
        return builtin_model(self.builtin, shape, self.boundary)


def _parse_shape(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"--shape expects sizes joined by 'x', e.g. 20x20, got {text!r}") from None


def _parse_sizes(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise UsageError(f"--sizes expects comma separated integers, got {text!r}") from None


def _parse_p(text: str) -> Tuple[Optional[float], bool]:
    if text == "estimate":
        return None, True
    if text in NAMED_P:
        return NAMED_P[text], False
    try:
        return float(text), False
    except ValueError:
        raise UsageError(
            f"--p expects a number, 'estimate' or one of {', '.join(NAMED_P)}, got {text!r}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamlab",
        description="Random sequential adsorption and annihilation experiments",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--reps", type=int, default=10_000)
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--workers", type=int, default=None)
        sub.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
        sub.add_argument("--output", type=Path, default=None)
        sub.add_argument("-v", "--verbose", action="count", default=0)

    def model_source(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--builtin", choices=sorted(BUILTIN_TYPES), default=None)
        sub.add_argument("--model-file", type=Path, default=None)
        sub.add_argument("--n", type=int, default=None)
        sub.add_argument("--shape", default=None)
        sub.add_argument("--boundary", choices=["torus", "free"], default="torus")

    predict = commands.add_parser("predict", help="asymptotic mean duration H_N + ln p")
    predict.add_argument("--N", dest="total", type=int, default=None)
    predict.add_argument("--k", type=int, default=None)
    predict.add_argument("--p", required=True)
    predict.add_argument("--t-horizon", type=float, default=None)
    model_source(predict)
    common(predict)

    run = commands.add_parser("rsa-run", help="mean duration of one model")
    model_source(run)
    run.add_argument("--p", default=None)
    common(run)

    sweep_ = commands.add_parser("rsa-sweep", help="mean duration across sizes")
    model_source(sweep_)
    sweep_.add_argument("--sizes", required=True)
    sweep_.add_argument("--p", default=None)
    common(sweep_)

    ghost = commands.add_parser("p-estimate", help="ghost estimate of p at a horizon")
    model_source(ghost)
    tagging = ghost.add_mutually_exclusive_group()
    tagging.add_argument("--type", dest="tagged_type", type=int, default=None)
    tagging.add_argument("--average", action="store_true", help="average p over all types (default)")
    ghost.add_argument("--t-horizon", type=float, default=None)
    common(ghost)

    oracle = commands.add_parser("oracle", help="exact mean duration by enumerating orders")
    model_source(oracle)
    common(oracle)

    exact = commands.add_parser("anni-exact", help="exact F_n and mean stopping time")
    exact.add_argument("--n", type=int, required=True)
    common(exact)

    identity = commands.add_parser("anni-identity", help="check the harmonic identity")
    identity.add_argument("--max-n", type=int, required=True)
    common(identity)

    simulate = commands.add_parser("anni-simulate", help="simulate the annihilation line")
    simulate.add_argument("--n", type=int, required=True)
    common(simulate)

    pair = commands.add_parser("anni-rsa", help="annihilation as a pair RSA model")
    pair.add_argument("--n", type=int, required=True)
    pair.add_argument("--boundary", choices=["torus", "free"], default="torus")
    common(pair)

    return parser


FLAG_NAMES = {"total": "N", "fmt": "format", "tagged_type": "type"}


def _validation_text(error: ValidationError) -> str:
    def flag(field: str) -> str:
        return "--" + FLAG_NAMES.get(field, field).replace("_", "-")

    return "; ".join(
        f"{flag(str(e['loc'][0]))}: {e['msg']}" if e["loc"] else e["msg"]
        for e in error.errors()
    )


def parse_and_validate(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None) -> ExperimentSpec:
    """
    Turns command line arguments into a validated ExperimentSpec. Usage
    problems raise UsageError, a broken model file ModelInvalidError.
    """

    settings = settings or Settings.from_env()
    args = build_parser().parse_args(argv)
    values: Dict[str, Any] = {
        "command": args.command,
        "reps": args.reps,
        "seed": settings.seed if args.seed is None else args.seed,
        "fmt": args.fmt,
        "output": args.output,
        "workers": args.workers or settings.threads,
        "oracle_limit": settings.oracle_limit,
        "exact_n_cap": settings.exact_n_cap,
        "t_horizon": settings.t_horizon,
    }

    for name in ("builtin", "n", "boundary", "total", "k", "tagged_type"):
        if getattr(args, name, None) is not None:
            values[name] = getattr(args, name)
    if getattr(args, "t_horizon", None) is not None:
        values["t_horizon"] = args.t_horizon
    if getattr(args, "max_n", None) is not None:
        values["max_n"] = args.max_n
    if getattr(args, "shape", None):
        values["shape"] = _parse_shape(args.shape)
    if getattr(args, "sizes", None):
        values["sizes"] = _parse_sizes(args.sizes)
    if getattr(args, "p", None) is not None:
        values["p"], values["p_estimate"] = _parse_p(args.p)
    if getattr(args, "model_file", None) is not None:
        values["model_file"] = args.model_file
        values["model"] = load_model(args.model_file)

    try:
        spec = ExperimentSpec(**values)
    except ValidationError as e:
        raise UsageError(_validation_text(e)) from e

    _configure_logging(settings.log_level, args.verbose)
    return spec


def _configure_logging(level_name: str, verbose: int) -> None:
    level = logging.getLevelName(level_name.upper())
    if not isinstance(level, int):
        level = logging.WARNING
    if verbose:
        level = logging.DEBUG if verbose > 1 else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def write_records(records: Sequence[ResultRecord], fmt: OutputFormat, stream: TextIO) -> None:
    if fmt == "json":
        for record in records:
            stream.write(record.model_dump_json() + "\n")
        return

    frame = pd.DataFrame([record.model_dump() for record in records], columns=list(RECORD_FIELDS))
    frame.to_csv(stream, index=False, na_rep="", lineterminator="\n")


def read_records(stream: TextIO, fmt: OutputFormat) -> List[ResultRecord]:
    if fmt == "json":
        return [ResultRecord.model_validate_json(line) for line in stream if line.strip()]

    frame = pd.read_csv(stream, dtype=str, keep_default_na=False)
    return [
        ResultRecord.model_validate({k: (v if v != "" else None) for k, v in row.items()})
        for row in frame.to_dict("records")
    ]


def _model_name(spec: ExperimentSpec, model: Model) -> str:
    return spec.builtin or model.name


ESTIMATION_SHAPES = {1: (1000,), 2: (32, 32)}


def _estimate_p(spec: ExperimentSpec, model: Model) -> float:
    if model.region.kind != "torus":
        model = with_boundary(model, "torus")
    p = estimate_mean_p(
        model, t_horizon=spec.t_horizon, reps=spec.reps, seed=spec.seed, workers=spec.workers
    ).mean
    logger.info("estimated p = %.6f on %s", p, model.name)
    return p


def _resolve_p(spec: ExperimentSpec, model: Optional[Model] = None) -> Optional[float]:
    if spec.p is not None:
        return spec.p
    if spec.p_estimate and model is not None:
        return _estimate_p(spec, model)
    if spec.builtin in NAMED_P:
        return known_p(spec.builtin)
    return None


class PredictionRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    p: float
    multiplicity: int = 1
    prediction: float


def _predict(spec: ExperimentSpec, stream: TextIO) -> int:
    total = spec.total if spec.total is not None else (spec.n or 0) * (spec.k or 1)
    multiplicity = 1
    p = spec.p
    if spec.builtin is not None:
        dimension = BUILTIN_TYPES[spec.builtin][0].dimension
        shape = spec.shape or (
            shape_for_size(spec.builtin, spec.n) if spec.n else ESTIMATION_SHAPES[dimension]
        )
        model = builtin_model(spec.builtin, shape, "torus")
        multiplicity = model.multiplicity
        if spec.p_estimate:
            p = _estimate_p(spec, model)

    if p is None:
        raise UsageError("--p estimate needs a --builtin model to estimate on")
    prediction = asymptotic_prediction(total, p, multiplicity=multiplicity)
    if spec.fmt == "json":
        record = PredictionRecord(N=total, p=p, multiplicity=multiplicity, prediction=prediction)
        stream.write(record.model_dump_json() + "\n")
    else:
        stream.write(f"{prediction:.4f}\n")
    return 0


def _rsa_run(spec: ExperimentSpec, stream: TextIO) -> int:
    model = spec.resolve_model()
    total = len(conflict_graph(model))
    summary = estimate_mean_duration(model, spec.reps, spec.seed, workers=spec.workers)
    p = _resolve_p(spec, model)
    prediction = (
        asymptotic_prediction(total, p, multiplicity=model.multiplicity)
        if p is not None and total > 0
        else None
    )
    record = ResultRecord.from_summary(
        model_name=_model_name(spec, model),
        n=model.n,
        k=model.k,
        N=total,
        seed=spec.seed,
        summary=summary,
        prediction=prediction,
    )
    write_records([record], spec.fmt, stream)
    return 0


def _rsa_sweep(spec: ExperimentSpec, stream: TextIO) -> int:
    assert spec.builtin is not None
    rows = sweep(
        model_family(spec.builtin, spec.boundary),
        spec.sizes,
        reps=spec.reps,
        seed=spec.seed,
        p=None if spec.p_estimate else _resolve_p(spec),
        workers=spec.workers,
    )
    write_records(rows, spec.fmt, stream)
    return 0


def _p_estimate(spec: ExperimentSpec, stream: TextIO) -> int:
    model = spec.resolve_model()
    if spec.tagged_type is None:
        summary = estimate_mean_p(
            model, t_horizon=spec.t_horizon, reps=spec.reps, seed=spec.seed, workers=spec.workers
        )
    else:
        summary = estimate_p(
            model,
            spec.tagged_type,
            t_horizon=spec.t_horizon,
            reps=spec.reps,
            seed=spec.seed,
            workers=spec.workers,
        )

    record = ResultRecord.from_summary(
        model_name=_model_name(spec, model),
        n=model.n,
        k=model.k,
        N=len(conflict_graph(model)),
        seed=spec.seed,
        summary=summary,
        prediction=NAMED_P.get(spec.builtin or ""),
    )
    write_records([record], spec.fmt, stream)
    return 0


def _oracle(spec: ExperimentSpec, stream: TextIO) -> int:
    model = spec.resolve_model()
    pmf = exact_trailing_pmf(model, limit=spec.oracle_limit, workers=spec.workers)
    expectation = expected_duration_from_pmf(pmf)

    stream.write(f"N = {pmf.size}\n")
    for r, probability in pmf.pmf.items():
        stream.write(f"r={r}: {fraction_str(probability)} (= {float(probability)!r})\n")
    stream.write(f"expectation {fraction_str(expectation)} (= {float(expectation)!r})\n")
    return 0


def _anni_exact(spec: ExperimentSpec, stream: TextIO) -> int:
    assert spec.n is not None
    calculator = StopTimeCalculator(cap=spec.exact_n_cap)
    distribution = calculator.cdf(spec.n)
    stream.write(f"F_{spec.n}(t) = {distribution}\n")
    if spec.n >= 1:
        mean = calculator.mean(spec.n)
        stream.write(f"mu_{spec.n} = {fraction_str(mean)} (= {float(mean)!r})\n")
    return 0


def _anni_identity(spec: ExperimentSpec, stream: TextIO) -> int:
    assert spec.max_n is not None
    calculator = StopTimeCalculator(cap=spec.exact_n_cap)
    failures = []
    for n in range(2, spec.max_n + 1):
        check = calculator.harmonic_identity(n)
        expected = fraction_str(check.expected)
        if check.holds:
            stream.write(f"n={n}: H_{n - 1} = {expected} OK\n")
        else:
            stream.write(f"n={n}: H_{n - 1} = {expected} FAIL (got {fraction_str(check.total)})\n")
            failures.append(n)

    if failures:
        raise ConsistencyError(f"harmonic identity failed for n in {failures}")
    return 0


def _anni_simulate(spec: ExperimentSpec, stream: TextIO) -> int:
    assert spec.n is not None
    summary = estimate_stop_time(spec.n, spec.reps, spec.seed, workers=spec.workers)
    if spec.n <= min(spec.exact_n_cap, 20):
        prediction: Optional[float] = float(StopTimeCalculator().mean(spec.n)) if spec.n else 0.0
    else:
        prediction = harmonic_float(spec.n - 1) - 1.0

    record = ResultRecord.from_summary(
        model_name="anni-line",
        n=spec.n,
        k=1,
        N=max(spec.n - 1, 0),
        seed=spec.seed,
        summary=summary,
        prediction=prediction,
    )
    write_records([record], spec.fmt, stream)
    return 0


def _anni_rsa(spec: ExperimentSpec, stream: TextIO) -> int:
    assert spec.n is not None
    model = build_rsa_model(spec.n, spec.boundary)
    total = len(conflict_graph(model))
    summary = estimate_mean_duration(model, spec.reps, spec.seed, workers=spec.workers)
    prediction = (
        asymptotic_prediction(total, KNOWN.p_annihilation_1d, multiplicity=model.multiplicity)
        if total > 0
        else None
    )
    record = ResultRecord.from_summary(
        model_name="anni-pair",
        n=model.n,
        k=model.k,
        N=total,
        seed=spec.seed,
        summary=summary,
        prediction=prediction,
    )
    write_records([record], spec.fmt, stream)
    return 0


HANDLERS: Dict[str, Callable[[ExperimentSpec, TextIO], int]] = {
    "predict": _predict,
    "rsa-run": _rsa_run,
    "rsa-sweep": _rsa_sweep,
    "p-estimate": _p_estimate,
    "oracle": _oracle,
    "anni-exact": _anni_exact,
    "anni-identity": _anni_identity,
    "anni-simulate": _anni_simulate,
    "anni-rsa": _anni_rsa,
}


@contextmanager
def _sink(output: Optional[Path], stream: Optional[TextIO]) -> Iterator[TextIO]:
    if output is None:
        yield stream or sys.stdout
        return

    with open(output, "w", newline="") as handle:
        yield handle


def execute(spec: ExperimentSpec, stream: Optional[TextIO] = None) -> int:
    """Runs a validated experiment; results go to --output or the given stream"""
    logger.info("running %s", spec.command)
    with _sink(spec.output, stream) as sink:
        return HANDLERS[spec.command](spec, sink)


def main(argv: Optional[Sequence[str]] = None, stream: Optional[TextIO] = None) -> int:
    try:
        spec = parse_and_validate(argv)
        return execute(spec, stream)
    except SystemExit as e:
        # argparse reports usage problems by exiting with 2
        return e.code if isinstance(e.code, int) else 2
    except JamLabError as e:
        logger.debug("failed with %s", type(e).__name__)
        sys.stderr.write(f"jamlab: error: {e.detail}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
