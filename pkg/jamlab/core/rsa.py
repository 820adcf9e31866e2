import logging
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ._base import ReplicationEngine, StatSummary, TOO_FEW_REPS, UsageError
from ._utils import RngSpec, exponential_variates
from .lattice import ConflictGraph, Model, conflict_graph, with_boundary
from .theory import asymptotic_prediction

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 30.0

RECORD_FIELDS = (
    "model_name",
    "n",
    "k",
    "N",
    "reps",
    "seed",
    "mean",
    "stderr",
    "variance",
    "prediction",
    "delta",
)


class RunResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    duration: float
    success_count: int
    blocked_count: int
    trailing_blocked: int
    jammed: Tuple[bool, ...]
    per_type_successes: Tuple[int, ...]
    successful: Tuple[int, ...]


class ResultRecord(BaseModel):
    """One CSV row / JSON object of a statistical experiment"""

    model_name: str
    n: int
    k: int
    N: int
    reps: int
    seed: int
    mean: float
    stderr: float
    variance: float
    prediction: Optional[float] = None
    delta: Optional[float] = None

    @classmethod
    def from_summary(
        cls,
        model_name: str,
        n: int,
        k: int,
        N: int,
        seed: int,
        summary: StatSummary,
        prediction: Optional[float] = None,
    ) -> "ResultRecord":
        return cls(
            model_name=model_name,
            n=n,
            k=k,
            N=N,
            reps=summary.reps,
            seed=seed,
            mean=summary.mean,
            stderr=summary.stderr,
            variance=summary.variance,
            prediction=prediction,
            delta=None if prediction is None else summary.mean - prediction,
        )


def replay(graph: ConflictGraph, order: Sequence[int]) -> Tuple[List[int], int]:
    """
    Processes arrivals in the given order. An arrival succeeds unless an
    earlier success blocks it. Returns the successful instances in arrival
    order and the position of the last success (-1 when there is none).
    """

    blocked = bytearray(len(graph))
    targets = graph.blocks
    successes: List[int] = []
    last = -1
    for position, index in enumerate(order):
        if blocked[index]:
            continue

        successes.append(index)
        last = position
        for target in targets[index]:
            blocked[target] = 1

    return successes, last


def replay_arrivals(graph: ConflictGraph, times: np.ndarray) -> RunResult:
    """Builds a RunResult from explicit arrival times; ties go to the lower index"""
    order = np.argsort(times, kind="stable").tolist()
    successes, last = replay(graph, order)
    total = len(graph)
    model = graph.model

    jammed = [False] * model.n
    per_type = [0] * model.k
    for index in successes:
        instance = graph.instances[index]
        per_type[instance.type_index] += 1
        for site in instance.occupancy:
            jammed[site] = True

    return RunResult(
        duration=float(times[order[last]]) if last >= 0 else 0.0,
        success_count=len(successes),
        blocked_count=total - len(successes),
        trailing_blocked=total - 1 - last if last >= 0 else 0,
        jammed=tuple(jammed),
        per_type_successes=tuple(per_type),
        successful=tuple(successes),
    )


def run_rsa(model: Model, rng: RngSpec) -> RunResult:
    graph = conflict_graph(model)
    return replay_arrivals(graph, exponential_variates(rng.generator(), len(graph)))


class DurationEngine(ReplicationEngine[RunResult]):
    label = "rsa duration"

    def __init__(self, model: Model, workers: Optional[int] = None, chunk_size: int = 512) -> None:
        super().__init__(workers=workers, chunk_size=chunk_size)
        self.graph = conflict_graph(model)

    def _replicate(self, generator: np.random.Generator) -> RunResult:
        return replay_arrivals(self.graph, exponential_variates(generator, len(self.graph)))

    def _statistic(self, result: RunResult) -> float:
        return result.duration


def estimate_mean_duration(
    model: Model,
    reps: int,
    seed: int,
    workers: Optional[int] = None,
) -> StatSummary:
    if reps < 2:
        raise TOO_FEW_REPS
    return DurationEngine(model, workers=workers).summarize(reps, seed)


def _ghost_pool(graph: ConflictGraph, ghost: int) -> Set[int]:
    return {ghost, *graph.twins[ghost]}


def _succeeds(
    graph: ConflictGraph,
    times: List[float],
    root: int,
    excluded: Set[int],
    memo: Dict[int, bool],
) -> bool:
    """
    Whether an arrived config succeeds. Only earlier arrivals can block it,
    so the walk follows strictly decreasing (time, index) keys and stops.
    """

    stack = [root]
    while stack:
        config = stack[-1]
        if config in memo:
            stack.pop()
            continue

        key = (times[config], config)
        outcome = True
        pending = -1
        for blocker in graph.blocked_by[config]:
            if blocker in excluded or (times[blocker], blocker) >= key:
                continue

            known = memo.get(blocker)
            if known is None:
                pending = blocker
                break
            if known:
                outcome = False
                break

        if pending >= 0:
            stack.append(pending)
            continue

        memo[config] = outcome
        stack.pop()

    return memo[root]


def ghost_unblocked(graph: ConflictGraph, times: Sequence[float], ghost: int, horizon: float) -> bool:
    """
    Whether the ghost is still unblocked at the horizon. The ghost and its
    twins never arrive; only the ghost's causal past is evaluated.
    """

    times_ = list(times)
    excluded = _ghost_pool(graph, ghost)
    memo: Dict[int, bool] = {}
    for blocker in graph.blocked_by[ghost]:
        if blocker in excluded or times_[blocker] > horizon:
            continue
        if _succeeds(graph, times_, blocker, excluded, memo):
            return False

    return True


def ghost_replay(graph: ConflictGraph, times: np.ndarray, ghost: int, horizon: float) -> bool:
    """Forward version of ghost_unblocked: replays every arrival before the horizon"""
    excluded = _ghost_pool(graph, ghost)
    order = [
        index
        for index in np.argsort(times, kind="stable").tolist()
        if index not in excluded and times[index] <= horizon
    ]
    successes, _ = replay(graph, order)
    return not set(successes) & set(graph.blocked_by[ghost])


class GhostEngine(ReplicationEngine[float]):
    """
    Estimates p_i(t): ghosts of the tagged types sit at the origin of a torus,
    out of the arrival pool, and each replication reports the fraction of
    them still unblocked at the horizon.
    """

    label = "ghost"

    def __init__(
        self,
        model: Model,
        tagged_types: Sequence[int],
        t_horizon: float = DEFAULT_HORIZON,
        workers: Optional[int] = None,
        chunk_size: int = 512,
    ) -> None:
        super().__init__(workers=workers, chunk_size=chunk_size)
        if model.region.kind != "torus":
            raise UsageError(
                "p estimates need a torus region, a free region makes them anchor dependent"
            )
        if t_horizon <= 0:
            raise UsageError(f"t_horizon must be positive, got {t_horizon}")
        if not tagged_types or any(t < 0 or t >= model.k for t in tagged_types):
            raise UsageError(f"tagged types must lie in 0..{model.k - 1}, got {list(tagged_types)}")

        self.graph = conflict_graph(model)
        self.t_horizon = t_horizon
        anchors = {
            (instance.type_index, instance.anchor): index
            for index, instance in enumerate(self.graph.instances)
        }
        self.ghosts = [anchors[(t, 0)] for t in tagged_types]

    def _replicate(self, generator: np.random.Generator) -> float:
        times = exponential_variates(generator, len(self.graph)).tolist()
        unblocked = [
            ghost_unblocked(self.graph, times, ghost, self.t_horizon) for ghost in self.ghosts
        ]
        return sum(unblocked) / len(unblocked)

    def _statistic(self, result: float) -> float:
        return result


def estimate_p(
    model: Model,
    tagged_type: int,
    t_horizon: float = DEFAULT_HORIZON,
    reps: int = 10_000,
    seed: int = 0,
    workers: Optional[int] = None,
) -> StatSummary:
    engine = GhostEngine(model, [tagged_type], t_horizon=t_horizon, workers=workers)
    return engine.summarize(reps, seed)


def estimate_mean_p(
    model: Model,
    t_horizon: float = DEFAULT_HORIZON,
    reps: int = 10_000,
    seed: int = 0,
    workers: Optional[int] = None,
) -> StatSummary:
    """p averaged over all k types, one ghost per type per replication"""
    engine = GhostEngine(model, range(model.k), t_horizon=t_horizon, workers=workers)
    return engine.summarize(reps, seed)


def sweep(
    family: Callable[[int], Model],
    sizes: Sequence[int],
    reps: int,
    seed: int,
    p: Optional[float] = None,
    p_reps: int = 10_000,
    workers: Optional[int] = None,
) -> List[ResultRecord]:
    """
    One row per size. Without a supplied p, it is estimated once on the
    torus version of the largest member.
    """

    if not sizes:
        raise UsageError("sweep needs at least one size")

    if p is None:
        largest = family(max(sizes))
        torus = largest if largest.region.kind == "torus" else with_boundary(largest, "torus")
        p = estimate_mean_p(torus, reps=p_reps, seed=seed, workers=workers).mean
        logger.info("sweep: estimated p = %.6f on %s", p, torus.name)

    rows: List[ResultRecord] = []
    for n in sizes:
        model = family(n)
        total = len(conflict_graph(model))
        summary = estimate_mean_duration(model, reps, seed, workers=workers)
        prediction = (
            asymptotic_prediction(total, p, multiplicity=model.multiplicity)
            if p > 0 and total > 0
            else None
        )
        rows.append(
            ResultRecord.from_summary(
                model_name=model.name,
                n=model.n,
                k=model.k,
                N=total,
                seed=seed,
                summary=summary,
                prediction=prediction,
            )
        )

    return rows
