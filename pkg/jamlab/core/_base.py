import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Generic, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from ._types import R
from ._utils import RngSpec, chunk_ranges

logger = logging.getLogger(__name__)


class JamLabError(Exception):
    exit_code: int = 1

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class UsageError(JamLabError):
    exit_code = 2


class DomainError(JamLabError):
    exit_code = 2


class ModelInvalidError(JamLabError):
    exit_code = 3


class ConsistencyError(JamLabError):
    exit_code = 4


class CapacityError(JamLabError):
    exit_code = 5

    def __init__(self, what: str, limit: int) -> None:
        super().__init__(f"{what} exceeds the limit of {limit}")
        self.limit = limit


TOO_FEW_REPS = UsageError("reps must be at least 2, the variance is undefined otherwise")


class StatSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    reps: int
    mean: float
    stderr: float
    variance: float
    minimum: float
    maximum: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "StatSummary":
        data = np.asarray(values, dtype=float)
        if data.size < 2:
            raise TOO_FEW_REPS

        variance = float(data.var(ddof=1))
        return cls(
            reps=int(data.size),
            mean=float(data.mean()),
            stderr=math.sqrt(variance / data.size),
            variance=variance,
            minimum=float(data.min()),
            maximum=float(data.max()),
        )

    def merge(self, other: "StatSummary") -> "StatSummary":
        """Pairwise combination of two disjoint samples (Chan's update)"""
        reps = self.reps + other.reps
        delta = other.mean - self.mean
        mean = self.mean + delta * other.reps / reps
        squares = (
            self.variance * (self.reps - 1)
            + other.variance * (other.reps - 1)
            + delta * delta * self.reps * other.reps / reps
        )
        variance = squares / (reps - 1)

        return StatSummary(
            reps=reps,
            mean=mean,
            stderr=math.sqrt(variance / reps),
            variance=variance,
            minimum=min(self.minimum, other.minimum),
            maximum=max(self.maximum, other.maximum),
        )


class ReplicationEngine(Generic[R], ABC):
    """
    Runs independent replications of one random experiment and reduces each
    one to a scalar. Replication i always draws from RngSpec(seed, i), and the
    samples are reassembled in index order, so results never depend on how
    many workers took part.
    """

    label: str = "replication"

    def __init__(self, workers: Optional[int] = None, chunk_size: int = 512) -> None:
        self.workers = max(1, workers or 1)
        self.chunk_size = max(1, chunk_size)

    @abstractmethod
    def _replicate(self, generator: np.random.Generator) -> R:
        raise NotImplementedError

    @abstractmethod
    def _statistic(self, result: R) -> float:
        raise NotImplementedError

    def replicate(self, rng: RngSpec) -> R:
        return self._replicate(rng.generator())

    def _sample_range(self, seed: int, start: int, stop: int) -> np.ndarray:
        values = [
            self._statistic(self.replicate(RngSpec(seed=seed, replication=index)))
            for index in range(start, stop)
        ]
        return np.asarray(values, dtype=float)

    def sample(self, reps: int, seed: int) -> np.ndarray:
        ranges = chunk_ranges(reps, self.chunk_size)
        if not ranges:
            return np.zeros(0, dtype=float)

        logger.info(
            "%s: %d replications, seed %d, %d worker(s)",
            self.label,
            reps,
            seed,
            self.workers,
        )
        if self.workers == 1 or len(ranges) == 1:
            parts: List[np.ndarray] = [self._sample_range(seed, a, b) for a, b in ranges]
        else:
            starts = [a for a, _ in ranges]
            stops = [b for _, b in ranges]
            logger.debug("%s: dispatching %d chunks", self.label, len(ranges))
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                parts = list(executor.map(self._sample_range, repeat(seed), starts, stops))

        return np.concatenate(parts)

    def summarize(self, reps: int, seed: int) -> StatSummary:
        if reps < 2:
            raise TOO_FEW_REPS

        summary = StatSummary.from_values(self.sample(reps, seed))
        logger.info("%s: mean %.6f stderr %.6f", self.label, summary.mean, summary.stderr)
        return summary
