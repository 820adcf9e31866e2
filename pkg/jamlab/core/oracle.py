import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import permutations, repeat
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from ._base import CapacityError, UsageError
from .lattice import ConflictGraph, Model, conflict_graph
from .rsa import replay
from .theory import harmonic_exact

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 9
HARD_LIMIT = 10


class OraclePMF(BaseModel):
    """Exact law of the trailing-blocked count r over 0..N-1"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    size: int
    pmf: Dict[int, Fraction]

    def mean_trailing(self) -> Fraction:
        return sum((r * p for r, p in self.pmf.items()), Fraction(0))

    def as_floats(self) -> Dict[int, float]:
        return {r: float(p) for r, p in self.pmf.items()}


def _tally_first(graph: ConflictGraph, first: int) -> Counter:
    """Counts r over all orders that start with `first`"""
    total = len(graph)
    rest = [index for index in range(total) if index != first]
    counts: Counter = Counter()
    for tail in permutations(rest):
        _, last = replay(graph, (first,) + tail)
        counts[total - 1 - last] += 1
    return counts


def exact_trailing_pmf(
    model: Model,
    limit: int = DEFAULT_LIMIT,
    workers: Optional[int] = None,
) -> OraclePMF:
    """
    Replays every one of the N! arrival orders, all equally likely since the
    arrival times are i.i.d., and tallies r = N - J for the position J of the
    last success.
    """

    if limit > HARD_LIMIT:
        raise UsageError(f"the oracle limit cannot exceed {HARD_LIMIT}")

    graph = conflict_graph(model)
    total = len(graph)
    if total > limit:
        raise CapacityError(f"exact oracle on N = {total} configs", limit)
    if total == 0:
        return OraclePMF(size=0, pmf={})

    logger.info("oracle: replaying %d orders of %d configs", math.factorial(total), total)
    firsts = list(range(total))
    if workers and workers > 1 and total > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            parts: List[Counter] = list(executor.map(_tally_first, repeat(graph), firsts))
    else:
        parts = [_tally_first(graph, first) for first in firsts]

    counts: Counter = Counter()
    for part in parts:
        counts.update(part)

    orders = math.factorial(total)
    return OraclePMF(
        size=total,
        pmf={r: Fraction(counts[r], orders) for r in sorted(counts)},
    )


def expected_duration_from_pmf(pmf: OraclePMF) -> Fraction:
    """sum over r of P(r) (H_N - H_r)"""
    top = harmonic_exact(pmf.size)
    return sum((p * (top - harmonic_exact(r)) for r, p in pmf.pmf.items()), Fraction(0))


def exact_expected_duration(
    model: Model,
    limit: int = DEFAULT_LIMIT,
    workers: Optional[int] = None,
) -> Fraction:
    return expected_duration_from_pmf(exact_trailing_pmf(model, limit=limit, workers=workers))
