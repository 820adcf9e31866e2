import math

from jamlab import StatSummary
from tests import STDERRS


def within_stderrs(summary: StatSummary, expected: float, k: float = STDERRS) -> bool:
    return abs(summary.mean - expected) <= k * summary.stderr


def combined_stderr(*summaries: StatSummary) -> float:
    return math.sqrt(sum(s.stderr**2 for s in summaries))
