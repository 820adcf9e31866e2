import logging
import math
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ._base import CapacityError, DomainError, UsageError

logger = logging.getLogger(__name__)

EXACT_HARMONIC_CAP = 10_000
_TABLE_LIMIT = 2048


class KnownConstants(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_dimer_1d: float = math.exp(-2.0)
    p_annihilation_1d: float = math.exp(-1.0)
    variance_bound: float = math.pi**2 / 6.0


KNOWN = KnownConstants()

NAMED_P: Dict[str, float] = {
    "dimer-1d": KNOWN.p_dimer_1d,
    "anni-pair": KNOWN.p_annihilation_1d,
    "monomer-1d": 1.0,
}


def known_p(name: str) -> float:
    try:
        return NAMED_P[name]
    except KeyError:
        raise UsageError(
            f"no known p for {name!r}, known constants: {', '.join(NAMED_P)}"
        ) from None


class Harmonic(NamedTuple):
    exact: Optional[Fraction]
    value: float


_exact_table: List[Fraction] = [Fraction(0)]


def harmonic_exact(m: int) -> Fraction:
    if m < 0:
        raise DomainError(f"harmonic numbers are defined for m >= 0, got {m}")
    if m > EXACT_HARMONIC_CAP:
        raise CapacityError(f"exact harmonic number H_{m}", EXACT_HARMONIC_CAP)

    while len(_exact_table) <= min(m, _TABLE_LIMIT):
        _exact_table.append(_exact_table[-1] + Fraction(1, len(_exact_table)))

    if m < len(_exact_table):
        return _exact_table[m]

    logger.debug("H_%d: summing past the cached table of %d terms", m, _TABLE_LIMIT)
    total = _exact_table[-1]
    for i in range(len(_exact_table), m + 1):
        total += Fraction(1, i)
    return total


def harmonic_float(m: int) -> float:
    if m < 0:
        raise DomainError(f"harmonic numbers are defined for m >= 0, got {m}")
    return math.fsum(1.0 / i for i in range(1, m + 1))


def harmonic(m: int) -> Harmonic:
    """H_m exactly (up to EXACT_HARMONIC_CAP) and as a float"""
    exact = harmonic_exact(m) if m <= EXACT_HARMONIC_CAP else None
    return Harmonic(exact=exact, value=harmonic_float(m))


def _check_probability(p: float) -> None:
    if not 0.0 < p <= 1.0:
        raise DomainError(
            f"p must lie in (0, 1], got {p}; the asymptotic only holds when p > 0"
        )


def asymptotic_prediction(N: int, p: float, multiplicity: int = 1) -> float:
    """
    H_N + ln p for N configs. When every config has multiplicity - 1 twins
    sharing its footprint, the twins act as one config arriving at rate
    multiplicity, and the prediction is (H_{N/g} + ln p) / g.
    """

    _check_probability(p)
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if multiplicity < 1 or N % multiplicity:
        raise DomainError(f"multiplicity {multiplicity} does not divide N = {N}")

    return (harmonic_float(N // multiplicity) + math.log(p)) / multiplicity


def geometric_trailing_pmf(N: int, p: float) -> np.ndarray:
    """p(1-p)^r for r = 0..N-1; the total falls short of 1 by (1-p)^N"""
    _check_probability(p)
    return p * (1.0 - p) ** np.arange(N, dtype=float)


def independent_model_mean(N: int, p: float) -> float:
    """
    Mean time of the last success if every arrival succeeded independently
    with probability p: sum over r of p(1-p)^r (H_N - H_r).
    """

    if N < 1:
        raise DomainError(f"N must be positive, got {N}")

    weights = geometric_trailing_pmf(N, p)
    partial_sums = np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, N + 1, dtype=float))))
    return float(np.sum(weights * (partial_sums[N] - partial_sums[:N])))
