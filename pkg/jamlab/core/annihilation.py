import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ._base import CapacityError, DomainError, ReplicationEngine, StatSummary
from ._types import Boundary
from ._utils import RngSpec
from .expoly import ONE, ZERO, ExpPoly, SeriesGF, series_mul, series_reciprocal
from .lattice import Model, builtin_model
from .theory import harmonic_exact

logger = logging.getLogger(__name__)

EXACT_N_CAP = 64


def _check_cap(n: int, cap: int = EXACT_N_CAP) -> None:
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if n > cap:
        raise CapacityError(f"exact annihilation for n = {n}", cap)


class StopTimeCalculator:
    """
    Exact distribution functions F_n of the stopping time of a block of n
    particles, built by the first-break recursion. The memo lives on the
    instance; separate calculators share nothing.
    """

    def __init__(self, cap: int = EXACT_N_CAP) -> None:
        self.cap = cap
        self._cdf: List[ExpPoly] = [ONE, ONE]

    def cdf(self, n: int) -> ExpPoly:
        _check_cap(n, self.cap)
        while len(self._cdf) <= n:
            m = len(self._cdf)
            blocks = sum((self._cdf[r] * self._cdf[m - 1 - r] for r in range(1, m)), ZERO)
            self._cdf.append(blocks.integrate_conv(m - 1))
            logger.debug("F_%d: %d terms", m, len(self._cdf[m]))

        return self._cdf[n]

    def mean(self, n: int) -> Fraction:
        if n < 1:
            raise DomainError(f"the mean stopping time needs n >= 1, got {n}")
        return self.cdf(n).tail_integral()

    def gap(self, n: int) -> Fraction:
        """mu_n - (H_{n-1} - 1); shrinks towards 0 as n grows"""
        if n < 2:
            raise DomainError(f"the gap needs n >= 2, got {n}")
        return self.mean(n) - (harmonic_exact(n - 1) - 1)

    def harmonic_identity(self, n: int) -> "IdentityCheck":
        if n < 2:
            raise DomainError(f"the harmonic identity needs n >= 2, got {n}")
        return IdentityCheck(
            n=n,
            tail=self.mean(n),
            correction=(ONE - self.cdf(n - 1)).laplace(1),
            expected=harmonic_exact(n - 1),
        )


class IdentityCheck(BaseModel):
    """mu_n + integral of exp(-t)(1 - F_{n-1}) against H_{n-1}"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    tail: Fraction
    correction: Fraction
    expected: Fraction

    @property
    def total(self) -> Fraction:
        return self.tail + self.correction

    @property
    def holds(self) -> bool:
        return self.total == self.expected


def cdf_recursive(n: int, calculator: Optional[StopTimeCalculator] = None) -> ExpPoly:
    return (calculator or StopTimeCalculator()).cdf(n)


def mean_stop_time(n: int, calculator: Optional[StopTimeCalculator] = None) -> Fraction:
    return (calculator or StopTimeCalculator()).mean(n)


def stop_time_gap(n: int, calculator: Optional[StopTimeCalculator] = None) -> Fraction:
    return (calculator or StopTimeCalculator()).gap(n)


def check_harmonic_identity(n: int, calculator: Optional[StopTimeCalculator] = None) -> IdentityCheck:
    return (calculator or StopTimeCalculator()).harmonic_identity(n)


def _exp_series(order: int) -> List[ExpPoly]:
    """Coefficients of exp(y (exp(-t) - 1)) through y^order"""
    base = ExpPoly.exp(1) - 1
    coefficients = []
    power = ONE
    for j in range(order + 1):
        coefficients.append(power / math.factorial(j))
        power = power * base
    return coefficients


def cdf_from_gf(max_n: int) -> SeriesGF:
    """
    Expands y / (1 - y (1 - g)) with g = exp(-t) exp(y (exp(-t) - 1)) and
    returns its coefficients through y^max_n, one F_n per power.
    """

    _check_cap(max_n)
    order = max(max_n, 1)
    decay = ExpPoly.exp(1)
    g = [decay * c for c in _exp_series(order - 1)]
    one_minus_g = [ONE - g[0]] + [-c for c in g[1:]]
    denominator = [ONE] + [-c for c in one_minus_g]
    reciprocal = series_reciprocal(denominator, order - 1)

    return SeriesGF([ZERO] + reciprocal[:order])


def survival_coefficients(max_n: int) -> List[ExpPoly]:
    """
    Coefficients of sum (1 - F_n(t)) y^n, expanded from the closed form
    y/(1-y) * w/(1+w) with w = exp(-t) y/(1-y) exp(y (exp(-t) - 1)).
    """

    _check_cap(max_n)
    geometric = [ZERO] + [ONE] * max_n
    w = [ExpPoly.exp(1) * c for c in series_mul(geometric, _exp_series(max_n), max_n)]
    inverse = series_reciprocal([ONE + w[0]] + w[1:], max_n)
    ratio = [ONE - inverse[0]] + [-c for c in inverse[1:]]
    return series_mul(geometric, ratio, max_n)


class AnniState(BaseModel):
    model_config = ConfigDict(frozen=True)

    occupancy: Tuple[bool, ...]
    time: float = Field(ge=0.0)

    @property
    def terminal(self) -> bool:
        return not any(a and b for a, b in zip(self.occupancy, self.occupancy[1:]))

    @property
    def survivors(self) -> int:
        return sum(self.occupancy)


def _simulate(n: int, generator: np.random.Generator) -> AnniState:
    """
    Runs the line process on its effective transitions only: with m live
    pairs the next event comes after Exp(m), hits a uniform live pair and
    vacates one of its two sites by a fair coin.
    """

    occupied = [True] * n
    live = list(range(n - 1))
    position = list(range(n - 1))

    steps = max(n - 1, 0)
    draws = generator.random((3, steps))
    clocks = (-np.log1p(-draws[0])).tolist()
    picks = draws[1].tolist()
    coins = draws[2].tolist()

    time = 0.0
    step = 0
    while live:
        count = len(live)
        time += clocks[step] / count
        pair = live[min(int(picks[step] * count), count - 1)]
        site = pair if coins[step] < 0.5 else pair + 1
        occupied[site] = False

        for dead in (site - 1, site):
            if 0 <= dead < n - 1 and position[dead] >= 0:
                slot = position[dead]
                moved = live[-1]
                live[slot] = moved
                position[moved] = slot
                live.pop()
                position[dead] = -1
        step += 1

    return AnniState(occupancy=tuple(occupied), time=time)


def simulate_annihilation(n: int, rng: RngSpec) -> AnniState:
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    return _simulate(n, rng.generator())


class AnnihilationEngine(ReplicationEngine[AnniState]):
    label = "annihilation"

    def __init__(self, n: int, workers: Optional[int] = None, chunk_size: int = 512) -> None:
        super().__init__(workers=workers, chunk_size=chunk_size)
        if n < 0:
            raise DomainError(f"n must be nonnegative, got {n}")
        self.n = n

    def _replicate(self, generator: np.random.Generator) -> AnniState:
        return _simulate(self.n, generator)

    def _statistic(self, result: AnniState) -> float:
        return result.time


def estimate_stop_time(n: int, reps: int, seed: int, workers: Optional[int] = None) -> StatSummary:
    return AnnihilationEngine(n, workers=workers).summarize(reps, seed)


def empirical_cdf(samples: np.ndarray, grid: Sequence[float]) -> Dict[float, float]:
    """Fraction of samples strictly below each grid point"""
    ordered = np.sort(np.asarray(samples, dtype=float))
    return {
        t: float(np.searchsorted(ordered, t, side="left")) / max(len(ordered), 1) for t in grid
    }


def build_rsa_model(n: int, boundary: Boundary = "torus") -> Model:
    """
    The annihilation line as RSA with holes and particles swapped: at each
    pair both a hole-left and a hole-right config compete, and either one
    succeeds only while both sites are still hole-free.
    """

    return builtin_model("anni-pair", (n,), boundary)
