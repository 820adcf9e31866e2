import math
from fractions import Fraction

import numpy as np
import pytest

from jamlab.core import (
    AnnihilationEngine,
    CapacityError,
    DomainError,
    ExpPoly,
    RngSpec,
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
from jamlab.core.expoly import ONE
from jamlab.core.theory import harmonic_exact
from tests import REPS, SEED
from tests.utils import within_stderrs

DECAY = ExpPoly.exp(1)
GRID = np.linspace(0.0, 10.0, 50)


@pytest.mark.parametrize(
    "n, expected",
    [(0, ONE), (1, ONE), (2, ONE - DECAY), (3, ONE - DECAY)],
)
def test_first_distributions(calculator, n, expected):
    assert calculator.cdf(n) == expected
    assert cdf_recursive(n) == expected


@pytest.mark.parametrize("n", range(2, 13))
def test_distribution_is_valid(calculator, n):
    cdf = calculator.cdf(n)
    values = [cdf(t) for t in GRID]

    assert cdf.constant_part() == ONE
    assert cdf(0.0) == pytest.approx(0.0, abs=1e-9)
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
    assert all(-1e-9 <= v <= 1 + 1e-9 for v in values)
    for t in (0.1, 0.5, 1.0, 2.0, 4.0, 8.0):
        assert 0.0 - 1e-9 <= cdf(t) <= 1.0 + 1e-9


@pytest.mark.parametrize("n", range(2, 13))
def test_first_break_bound(calculator, n):
    cdf = calculator.cdf(n)

    for t in GRID:
        assert 1 - cdf(t) >= math.exp(-(n - 1) * t) - 1e-9


def test_generating_function_matches_recursion(calculator):
    series = cdf_from_gf(10)

    assert series.order == 10
    for n in range(1, 11):
        assert series[n] == calculator.cdf(n)


def test_survival_coefficients(calculator):
    survival = survival_coefficients(8)

    assert survival[0] == survival[1] == ExpPoly()
    for n in range(1, 9):
        assert survival[n] == ONE - calculator.cdf(n)


@pytest.mark.parametrize("n, mean", [(1, Fraction(0)), (2, Fraction(1)), (3, Fraction(1))])
def test_mean_stop_time(n, mean):
    assert mean_stop_time(n) == mean


def test_mean_stop_time_needs_particles():
    with pytest.raises(DomainError):
        mean_stop_time(0)


@pytest.mark.parametrize("n", range(2, 21))
def test_harmonic_identity(calculator, n):
    check = check_harmonic_identity(n, calculator)

    assert check.holds
    assert check.total == harmonic_exact(n - 1)


def test_harmonic_identity_small_cases():
    assert check_harmonic_identity(2).correction == 0
    assert check_harmonic_identity(3).correction == Fraction(1, 2)
    with pytest.raises(DomainError):
        check_harmonic_identity(1)


def test_gap_is_laplace_of_previous_distribution(calculator):
    for n in range(2, 21):
        assert stop_time_gap(n, calculator) == calculator.cdf(n - 1).laplace(1)


def test_gap_shrinks(calculator):
    gaps = [calculator.gap(n) for n in (5, 10, 15, 20)]

    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < Fraction(1, 4)


def test_exact_cap():
    small = StopTimeCalculator(cap=5)

    with pytest.raises(CapacityError):
        small.cdf(6)
    with pytest.raises(CapacityError):
        cdf_from_gf(65)


def test_calculators_share_nothing():
    first = StopTimeCalculator()
    second = StopTimeCalculator()
    first.cdf(8)

    assert len(second._cdf) == 2


@pytest.mark.parametrize("n, survivors", [(0, 0), (1, 1)])
def test_trivial_lines(n, survivors):
    state = simulate_annihilation(n, RngSpec(seed=SEED))

    assert state.time == 0.0
    assert state.survivors == survivors
    assert state.terminal


@pytest.mark.parametrize("replication", range(10))
def test_simulation_ends_jammed(replication):
    state = simulate_annihilation(40, RngSpec(seed=SEED, replication=replication))

    assert state.terminal
    assert len(state.occupancy) == 40
    # no two neighbours survive
    assert 1 <= state.survivors <= 20
    assert state.time > 0


def test_simulation_is_reproducible():
    first = simulate_annihilation(25, RngSpec(seed=SEED, replication=1))

    assert first == simulate_annihilation(25, RngSpec(seed=SEED, replication=1))


@pytest.mark.parametrize("n", range(2, 11))
def test_simulation_matches_exact_mean(n):
    summary = estimate_stop_time(n, REPS, SEED)

    assert within_stderrs(summary, float(mean_stop_time(n)))


def test_empirical_cdf_matches_exact(calculator):
    samples = AnnihilationEngine(6).sample(20_000, SEED)
    empirical = empirical_cdf(samples, [0.5, 1.0, 2.0, 4.0])
    exact = calculator.cdf(6)

    for t, value in empirical.items():
        assert value == pytest.approx(exact(t), abs=0.02)


def test_empirical_cdf_counts_strictly_below():
    assert empirical_cdf(np.array([1.0, 2.0, 3.0]), [0.0, 2.0, 5.0]) == {0.0: 0.0, 2.0: 1 / 3, 5.0: 1.0}


def test_engine_rejects_negative_size():
    with pytest.raises(DomainError):
        AnnihilationEngine(-1)


def test_rsa_bridge():
    model = build_rsa_model(10)

    assert model.k == 2
    assert model.n == 10
    assert model.region.kind == "torus"
    assert [t.footprint for t in model.types] == [((0,), (1,))] * 2
    assert [t.occupancy for t in model.types] == [((0,),), ((1,),)]
