import math
from fractions import Fraction

import pytest

from jamlab.core import DomainError, ExpPoly, SeriesGF
from jamlab.core.expoly import ONE, ZERO, series_mul, series_reciprocal

DECAY = ExpPoly.exp(1)


def test_zero_terms_are_dropped():
    poly = ExpPoly({(0, 0): 1, (1, 0): 0, (2, 3): Fraction(0)})

    assert poly.terms == {(0, 0): Fraction(1)}
    assert DECAY - DECAY == ZERO
    assert not ZERO


def test_canonical_equality_and_hash():
    left = ExpPoly({(1, 0): 2, (0, 0): 1})
    right = ExpPoly({(0, 0): 1}) + ExpPoly.exp(1, 2)

    assert left == right
    assert hash(left) == hash(right)
    assert len({left, right}) == 1


def test_rejects_negative_keys():
    with pytest.raises(DomainError):
        ExpPoly({(-1, 0): 1})


def test_product():
    survival = ONE - DECAY

    assert survival * survival == ONE - 2 * DECAY + ExpPoly.exp(2)
    assert survival**0 == ONE
    assert survival**2 == survival * survival


def test_scalar_arithmetic():
    poly = 1 - DECAY

    assert poly * Fraction(1, 2) == poly / 2
    assert 3 + poly == poly + 3
    assert (2 - poly) == -poly + 2


def test_evaluate():
    poly = ExpPoly({(0, 0): 1, (2, 1): Fraction(-3, 2)})

    for t in (0.0, 0.5, 3.0):
        assert poly(t) == pytest.approx(1 - 1.5 * t * math.exp(-2 * t))


def test_str():
    assert str(ZERO) == "0"
    assert str(ONE - DECAY) == "1 * t^0 * exp(-0 t) + -1 * t^0 * exp(-1 t)"
    assert str(ExpPoly({(3, 2): Fraction(5, 7)})) == "5/7 * t^2 * exp(-3 t)"


def test_integrate_conv_gives_second_distribution():
    assert ONE.integrate_conv(1) == ONE - DECAY


def test_integrate_conv_rate_collision():
    # exp(-t) * integral of exp(-u) exp(u) du = t exp(-t)
    assert DECAY.integrate_conv(1) == ExpPoly({(1, 1): 1})
    assert ExpPoly({(2, 1): 1}).integrate_conv(2) == ExpPoly({(2, 2): Fraction(1, 2)})


def test_integrate_conv_with_powers():
    # exp(-2t) * integral of u exp(-u) exp(2u) du over [0, t]
    result = ExpPoly({(1, 1): 1}).integrate_conv(2)
    expected = ExpPoly({(1, 1): 1, (1, 0): -1, (2, 0): 1})

    assert result == expected


def test_integrate_conv_rejects_negative_rate():
    with pytest.raises(DomainError):
        ONE.integrate_conv(-1)


def test_laplace():
    assert ONE.laplace(1) == 1
    assert DECAY.laplace(1) == Fraction(1, 2)
    assert ExpPoly({(1, 2): 1}).laplace(0) == 2
    with pytest.raises(DomainError):
        ONE.laplace(0)


def test_tail_integral():
    assert (ONE - DECAY).tail_integral() == 1
    assert ONE.tail_integral() == 0
    with pytest.raises(DomainError):
        (2 - DECAY).tail_integral()
    with pytest.raises(DomainError):
        DECAY.tail_integral()


def test_series_reciprocal():
    # 1 / (1 - y) = 1 + y + y^2 + ...
    inverse = series_reciprocal([ONE, -ONE], 5)

    assert inverse == [ONE] * 6
    assert series_mul([ONE, -ONE], inverse, 5) == [ONE] + [ZERO] * 5


def test_series_reciprocal_needs_constant_head():
    with pytest.raises(DomainError):
        series_reciprocal([DECAY, ONE], 3)
    with pytest.raises(DomainError):
        series_reciprocal([ZERO, ONE], 3)


def test_series_gf_checks_head():
    series = SeriesGF([ZERO, ONE, ONE - DECAY])

    assert series.order == 2
    assert series[2] == ONE - DECAY
    assert list(series) == [ZERO, ONE, ONE - DECAY]
    with pytest.raises(DomainError):
        SeriesGF([ONE, ONE])
    with pytest.raises(DomainError):
        SeriesGF([ZERO])
