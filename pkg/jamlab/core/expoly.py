import math
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from ._base import DomainError
from ._types import ExpKey
from ._utils import fraction_str

Scalar = Union[int, Fraction]


class ExpPoly:
    """
    Exact exponential polynomial: sum of c * t^b * exp(-a t) over (a, b),
    with rational c. Zero coefficients are never stored, so two equal
    functions always have equal term maps.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[ExpKey, Scalar]] = None) -> None:
        cleaned: Dict[ExpKey, Fraction] = {}
        for (rate, power), coefficient in (terms or {}).items():
            if rate < 0 or power < 0:
                raise DomainError(f"rate and power must be nonnegative, got ({rate}, {power})")
            value = Fraction(coefficient)
            if value:
                cleaned[(rate, power)] = value
        self._terms = dict(sorted(cleaned.items()))

    @classmethod
    def constant(cls, value: Scalar) -> "ExpPoly":
        return cls({(0, 0): value})

    @classmethod
    def exp(cls, rate: int, coefficient: Scalar = 1) -> "ExpPoly":
        return cls({(rate, 0): coefficient})

    @classmethod
    def _from_dict(cls, terms: Dict[ExpKey, Fraction]) -> "ExpPoly":
        poly = cls.__new__(cls)
        poly._terms = dict(sorted((k, v) for k, v in terms.items() if v))
        return poly

    @property
    def terms(self) -> Dict[ExpKey, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[Tuple[ExpKey, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        return f"ExpPoly({self._terms!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(
            f"{fraction_str(c)} * t^{b} * exp(-{a} t)" for (a, b), c in self._terms.items()
        )

    @staticmethod
    def _coerce(other: Union["ExpPoly", Scalar]) -> "ExpPoly":
        return other if isinstance(other, ExpPoly) else ExpPoly.constant(other)

    def __add__(self, other: Union["ExpPoly", Scalar]) -> "ExpPoly":
        total = dict(self._terms)
        for key, value in self._coerce(other)._terms.items():
            total[key] = total.get(key, Fraction(0)) + value
        return ExpPoly._from_dict(total)

    __radd__ = __add__

    def __neg__(self) -> "ExpPoly":
        return ExpPoly._from_dict({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: Union["ExpPoly", Scalar]) -> "ExpPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Union["ExpPoly", Scalar]) -> "ExpPoly":
        return self._coerce(other) - self

    def __mul__(self, other: Union["ExpPoly", Scalar]) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            factor = Fraction(other)
            return ExpPoly._from_dict({k: v * factor for k, v in self._terms.items()})

        product: Dict[ExpKey, Fraction] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                key = (a1 + a2, b1 + b2)
                product[key] = product.get(key, Fraction(0)) + c1 * c2
        return ExpPoly._from_dict(product)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "ExpPoly":
        return self * (1 / Fraction(other))

    def __pow__(self, exponent: int) -> "ExpPoly":
        result = ExpPoly.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __call__(self, t: float) -> float:
        return self.evaluate(t)

    def evaluate(self, t: float) -> float:
        return math.fsum(float(c) * t**b * math.exp(-a * t) for (a, b), c in self._terms.items())

    def constant_part(self) -> "ExpPoly":
        """The rate-zero terms, the part that survives as t grows"""
        return ExpPoly._from_dict({k: v for k, v in self._terms.items() if k[0] == 0})

    def integrate_conv(self, rate: int) -> "ExpPoly":
        """
        exp(-rate t) * integral over [0, t] of f(u) exp(rate u) du, in closed
        form. A term whose rate equals `rate` has a flat integrand and picks up
        one extra power of t.
        """

        if rate < 0:
            raise DomainError(f"rate must be nonnegative, got {rate}")

        result: Dict[ExpKey, Fraction] = {}

        def put(key: ExpKey, value: Fraction) -> None:
            result[key] = result.get(key, Fraction(0)) + value

        for (a, b), c in self._terms.items():
            shift = rate - a
            if shift == 0:
                put((rate, b + 1), c / (b + 1))
                continue

            falling = 1
            for j in range(b + 1):
                put((a, b - j), c * (-1) ** j * falling / Fraction(shift) ** (j + 1))
                falling *= b - j
            put((rate, 0), -c * (-1) ** b * math.factorial(b) / Fraction(shift) ** (b + 1))

        return ExpPoly._from_dict(result)

    def laplace(self, s: Scalar) -> Fraction:
        """integral over [0, inf) of exp(-s t) f(t) dt"""
        total = Fraction(0)
        for (a, b), c in self._terms.items():
            decay = a + Fraction(s)
            if decay <= 0:
                raise DomainError(f"term with rate {a} does not decay under exp(-{s} t)")
            total += c * math.factorial(b) / decay ** (b + 1)
        return total

    def tail_integral(self) -> Fraction:
        """integral over [0, inf) of (1 - f(t)) dt, finite only when f tends to 1"""
        if self.constant_part() != ExpPoly.constant(1):
            raise DomainError(f"the tail integral diverges, constant part is {self.constant_part()}")
        return -(self - 1).laplace(0)


ZERO = ExpPoly()
ONE = ExpPoly.constant(1)


def series_mul(left: Sequence[ExpPoly], right: Sequence[ExpPoly], order: int) -> List[ExpPoly]:
    """Product of two truncated power series in y, through y^order"""
    result = []
    for k in range(order + 1):
        total = ZERO
        for j in range(max(0, k - len(right) + 1), min(k, len(left) - 1) + 1):
            total = total + left[j] * right[k - j]
        result.append(total)
    return result


def series_reciprocal(coefficients: Sequence[ExpPoly], order: int) -> List[ExpPoly]:
    """1 / a(y) through y^order; a_0 must be a nonzero constant"""
    head = coefficients[0] if coefficients else ZERO
    if len(head) != 1 or (0, 0) not in head.terms:
        raise DomainError(f"series with leading coefficient {head} is not invertible")

    inverse = 1 / head.terms[(0, 0)]
    result = [ExpPoly.constant(inverse)]
    for k in range(1, order + 1):
        total = ZERO
        for j in range(1, min(k, len(coefficients) - 1) + 1):
            total = total + coefficients[j] * result[k - j]
        result.append(-total * inverse)
    return result


class SeriesGF:
    """
    Power series in y with ExpPoly coefficients, truncated at y^order, holding
    sum of F_n(t) y^n. The y^0 coefficient is zero and the y^1 coefficient is 1.
    """

    def __init__(self, coefficients: Sequence[ExpPoly]) -> None:
        if len(coefficients) < 2:
            raise DomainError("a distribution series carries at least y^0 and y^1")
        if coefficients[0] != ZERO or coefficients[1] != ONE:
            raise DomainError("distribution series must start 0 + 1*y")
        self.coefficients = tuple(coefficients)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n: int) -> ExpPoly:
        return self.coefficients[n]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self) -> Iterator[ExpPoly]:
        return iter(self.coefficients)
