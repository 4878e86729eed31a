"""
Exact scalars in Q[u, 1/u], where ``u`` stands for 2*pi*i.

Every coefficient that appears in an Eisenstein series, a Weierstrass expansion or a
square-bracket mode is a rational multiple of a power of 2*pi*i, so keeping the power of ``u``
as a grading keeps all arithmetic inside the rationals.

>>> u = ExactScalar.u_power(1)
>>> print(u * u - ExactScalar.constant(Fraction(1, 12)))
-1/12 + u^2
>>> sorted((u / 2 + 3).items())
[(0, Fraction(3, 1)), (1, Fraction(1, 2))]
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from typing import (
    Any,
    Iterator,
    Mapping,
    Optional,
    Union,
)

Rational = Union[int, Fraction]

TWO_PI_I = 2j * cmath.pi


def format_rational(value: Rational) -> str:
    """Render a rational as ``p`` or ``p/q``."""
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f'{value.numerator}/{value.denominator}'


def binomial(top: int, n: int) -> int:
    """
    ``top choose n`` for any integer ``top``, so ``binomial(-2, 3) == -4``.

    >>> binomial(4, 2), binomial(-1, 5), binomial(2, 3)
    (6, -1, 0)
    """
    if n < 0:
        return 0
    value = Fraction(1)
    for j in range(n):
        value = value * (top - j) / (j + 1)
    return int(value)


class ExactScalar:
    """An element of Q[u, 1/u] stored as a map u-exponent -> nonzero rational coefficient."""

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Mapping[int, Rational]] = None) -> None:
        cleaned: dict[int, Fraction] = {}
        if terms:
            for power, coefficient in terms.items():
                if coefficient:
                    cleaned[int(power)] = Fraction(coefficient)
        self._terms = cleaned

    @classmethod
    def _wrap(cls, terms: dict[int, Fraction]) -> 'ExactScalar':
        scalar = cls.__new__(cls)
        scalar._terms = terms
        return scalar

    @classmethod
    def constant(cls, value: Rational) -> 'ExactScalar':
        return cls({0: value})

    @classmethod
    def u_power(cls, power: int, coefficient: Rational = 1) -> 'ExactScalar':
        return cls({power: coefficient})

    @classmethod
    def zero(cls) -> 'ExactScalar':
        return cls._wrap({})

    @classmethod
    def one(cls) -> 'ExactScalar':
        return cls._wrap({0: Fraction(1)})

    @staticmethod
    def coerce(value: 'ScalarLike') -> 'ExactScalar':
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return ExactScalar.constant(value)
        raise TypeError(f'Cannot interpret {value!r} as an exact scalar')

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return iter(sorted(self._terms.items()))

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def coefficient(self, power: int) -> Fraction:
        return self._terms.get(power, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_rational(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f'{self} is not a rational constant')
        return self.coefficient(0)

    def __add__(self, other: 'ScalarLike') -> 'ExactScalar':
        other = ExactScalar.coerce(other)
        terms = dict(self._terms)
        for power, coefficient in other._terms.items():
            total = terms.get(power, 0) + coefficient
            if total:
                terms[power] = total
            else:
                terms.pop(power, None)
        return ExactScalar._wrap(terms)

    __radd__ = __add__

    def __neg__(self) -> 'ExactScalar':
        return ExactScalar._wrap({power: -c for power, c in self._terms.items()})

    def __sub__(self, other: 'ScalarLike') -> 'ExactScalar':
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other: 'ScalarLike') -> 'ExactScalar':
        return ExactScalar.coerce(other) - self

    def __mul__(self, other: 'ScalarLike') -> 'ExactScalar':
        if isinstance(other, (int, Fraction)):
            if not other:
                return ExactScalar.zero()
            return ExactScalar._wrap({power: c * other for power, c in self._terms.items()})
        if not isinstance(other, ExactScalar):
            return NotImplemented
        terms: dict[int, Fraction] = {}
        for p1, c1 in self._terms.items():
            for p2, c2 in other._terms.items():
                terms[p1 + p2] = terms.get(p1 + p2, 0) + c1 * c2
        return ExactScalar._wrap({power: c for power, c in terms.items() if c})

    __rmul__ = __mul__

    def inverse(self) -> 'ExactScalar':
        """Invert a monomial ``c u^j``; other elements of Q[u, 1/u] are not units."""
        if not self.is_monomial():
            raise ZeroDivisionError(f'{self} is not invertible in Q[u, 1/u]')
        ((power, coefficient),) = self._terms.items()
        return ExactScalar._wrap({-power: 1 / coefficient})

    def __truediv__(self, other: 'ScalarLike') -> 'ExactScalar':
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * ExactScalar.coerce(other).inverse()

    def __pow__(self, exponent: int) -> 'ExactScalar':
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ExactScalar.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def shift_u(self, power: int) -> 'ExactScalar':
        """Multiply by ``u**power``."""
        return ExactScalar._wrap({p + power: c for p, c in self._terms.items()})

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.constant(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def to_complex(self) -> complex:
        """Evaluate at u = 2*pi*i."""
        return sum((complex(c) * TWO_PI_I**p for p, c in self._terms.items()), 0j)

    def __str__(self) -> str:
        if not self._terms:
            return '0'
        parts = []
        for power, c in self.items():
            if power == 0:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(f'u^{power}')
            elif c == -1:
                parts.append(f'-u^{power}')
            else:
                parts.append(f'{format_rational(c)} u^{power}')
        return ' + '.join(parts).replace('+ -', '- ')

    def __repr__(self) -> str:
        return f'ExactScalar({self})'


ScalarLike = Union[ExactScalar, int, Fraction]
