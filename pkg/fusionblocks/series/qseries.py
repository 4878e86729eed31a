"""
Truncated power series with exact coefficients and a rational exponent offset.

A ``QSeries`` stores the coefficients of ``q^(offset + n)`` for ``n = 0 .. trunc``; every
coefficient beyond ``q^(offset + trunc)`` is unknown, not zero. Arithmetic keeps track of the
order through which results are reliable, so comparing or reading a coefficient past that order
raises ``TruncationError`` instead of silently answering.

The same class doubles as a one-variable Laurent series in ``z`` (integer offset), which is how
the Bernoulli generating function and the ``(1+z)^k (ln(1+z))^m`` coefficients are computed.

>>> x = QSeries([0, 1], trunc=5)
>>> [str(c) for c in (1 / (1 - x)).coefficients()]
['1', '1', '1', '1', '1', '1']
"""
from __future__ import annotations

from fractions import Fraction
from typing import (
    Any,
    Iterable,
    Optional,
    Union,
)

from fusionblocks.exceptions import (
    StructuralError,
    TruncationError,
)
from fusionblocks.series.exact import (
    ExactScalar,
    Rational,
    ScalarLike,
    format_rational,
)


class QSeries:
    """
    A truncated series ``sum_{n=0}^{trunc} c_n q^(offset + n)``.

    Attributes:
        offset (Fraction): Exponent of the first stored coefficient.
        trunc (int): Index of the last known coefficient.
    """

    __slots__ = ('offset', 'trunc', '_coeffs')

    def __init__(
        self,
        coeffs: Iterable[ScalarLike],
        offset: Rational = 0,
        trunc: Optional[int] = None,
    ) -> None:
        values = [ExactScalar.coerce(c) for c in coeffs]
        if trunc is None:
            trunc = len(values) - 1
        if trunc < -1:
            raise TruncationError(f'Truncation index must be >= -1, got {trunc}')
        values = values[: trunc + 1]
        values.extend(ExactScalar.zero() for _ in range(trunc + 1 - len(values)))
        self.offset = Fraction(offset)
        self.trunc = trunc
        self._coeffs: tuple[ExactScalar, ...] = tuple(values)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, trunc: int, offset: Rational = 0) -> 'QSeries':
        return cls([], offset=offset, trunc=trunc)

    @classmethod
    def constant(cls, value: ScalarLike, trunc: int) -> 'QSeries':
        return cls([value], offset=0, trunc=trunc)

    @classmethod
    def monomial(cls, exponent: int, value: ScalarLike, order: int) -> 'QSeries':
        """``value * q^exponent`` known through absolute order ``order``."""
        return cls([value], offset=exponent, trunc=order - exponent)

    @classmethod
    def from_terms(cls, terms: dict[int, ScalarLike], order: int, offset: Rational = 0) -> 'QSeries':
        """Build from a sparse map relative index -> coefficient, known through ``offset + order``."""
        coeffs: list[ScalarLike] = [ExactScalar.zero()] * (order + 1)
        for index, value in terms.items():
            if 0 <= index <= order:
                coeffs[index] = ExactScalar.coerce(value) + coeffs[index]
        return cls(coeffs, offset=offset, trunc=order)

    # -- access -------------------------------------------------------

    @property
    def order(self) -> Fraction:
        """Absolute exponent through which the series is known."""
        return self.offset + self.trunc

    def coefficients(self) -> list[ExactScalar]:
        return list(self._coeffs)

    def coefficient(self, index: int) -> ExactScalar:
        """Coefficient of ``q^(offset + index)``."""
        if index > self.trunc:
            raise TruncationError(f'Coefficient {index} requested but series is known only through index {self.trunc}')
        if index < 0:
            return ExactScalar.zero()
        return self._coeffs[index]

    def at(self, exponent: Rational) -> ExactScalar:
        """Coefficient of ``q^exponent`` (absolute)."""
        index = Fraction(exponent) - self.offset
        if index.denominator != 1:
            return ExactScalar.zero()
        return self.coefficient(int(index))

    def valuation(self) -> Optional[int]:
        """Relative index of the first nonzero known coefficient, or ``None``."""
        for index, value in enumerate(self._coeffs):
            if value:
                return index
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def first_nonzero(self) -> Optional[tuple[Fraction, ExactScalar]]:
        index = self.valuation()
        if index is None:
            return None
        return self.offset + index, self._coeffs[index]

    # -- arithmetic ---------------------------------------------------

    def _aligned(self, other: 'QSeries') -> tuple[Fraction, int]:
        shift = self.offset - other.offset
        if shift.denominator != 1:
            raise StructuralError(f'Cannot add series with offsets {self.offset} and {other.offset}')
        offset = min(self.offset, other.offset)
        order = min(self.order, other.order)
        return offset, int(order - offset)

    def __add__(self, other: Union['QSeries', ScalarLike]) -> 'QSeries':
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, trunc=max(int(self.order), 0))
        offset, trunc = self._aligned(other)
        values = [self.at(offset + n) + other.at(offset + n) for n in range(trunc + 1)]
        return QSeries(values, offset=offset, trunc=trunc)

    __radd__ = __add__

    def __neg__(self) -> 'QSeries':
        return QSeries([-c for c in self._coeffs], offset=self.offset, trunc=self.trunc)

    def __sub__(self, other: Union['QSeries', ScalarLike]) -> 'QSeries':
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, trunc=max(int(self.order), 0))
        return self + (-other)

    def __rsub__(self, other: ScalarLike) -> 'QSeries':
        return (-self) + other

    def scale(self, value: ScalarLike) -> 'QSeries':
        value = ExactScalar.coerce(value)
        return QSeries([c * value for c in self._coeffs], offset=self.offset, trunc=self.trunc)

    def __mul__(self, other: Union['QSeries', ScalarLike]) -> 'QSeries':
        if not isinstance(other, QSeries):
            return self.scale(other)
        va = self.valuation()
        vb = other.valuation()
        va = self.trunc + 1 if va is None else va
        vb = other.trunc + 1 if vb is None else vb
        trunc = min(self.trunc + vb, other.trunc + va)
        values = [ExactScalar.zero() for _ in range(trunc + 1)]
        for i in range(va, min(self.trunc, trunc) + 1):
            a = self._coeffs[i]
            if not a:
                continue
            for j in range(vb, min(other.trunc, trunc - i) + 1):
                b = other._coeffs[j]
                if b:
                    values[i + j] = values[i + j] + a * b
        return QSeries(values, offset=self.offset + other.offset, trunc=trunc)

    __rmul__ = __mul__

    def inverse(self) -> 'QSeries':
        """Multiplicative inverse; the leading coefficient must be a monomial in ``u``."""
        valuation = self.valuation()
        if valuation is None:
            raise ZeroDivisionError('Cannot invert a series with no known nonzero coefficient')
        lead = self._coeffs[valuation]
        lead_inverse = lead.inverse()
        body = self._coeffs[valuation:]
        trunc = len(body) - 1
        result: list[ExactScalar] = [lead_inverse]
        for n in range(1, trunc + 1):
            total = ExactScalar.zero()
            for i in range(n):
                if body[n - i]:
                    total = total + result[i] * body[n - i]
            result.append(-(total * lead_inverse))
        return QSeries(result, offset=-(self.offset + valuation), trunc=trunc)

    def __truediv__(self, other: Union['QSeries', ScalarLike]) -> 'QSeries':
        if isinstance(other, QSeries):
            return self * other.inverse()
        return self.scale(ExactScalar.coerce(other).inverse())

    def __rtruediv__(self, other: ScalarLike) -> 'QSeries':
        return self.inverse().scale(other)

    def __pow__(self, exponent: int) -> 'QSeries':
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QSeries.constant(1, trunc=self.trunc)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def shift(self, power: Rational) -> 'QSeries':
        """Multiply by ``q^power``."""
        return QSeries(self._coeffs, offset=self.offset + power, trunc=self.trunc)

    def truncate(self, order: Rational) -> 'QSeries':
        """Forget every coefficient beyond absolute exponent ``order``."""
        trunc = max(min(self.trunc, int(Fraction(order) - self.offset)), -1)
        return QSeries(self._coeffs[: trunc + 1], offset=self.offset, trunc=trunc)

    def derivative(self) -> 'QSeries':
        """Termwise d/dq."""
        values = [c * (self.offset + n) for n, c in enumerate(self._coeffs)]
        return QSeries(values, offset=self.offset - 1, trunc=self.trunc)

    # -- comparison and output ----------------------------------------

    def agrees_with(self, other: 'QSeries') -> bool:
        """Coefficientwise equality up to the common reliable order."""
        return (self - other).is_zero()

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        try:
            return self.agrees_with(other)
        except StructuralError:
            return False

    __hash__ = None  # type: ignore[assignment]

    def to_complex(self, q: complex) -> complex:
        return sum((c.to_complex() * q ** float(self.offset + n) for n, c in enumerate(self._coeffs)), 0j)

    def rows(self) -> list[dict[str, Any]]:
        """Nonzero coefficients as ``{q, u, value}`` records."""
        out = []
        for n, c in enumerate(self._coeffs):
            for power, value in c.items():
                out.append({'q': format_rational(self.offset + n), 'u': power, 'value': format_rational(value)})
        return out

    def __str__(self) -> str:
        terms = [f'({c}) q^{format_rational(self.offset + n)}' for n, c in enumerate(self._coeffs) if c]
        body = ' + '.join(terms) if terms else '0'
        return f'{body} + O(q^{format_rational(self.order + 1)})'

    def __repr__(self) -> str:
        return f'QSeries({self})'

