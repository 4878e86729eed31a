"""
Laurent series in ``z`` whose coefficients are truncated q-series.

A ``ZLaurent`` is known on an exponent window ``[lo, hi]``. A bound of ``None`` means the series
is known all the way out on that side and vanishes beyond its stored terms (a finite pole order,
or a q-expansion whose far z-terms sit beyond the q-truncation). Products only report the
exponents whose every contributing pair is known.
"""
from __future__ import annotations

from typing import (
    Any,
    Iterator,
    Mapping,
    Optional,
    Union,
)

from fusionblocks.exceptions import TruncationError
from fusionblocks.series.exact import (
    ExactScalar,
    ScalarLike,
    format_rational,
)
from fusionblocks.series.qseries import QSeries

Bound = Optional[int]


def _min_bound(a: Bound, b: Bound) -> Bound:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _max_bound(a: Bound, b: Bound) -> Bound:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


class ZLaurent:
    """
    ``sum_e c_e(q) z^e`` known for ``lo <= e <= hi`` through q-order ``q_order``.

    Attributes:
        lo (Optional[int]): Lowest reliable exponent, ``None`` when known (and eventually zero) below.
        hi (Optional[int]): Highest reliable exponent, ``None`` when known (and eventually zero) above.
        q_order (int): Absolute q-exponent through which every coefficient is known.
    """

    __slots__ = ('lo', 'hi', 'q_order', '_terms')

    def __init__(
        self,
        terms: Mapping[int, QSeries],
        q_order: int,
        lo: Bound = None,
        hi: Bound = None,
    ) -> None:
        self.lo = lo
        self.hi = hi
        self.q_order = q_order
        kept: dict[int, QSeries] = {}
        for exponent, series in terms.items():
            if not self.in_window(exponent):
                continue
            series = series.truncate(q_order)
            if series.order < q_order:
                raise TruncationError(
                    f'z^{exponent} coefficient known through q^{series.order}, below requested q^{q_order}'
                )
            if not series.is_zero():
                kept[exponent] = series
        self._terms = kept

    # -- constructors -------------------------------------------------

    @classmethod
    def polynomial(cls, coefficients: Mapping[int, ScalarLike], q_order: int) -> 'ZLaurent':
        """An exactly known Laurent polynomial in ``z`` with constant-in-q coefficients."""
        return cls(
            {e: QSeries.constant(c, trunc=q_order) for e, c in coefficients.items()},
            q_order=q_order,
        )

    @classmethod
    def from_z_series(cls, series: QSeries, q_order: int) -> 'ZLaurent':
        """Promote a one-variable Laurent series in z (a ``QSeries`` with integer offset) to constant-in-q."""
        if series.offset.denominator != 1:
            raise TruncationError('z-series must have an integral offset')
        low = int(series.offset)
        terms = {low + n: QSeries.constant(c, trunc=q_order) for n, c in enumerate(series.coefficients()) if c}
        return cls(terms, q_order=q_order, lo=None, hi=int(series.order))

    # -- access -------------------------------------------------------

    def in_window(self, exponent: int) -> bool:
        return (self.lo is None or exponent >= self.lo) and (self.hi is None or exponent <= self.hi)

    def is_empty_window(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo > self.hi

    def coefficient(self, exponent: int) -> QSeries:
        if not self.in_window(exponent):
            raise TruncationError(f'z^{exponent} lies outside the reliable window [{self.lo}, {self.hi}]')
        return self._terms.get(exponent, QSeries.zero(self.q_order))

    def constant_term(self) -> QSeries:
        return self.coefficient(0)

    def items(self) -> Iterator[tuple[int, QSeries]]:
        return iter(sorted(self._terms.items()))

    def exponents(self) -> list[int]:
        return sorted(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def first_nonzero(self) -> Optional[tuple[int, Any, ExactScalar]]:
        """``(z exponent, q exponent, coefficient)`` of the lowest nonzero term."""
        for exponent, series in self.items():
            hit = series.first_nonzero()
            if hit is not None:
                return exponent, hit[0], hit[1]
        return None

    def _floor_zero(self) -> Optional[int]:
        # every exponent below the returned value is known to vanish (None: no such guarantee)
        if self.lo is not None:
            return None
        if self._terms:
            return min(self._terms)
        return None if self.hi is None else self.hi + 1

    def _ceiling_zero(self) -> Optional[int]:
        # every exponent above the returned value is known to vanish
        if self.hi is not None:
            return None
        if self._terms:
            return max(self._terms)
        return None if self.lo is None else self.lo - 1

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: 'ZLaurent') -> 'ZLaurent':
        lo = _max_bound(self.lo, other.lo) if self.lo is not None or other.lo is not None else None
        hi = _min_bound(self.hi, other.hi) if self.hi is not None or other.hi is not None else None
        q_order = min(self.q_order, other.q_order)
        terms: dict[int, QSeries] = {}
        for exponent in set(self._terms) | set(other._terms):
            terms[exponent] = self.coefficient_or_zero(exponent, q_order) + other.coefficient_or_zero(
                exponent, q_order
            )
        return ZLaurent(terms, q_order=q_order, lo=lo, hi=hi)

    def coefficient_or_zero(self, exponent: int, q_order: int) -> QSeries:
        series = self._terms.get(exponent)
        return QSeries.zero(q_order) if series is None else series.truncate(q_order)

    def __neg__(self) -> 'ZLaurent':
        return ZLaurent({e: -s for e, s in self._terms.items()}, q_order=self.q_order, lo=self.lo, hi=self.hi)

    def __sub__(self, other: 'ZLaurent') -> 'ZLaurent':
        return self + (-other)

    def scale(self, value: Union[ScalarLike, QSeries]) -> 'ZLaurent':
        if isinstance(value, QSeries):
            terms = {e: s * value for e, s in self._terms.items()}
            q_order = min([self.q_order, *(int(t.order) for t in terms.values())])
            return ZLaurent(terms, q_order=q_order, lo=self.lo, hi=self.hi)
        return ZLaurent({e: s.scale(value) for e, s in self._terms.items()}, self.q_order, self.lo, self.hi)

    def shift(self, power: int) -> 'ZLaurent':
        """Multiply by ``z^power``."""
        return ZLaurent(
            {e + power: s for e, s in self._terms.items()},
            q_order=self.q_order,
            lo=None if self.lo is None else self.lo + power,
            hi=None if self.hi is None else self.hi + power,
        )

    def restrict(self, lo: Bound, hi: Bound) -> 'ZLaurent':
        """Shrink the window."""
        return ZLaurent(
            self._terms,
            q_order=self.q_order,
            lo=_max_bound(self.lo, lo) if lo is not None or self.lo is not None else None,
            hi=_min_bound(self.hi, hi) if hi is not None or self.hi is not None else None,
        )

    def derivative(self) -> 'ZLaurent':
        """Termwise d/dz."""
        return ZLaurent(
            {e - 1: s.scale(e) for e, s in self._terms.items() if e},
            q_order=self.q_order,
            lo=None if self.lo is None else self.lo - 1,
            hi=None if self.hi is None else self.hi - 1,
        )

    def _product_window(self, other: 'ZLaurent') -> tuple[Bound, Bound, bool]:
        lo: Bound = None
        hi: Bound = None
        empty = False
        for a, b in ((self, other), (other, self)):
            if a.hi is not None:
                floor = b._floor_zero()
                if b.lo is not None:
                    empty = True
                elif floor is not None:
                    hi = _min_bound(hi, a.hi + floor)
            if a.lo is not None:
                ceiling = b._ceiling_zero()
                if b.hi is not None:
                    empty = True
                elif ceiling is not None:
                    lo = _max_bound(lo, a.lo + ceiling)
        return lo, hi, empty

    def __mul__(self, other: Union['ZLaurent', ScalarLike, QSeries]) -> 'ZLaurent':
        if not isinstance(other, ZLaurent):
            return self.scale(other)
        lo, hi, empty = self._product_window(other)
        if empty:
            raise TruncationError('Product of z-series with unbounded unknown tails has no reliable coefficient')
        q_order = min(self.q_order, other.q_order)
        terms: dict[int, QSeries] = {}
        for e1, s1 in self._terms.items():
            for e2, s2 in other._terms.items():
                exponent = e1 + e2
                if (lo is not None and exponent < lo) or (hi is not None and exponent > hi):
                    continue
                product = (s1 * s2).truncate(q_order)
                terms[exponent] = terms[exponent] + product if exponent in terms else product
        return ZLaurent(terms, q_order=q_order, lo=lo, hi=hi)

    __rmul__ = __mul__

    # -- output -------------------------------------------------------

    def rows(self) -> list[dict[str, Any]]:
        """Nonzero coefficients as ``{q, z, u, value}`` records."""
        out = []
        for exponent, series in self.items():
            for row in series.rows():
                out.append({'q': row['q'], 'z': exponent, 'u': row['u'], 'value': row['value']})
        return out

    def __str__(self) -> str:
        parts = [f'[{s}] z^{e}' for e, s in self.items()]
        window = f'[{self.lo}, {self.hi}]'
        return (' + '.join(parts) if parts else '0') + f' on z-window {window}, q-order {format_rational(self.q_order)}'

    def __repr__(self) -> str:
        return f'ZLaurent({self})'
