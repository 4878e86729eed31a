"""
The rank-one Heisenberg vertex algebra acting on its vacuum Fock module.

Basis vectors are partitions ``(l_1 >= ... >= l_k >= 1)`` standing for
``alpha(-l_1) ... alpha(-l_k) |0>``; the degree is the sum of the parts and equals the ``L(0)``
eigenvalue. Modes of composite states come from the iterate formula

    (alpha(-k) b)(n) = sum_j binom(k+j-1, j) (alpha(-k-j) b(n+j) - (-1)^k b(n-k-j) alpha(j))

applied recursively down to the vacuum, whose only nonzero mode is ``|0>(-1) = id``. The recursion
runs on integer matrices between graded pieces, one cached block per basis state, mode and
degree; traces are read off products of these blocks.

>>> print(virasoro(0, Vector.basis((2, 1))))
3 [2, 1]
>>> print(virasoro(-1, Vector.vacuum()))
0
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import (
    Any,
    Iterator,
    Mapping,
    Optional,
)

import numpy as np
from beartype import beartype
from loguru import logger

from fusionblocks._config import get_settings
from fusionblocks.exceptions import NonHomogeneousError
from fusionblocks.series.exact import (
    ExactScalar,
    ScalarLike,
    binomial,
)
from fusionblocks.series.qseries import QSeries
from fusionblocks.series.residues import log_coefficients

Partition = tuple[int, ...]

CENTRAL_CHARGE = Fraction(1)
CONFORMAL_WEIGHT = Fraction(0)
TRACE_OFFSET = CONFORMAL_WEIGHT - CENTRAL_CHARGE / 24


class Vector:
    """A finite combination of partition states with exact coefficients."""

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Mapping[Partition, ScalarLike]] = None) -> None:
        cleaned: dict[Partition, ExactScalar] = {}
        for partition, value in (terms or {}).items():
            scalar = ExactScalar.coerce(value)
            if scalar:
                cleaned[_canonical(partition)] = scalar + cleaned.get(_canonical(partition), ExactScalar.zero())
        self._terms = {p: c for p, c in cleaned.items() if c}

    @classmethod
    def basis(cls, partition: Partition, coefficient: ScalarLike = 1) -> 'Vector':
        return cls({partition: coefficient})

    @classmethod
    def vacuum(cls) -> 'Vector':
        return cls.basis(())

    @classmethod
    def zero(cls) -> 'Vector':
        return cls()

    def items(self) -> Iterator[tuple[Partition, ExactScalar]]:
        return iter(sorted(self._terms.items(), key=lambda item: (sum(item[0]), item[0])))

    def coefficient(self, partition: Partition) -> ExactScalar:
        return self._terms.get(_canonical(partition), ExactScalar.zero())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degrees(self) -> set[int]:
        return {sum(p) for p in self._terms}

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def __add__(self, other: 'Vector') -> 'Vector':
        terms = dict(self._terms)
        for partition, value in other._terms.items():
            terms[partition] = terms.get(partition, ExactScalar.zero()) + value
        return Vector(terms)

    def __neg__(self) -> 'Vector':
        return self.scale(-1)

    def __sub__(self, other: 'Vector') -> 'Vector':
        return self + (-other)

    def scale(self, value: ScalarLike) -> 'Vector':
        return Vector({p: c * value for p, c in self._terms.items()})

    __rmul__ = scale

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return '0'
        return ' + '.join(f'{c} {list(p)}' for p, c in self.items()).replace('+ -', '- ')

    def __repr__(self) -> str:
        return f'Vector({self})'


def _canonical(partition: Partition) -> Partition:
    return tuple(sorted((int(part) for part in partition), reverse=True))


@lru_cache(maxsize=None)
def basis(degree: int) -> tuple[Partition, ...]:
    """
    Partitions of ``degree`` in reverse lexicographic order.

    >>> basis(4)
    ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
    """
    if degree < 0:
        return ()

    def parts(remaining: int, largest: int) -> Iterator[Partition]:
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in parts(remaining - first, first):
                yield (first, *rest)

    return tuple(parts(degree, degree))


def dim(degree: int) -> int:
    return len(basis(degree))


def _without(partition: Partition, part: int) -> Partition:
    index = partition.index(part)
    return partition[:index] + partition[index + 1 :]


@lru_cache(maxsize=None)
def _position(degree: int) -> dict[Partition, int]:
    return {partition: row for row, partition in enumerate(basis(degree))}


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


def _zeros(rows: int, columns: int) -> np.ndarray:
    return np.zeros((rows, columns), dtype=object)


@lru_cache(maxsize=None)
def _alpha_matrix(n: int, degree: int) -> np.ndarray:
    # alpha(n) from M(degree) to M(degree - n)
    source, target = basis(degree), _position(degree - n)
    matrix = _zeros(len(target), len(source))
    for column, partition in enumerate(source):
        if n < 0:
            matrix[target[_canonical((*partition, -n))], column] = 1
        elif n > 0 and n in partition:
            matrix[target[_without(partition, n)], column] = n * partition.count(n)
    return _frozen(matrix)


def _product(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    if not left.size or not right.size:
        return _zeros(left.shape[0], right.shape[1])
    return left @ right


@lru_cache(maxsize=None)
def state_matrix(state: Partition, n: int, degree: int) -> np.ndarray:
    """
    Integer matrix of ``w -> state(n) w`` from ``M(degree)`` to ``M(degree + |state| - n - 1)``.

    Columns follow ``basis(degree)`` and rows the basis of the target degree. Blocks are cached
    and read-only; every other mode and trace in this module is assembled from them.

    >>> state_matrix((1,), -1, 1).tolist()
    [[0], [1]]
    """
    target = degree + sum(state) - n - 1
    result = _zeros(dim(target), dim(degree))
    if not result.size:
        return _frozen(result)
    if not state:
        if n == -1:
            np.fill_diagonal(result, 1)
        return _frozen(result)
    k, rest = state[0], state[1:]
    for j in range(degree + sum(rest) - n):
        inner = state_matrix(rest, n + j, degree)
        raised = _alpha_matrix(-k - j, degree + sum(rest) - n - j - 1)
        result = result + binomial(k + j - 1, j) * _product(raised, inner)
    sign = -1 if k % 2 else 1
    for j in range(1, degree + 1):
        inner = state_matrix(rest, n - k - j, degree - j)
        result = result - sign * binomial(k + j - 1, j) * _product(inner, _alpha_matrix(j, degree))
    return _frozen(result)


@beartype
def heisenberg_mode(a: Vector, n: int, v: Vector) -> Vector:
    """
    ``a(n) v`` for any states ``a`` and ``v``.

    >>> alpha = Vector.basis((1,))
    >>> print(heisenberg_mode(alpha, 1, Vector.basis((1,))))
    1 []
    >>> heisenberg_mode(alpha, 0, Vector.basis((3, 1))).is_zero()
    True
    """
    terms: dict[Partition, ExactScalar] = {}
    for state, c in a.items():
        for partition, d in v.items():
            degree = sum(partition)
            column = state_matrix(state, n, degree)[:, _position(degree)[partition]]
            if not column.size:
                continue
            images = basis(degree + sum(state) - n - 1)
            weight = c * d
            for row in np.flatnonzero(column):
                image = images[row]
                terms[image] = terms.get(image, ExactScalar.zero()) + weight * int(column[row])
    return Vector(terms)


def virasoro_vector() -> Vector:
    """``omega = 1/2 alpha(-1)^2 |0>``."""
    return Vector.basis((1, 1), Fraction(1, 2))


@beartype
def virasoro(n: int, v: Vector) -> Vector:
    """``L(n) v = omega(n + 1) v``."""
    return heisenberg_mode(virasoro_vector(), n + 1, v)


@beartype
def homogeneous_components(v: Vector) -> dict[int, Vector]:
    """Split ``v`` by degree."""
    parts: dict[int, dict[Partition, ExactScalar]] = {}
    for partition, value in v.items():
        parts.setdefault(sum(partition), {})[partition] = value
    return {degree: Vector(terms) for degree, terms in sorted(parts.items())}


@beartype
def wt(v: Vector) -> int:
    """
    Weight of a homogeneous state; the zero vector has weight 0.

    Raises:
        NonHomogeneousError: ``v`` mixes degrees.
    """
    degrees = v.degrees()
    if len(degrees) > 1:
        raise NonHomogeneousError(f'State {v} mixes degrees {sorted(degrees)}; split it with homogeneous_components')
    return degrees.pop() if degrees else 0




@beartype
def square_bracket(a: Vector, m: int, v: Vector) -> Vector:
    """
    ``a[m] v = u^(-m-1) sum_i c_i a(i) v`` with ``sum_i c_i z^i = ln(1+z)^m (1+z)^(wt a - 1)``.

    >>> print(square_bracket(virasoro_vector(), 0, Vector.basis((1,))))
    u^-1 [1] + u^-1 [2]

    Raises:
        NonHomogeneousError: ``a`` mixes degrees.
    """
    weight = wt(a)
    if a.is_zero() or v.is_zero():
        return Vector.zero()
    # a(i) v vanishes once i exceeds wt a + deg v - 1
    top = weight + v.max_degree() - 1
    if top < m:
        return Vector.zero()
    coefficients = log_coefficients(weight, m, top)
    result = Vector.zero()
    for i in range(m, top + 1):
        c = coefficients.at(i)
        if c:
            result = result + heisenberg_mode(a, i, v).scale(c)
    return result.scale(ExactScalar.u_power(-m - 1))


@beartype
def mode_matrix(v: Vector, n: int, degree: int) -> np.ndarray:
    """
    Matrix of ``w -> v(n) w`` from ``M(degree)`` to ``M(degree + wt v - n - 1)``.

    Columns follow ``basis(degree)`` and rows the basis of the target degree; entries are
    ``ExactScalar``.

    Raises:
        NonHomogeneousError: ``v`` mixes degrees.
    """
    target = degree + wt(v) - n - 1
    matrix = np.empty((dim(target), dim(degree)), dtype=object)
    matrix.fill(ExactScalar.zero())
    for state, c in v.items():
        block = state_matrix(state, n, degree)
        for row, column in zip(*np.nonzero(block)):
            matrix[row, column] = matrix[row, column] + c * int(block[row, column])
    return matrix


@lru_cache(maxsize=None)
def _state_trace(state: Partition, degree: int) -> int:
    return int(np.trace(state_matrix(state, sum(state) - 1, degree)))


@lru_cache(maxsize=None)
def _pair_trace(outer: Partition, inner: Partition, degree: int) -> int:
    left = state_matrix(outer, sum(outer) - 1, degree)
    return int(np.trace(_product(left, state_matrix(inner, sum(inner) - 1, degree))))


class ZeroMode:
    """
    The degree-preserving operator ``o(v) = v(wt v - 1)`` of a homogeneous state.

    >>> o = zero_mode(virasoro_vector())
    >>> print(o(Vector.basis((2, 2))))
    4 [2, 2]
    >>> str(o.trace(3))
    '9'
    """

    __slots__ = ('state', 'weight')

    def __init__(self, v: Vector) -> None:
        self.weight = wt(v)
        self.state = v

    def matrix(self, degree: int) -> np.ndarray:
        return mode_matrix(self.state, self.weight - 1, degree)

    def __call__(self, w: Vector) -> Vector:
        terms: dict[Partition, ExactScalar] = {}
        for degree, part in homogeneous_components(w).items():
            states = basis(degree)
            column = np.empty(len(states), dtype=object)
            column[:] = [part.coefficient(p) for p in states]
            terms.update(zip(states, self.matrix(degree).dot(column)))
        return Vector(terms)

    def trace(self, degree: int) -> ExactScalar:
        """Trace on ``M(degree)``."""
        total = ExactScalar.zero()
        for state, c in self.state.items():
            value = _state_trace(state, degree)
            if value:
                total = total + c * value
        return total

    def trace_after(self, other: 'ZeroMode', degree: int) -> ExactScalar:
        """Trace of ``self o other`` on ``M(degree)``."""
        total = ExactScalar.zero()
        for outer, c in self.state.items():
            for inner, d in other.state.items():
                value = _pair_trace(outer, inner, degree)
                if value:
                    total = total + c * d * value
        return total


@beartype
def zero_mode(v: Vector) -> ZeroMode:
    """
    ``o(v)`` for a homogeneous state ``v``.

    Raises:
        NonHomogeneousError: ``v`` mixes degrees; take the zero mode of each homogeneous component.
    """
    return ZeroMode(v)


@beartype
def graded_series(operator: ZeroMode, q_order: int, after: Optional[ZeroMode] = None) -> QSeries:
    """
    ``sum_n tr|_{M(n)} operator q^(n + h - c/24)`` through ``q^q_order`` relative.

    With ``after`` the trace is of ``operator o after``. Degrees are traced in a thread pool.
    """

    def graded(n: int) -> ExactScalar:
        return operator.trace(n) if after is None else operator.trace_after(after, n)

    with ThreadPoolExecutor(max_workers=get_settings().threads) as executor:
        coefficients = list(executor.map(graded, range(q_order + 1)))
    return QSeries(coefficients, offset=TRACE_OFFSET, trunc=q_order)


@lru_cache(maxsize=None)
def trace_table(degree: int, q_order: int) -> np.ndarray:
    """
    ``table[row, n] = tr|_{M(n)} o(p)`` for the ``row``-th partition ``p`` of ``degree``.

    >>> trace_table(2, 3).tolist()
    [[0, 0, 0, 0], [0, 2, 8, 18]]
    """
    states = basis(degree)
    with ThreadPoolExecutor(max_workers=get_settings().threads) as executor:
        columns = list(executor.map(lambda n: [_state_trace(p, n) for p in states], range(q_order + 1)))
    table = np.empty((len(states), q_order + 1), dtype=object)
    for n, column in enumerate(columns):
        table[:, n] = column
    return _frozen(table)


@lru_cache(maxsize=None)
def mode_trace(state: Partition, i: int, partition: Partition, q_order: int) -> tuple[int, ...]:
    """
    q-coefficients of ``tr o(state(i) partition)``, all integers.

    >>> mode_trace((1,), -1, (1,), 3)
    (0, 2, 8, 18)
    """
    degree = sum(partition)
    image_degree = degree + sum(state) - i - 1
    if image_degree < 0:
        return (0,) * (q_order + 1)
    column = state_matrix(state, i, degree)[:, _position(degree)[partition]]
    return tuple(int(value) for value in column.dot(trace_table(image_degree, q_order)))


@beartype
def character(q_order: int) -> QSeries:
    """
    ``sum_n dim M(n) q^(n - 1/24)``.

    >>> [str(c) for c in character(6).coefficients()]
    ['1', '1', '2', '3', '5', '7', '11']
    """
    logger.debug('Fock character through q^{}', q_order)
    return QSeries([dim(n) for n in range(q_order + 1)], offset=TRACE_OFFSET, trunc=q_order)
