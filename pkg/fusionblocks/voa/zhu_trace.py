"""
Genus-one trace functions on the Fock module and the recursion identities they satisfy.

Every check returns a residual (a q-series, or a z-Laurent series per basis vector) that must be
identically zero within the truncation; nothing here returns a bare boolean. Traces of
square-bracket images are assembled from cached integer traces of single modes of basis states.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import (
    Any,
    Iterable,
    Optional,
    Sequence,
)

import dask
from beartype import beartype
from dask import delayed
from loguru import logger

from fusionblocks._config import get_settings
from fusionblocks.exceptions import StructuralError
from fusionblocks.series.eisenstein import eisenstein
from fusionblocks.series.exact import (
    ExactScalar,
    binomial,
)
from fusionblocks.series.laurent import ZLaurent
from fusionblocks.series.qseries import QSeries
from fusionblocks.series.residues import log_coefficients
from fusionblocks.series.weierstrass import (
    p_series,
    wp_expansion,
)
from fusionblocks.voa.fock import (
    TRACE_OFFSET,
    Partition,
    Vector,
    basis,
    graded_series,
    heisenberg_mode,
    homogeneous_components,
    mode_trace,
    square_bracket,
    virasoro_vector,
    wt,
    zero_mode,
)

A0 = 'a0'
AM = 'am'
AMINUS1 = 'aminus1'
SUM_FORMULA = 'sumformula'
BLOCK = 'block'
LMINUS1 = 'lminus1'
IDENTITIES = (A0, AM, AMINUS1, SUM_FORMULA, BLOCK, LMINUS1)

LaurentVector = dict[Partition, ZLaurent]


@beartype
def trace(v: Vector, q_order: int) -> QSeries:
    """
    ``tr|_M o(v) q^(L(0) - c/24)`` through ``q^q_order`` relative to the offset.

    ``o`` is extended linearly, so ``v`` may mix degrees.

    >>> [str(c) for c in trace(virasoro_vector(), 5).coefficients()]
    ['0', '1', '4', '9', '20', '35']
    """
    total = QSeries.zero(q_order, offset=TRACE_OFFSET)
    for part in homogeneous_components(v).values():
        total = total + graded_series(zero_mode(part), q_order)
    return total


@beartype
def composed_trace(a: Vector, v: Vector, q_order: int) -> QSeries:
    """``tr o(a) o(v) q^(L(0) - c/24)`` for homogeneous ``a`` and ``v``."""
    return graded_series(zero_mode(a), q_order, after=zero_mode(v))


@lru_cache(maxsize=None)
def _bracket_weights(weight: int, m: int, top: int) -> tuple[tuple[int, Fraction], ...]:
    # (i, c_i) with a[m] = u^(-m-1) sum_i c_i a(i), for i up to top
    coefficients = log_coefficients(weight, m, top)
    found = ((i, coefficients.at(i)) for i in range(m, top + 1))
    return tuple((i, c.as_rational()) for i, c in found if c)


@lru_cache(maxsize=None)
def _basis_bracket_trace(state: Partition, m: int, partition: Partition, q_order: int) -> tuple[Fraction, ...]:
    # u^(m+1) tr o(state[m] partition), coefficientwise
    top = sum(state) + sum(partition) - 1
    totals = [Fraction(0)] * (q_order + 1)
    if top < m:
        return tuple(totals)
    for i, c in _bracket_weights(sum(state), m, top):
        for n, value in enumerate(mode_trace(state, i, partition, q_order)):
            if value:
                totals[n] += c * value
    return tuple(totals)


@beartype
def bracket_trace(a: Vector, m: int, v: Vector, q_order: int) -> QSeries:
    """
    ``tr o(a[m] v)``, equal to ``trace(square_bracket(a, m, v), q_order)``.

    >>> bracket_trace(virasoro_vector(), 0, Vector.basis((1,)), 3).is_zero()
    True

    Raises:
        NonHomogeneousError: ``a`` mixes degrees.
    """
    wt(a)  # raises on mixed degrees
    coefficients = [ExactScalar.zero()] * (q_order + 1)
    for state, c in a.items():
        for partition, d in v.items():
            factor = c * d
            for n, value in enumerate(_basis_bracket_trace(state, m, partition, q_order)):
                if value:
                    coefficients[n] = coefficients[n] + factor * value
    return QSeries(coefficients, offset=TRACE_OFFSET, trunc=q_order).scale(ExactScalar.u_power(-m - 1))


@lru_cache(maxsize=None)
def _eisenstein(k: int, q_order: int) -> QSeries:
    return eisenstein(k, q_order)


def _bracket_top(a: Vector, v: Vector) -> int:
    # a[p] v = 0 for p above wt a + deg v - 1
    return wt(a) + v.max_degree() - 1


def _eisenstein_sum(a: Vector, v: Vector, m: int, q_order: int) -> QSeries:
    # sum_k binom(2k-1, m-1) G_2k tr o(a[2k-m] v)
    total = QSeries.zero(q_order, offset=TRACE_OFFSET)
    top = _bracket_top(a, v)
    k = 1
    while 2 * k - m <= top:
        weight = comb(2 * k - 1, m - 1)
        if weight:
            traced = bracket_trace(a, 2 * k - m, v, q_order)
            if not traced.is_zero():
                total = total + _eisenstein(k, q_order) * traced.scale(weight)
        k += 1
    return total


@beartype
def check_a0(a: Vector, v: Vector, q_order: int) -> QSeries:
    """``tr o(a[0] v)``, which vanishes."""
    residual = bracket_trace(a, 0, v, q_order)
    _log_verdict(A0, residual)
    return residual


@beartype
def check_am(a: Vector, v: Vector, m: int, q_order: int) -> QSeries:
    """
    ``tr o(a[-m] v) + (-1)^m sum_k binom(2k-1, m-1) G_2k tr o(a[2k-m] v)`` for ``m >= 2``.

    >>> alpha = Vector.basis((1,))
    >>> check_am(alpha, alpha, 2, 4).is_zero()
    True
    """
    if m < 2:
        raise StructuralError(f'check_am needs m >= 2, got {m}')
    sign = -1 if m % 2 else 1
    residual = bracket_trace(a, -m, v, q_order) + _eisenstein_sum(a, v, m, q_order).scale(sign)
    _log_verdict(AM, residual)
    return residual


@beartype
def check_aminus1(a: Vector, v: Vector, q_order: int) -> QSeries:
    """
    ``tr o(a[-1] v) - tr o(a) o(v) - sum_k G_2k tr o(a[2k-1] v)`` for homogeneous ``a`` and ``v``.

    >>> alpha = Vector.basis((1,))
    >>> check_aminus1(alpha, alpha, 4).is_zero()
    True
    """
    left = bracket_trace(a, -1, v, q_order)
    residual = left - composed_trace(a, v, q_order) - _eisenstein_sum(a, v, 1, q_order)
    _log_verdict(AMINUS1, residual)
    return residual


@beartype
def check_lminus1(v: Vector, q_order: int) -> QSeries:
    """``tr o(omega[0] v)``; ``omega[0] = u^-1 (L(-1) + L(0))`` has vanishing zero-mode trace."""
    return check_a0(virasoro_vector(), v, q_order)


@lru_cache(maxsize=None)
def _wp(m: int, q_order: int, top: int) -> tuple[tuple[int, QSeries], ...]:
    return tuple(wp_expansion(m, q_order, (-m, top)).items())


@beartype
def conformal_block_annihilation(a: Vector, v: Vector, m: int, q_order: int) -> QSeries:
    """
    Trace of ``Res_z Y[a, z] wp_m(z) v``, or of ``a[0] v`` when ``m == 0``.

    The residue is read off the Laurent expansion of ``wp_m``: its ``z^p`` coefficient pairs
    with ``a[p] v``.

    Raises:
        StructuralError: ``m == 1`` or ``m < 0``; ``wp_1`` is not among the functions on the punctured torus.
    """
    if m == 0:
        return check_a0(a, v, q_order)
    if m < 2:
        raise StructuralError(f'Annihilation conditions use m = 0 or m >= 2, got {m}')
    top = _bracket_top(a, v)
    residual = QSeries.zero(q_order, offset=TRACE_OFFSET)
    if top < -m:
        return residual
    for exponent, coefficient in _wp(m, q_order, top):
        traced = bracket_trace(a, exponent, v, q_order)
        if not traced.is_zero():
            residual = residual + coefficient * traced
    _log_verdict(BLOCK, residual)
    return residual


def _laurent_add(target: LaurentVector, partition: Partition, series: ZLaurent) -> None:
    target[partition] = target[partition] + series if partition in target else series


@lru_cache(maxsize=None)
def _left_kernel(weight: int, i: int, q_order: int, window: int, shifted: bool) -> ZLaurent:
    # coefficient of a(i) v on the left side
    terms: dict[int, QSeries] = {}
    for k in range(1, window + 1):
        # 1/(1-q^k) from j = 0, q^k/(1-q^k) from j = 1
        positive = {j * k: 1 for j in range(0 if not shifted else 1, q_order // k + 1)}
        negative = {j * k: -1 for j in range(0 if shifted else 1, q_order // k + 1)}
        up, down = binomial(weight - 1 + k, i), binomial(weight - 1 - k, i)
        if up:
            terms[k] = QSeries.from_terms(positive, q_order).scale(up)
        if down:
            terms[-k] = QSeries.from_terms(negative, q_order).scale(down)
    return ZLaurent(terms, q_order, lo=-window, hi=window)


@lru_cache(maxsize=None)
def _p(mp1: int, q_order: int, window: int, shifted: bool) -> ZLaurent:
    return p_series(mp1, q_order, (-window, window), shifted=shifted)


@lru_cache(maxsize=None)
def _right_kernel(weight: int, i: int, q_order: int, window: int, shifted: bool) -> ZLaurent:
    # coefficient of a(i) v on the right side: sum_{m <= i} u^(-m-1) c_i P_{m+1}
    total = ZLaurent({}, q_order, lo=-window, hi=window)
    for m in range(i + 1):
        c = dict(_bracket_weights(weight, m, i)).get(i)
        if c:
            total = total + _p(m + 1, q_order, window, shifted).scale(ExactScalar.u_power(-m - 1, c))
    return total


@lru_cache(maxsize=None)
def _kernel_difference(weight: int, i: int, q_order: int, window: int, shifted: bool) -> ZLaurent:
    left = _left_kernel(weight, i, q_order, window, shifted)
    return left - _right_kernel(weight, i, q_order, window, shifted)


@beartype
def sum_formula_left(a: Vector, v: Vector, q_order: int, window: int, shifted: bool = True) -> LaurentVector:
    """
    ``sum_i sum_k (binom(wt a-1+k, i) A_k z^k + binom(wt a-1-k, i) B_k z^-k) a(i) v``.

    Shifted, ``A_k = q^k / (1 - q^k)`` and ``B_k = q^-k / (1 - q^-k)``; unshifted the numerators
    ``q^k`` and ``q^-k`` are dropped.
    """
    weight = wt(a)
    left: LaurentVector = {}
    for i in range(_bracket_top(a, v) + 1):
        image = heisenberg_mode(a, i, v)
        if not image:
            continue
        series = _left_kernel(weight, i, q_order, window, shifted)
        for partition, value in image.items():
            _laurent_add(left, partition, series.scale(value))
    return left


@beartype
def sum_formula_right(a: Vector, v: Vector, q_order: int, window: int, shifted: bool = True) -> LaurentVector:
    """``sum_m P_{m+1}(z, q) a[m] v``, or with ``P_{m+1}(zq, q)`` when ``shifted``."""
    right: LaurentVector = {}
    for m in range(_bracket_top(a, v) + 1):
        image = square_bracket(a, m, v)
        if not image:
            continue
        series = _p(m + 1, q_order, window, shifted)
        for partition, value in image.items():
            _laurent_add(right, partition, series.scale(value))
    return right


@beartype
def check_sum_formula(
    a: Vector,
    v: Vector,
    q_order: int,
    window: int,
    shifted: bool = True,
) -> LaurentVector:
    """
    Difference of the two sides of the expansion of ``a(i) v`` sums into ``P_{m+1}`` functions.

    Both sides are linear in the vectors ``a(i) v``; the residual is built from the difference of
    their ``a(i) v`` coefficients, which depends on ``wt a`` and ``i`` only and is cached.

    Args:
        a (Vector): Homogeneous state.
        v (Vector): Any state.
        q_order (int): q-truncation.
        window (int): z-exponents from ``-window`` to ``window``.
        shifted (bool): Compare against ``P_{m+1}(zq, q)`` (default) or ``P_{m+1}(z, q)``.

    Returns:
        LaurentVector: Nonzero residual coefficients by basis vector; empty when the identity holds.

    >>> check_sum_formula(Vector.basis((1,)), Vector.vacuum(), 4, 4)
    {}
    """
    weight = wt(a)
    collected: LaurentVector = {}
    for i in range(_bracket_top(a, v) + 1):
        difference = _kernel_difference(weight, i, q_order, window, shifted)
        if difference.is_zero():
            continue
        for partition, value in heisenberg_mode(a, i, v).items():
            _laurent_add(collected, partition, difference.scale(value))
    residual = {partition: series for partition, series in collected.items() if not series.is_zero()}
    _log_verdict(SUM_FORMULA, residual)
    return residual


def first_bad(residual: Any) -> Optional[str]:
    """Describe the first nonzero coefficient of a residual, or ``None`` when it vanishes."""
    if isinstance(residual, QSeries):
        hit = residual.first_nonzero()
        return None if hit is None else f'q^{hit[0]}: {hit[1]}'
    for partition, series in sorted(residual.items()):
        found = series.first_nonzero()
        if found is not None:
            z_exp, q_exp, value = found
            return f'{list(partition)} z^{z_exp} q^{q_exp}: {value}'
    return None


def _log_verdict(identity: str, residual: Any) -> None:
    bad = first_bad(residual)
    if bad is None:
        logger.debug('{} residual vanishes', identity)
    else:
        logger.warning('{} residual is nonzero at {}', identity, bad)


@dataclass(frozen=True)
class CheckRow:
    identity: str
    a: Partition
    v: Partition
    m: Optional[int]
    first_bad: Optional[str]

    @property
    def passed(self) -> bool:
        return self.first_bad is None

    def to_dict(self) -> dict[str, Any]:
        return {
            'identity': self.identity,
            'a': list(self.a),
            'v': list(self.v),
            'm': self.m,
            'first_bad': self.first_bad,
        }


def _states(deg_max: int) -> list[Partition]:
    return [partition for degree in range(deg_max + 1) for partition in basis(degree)]


def _run_one(identity: str, a: Partition, v: Partition, m: int, q_order: int, window: int) -> list[CheckRow]:
    left, right = Vector.basis(a), Vector.basis(v)
    if identity == A0:
        return [CheckRow(identity, a, v, 0, first_bad(check_a0(left, right, q_order)))]
    if identity == AMINUS1:
        return [CheckRow(identity, a, v, -1, first_bad(check_aminus1(left, right, q_order)))]
    if identity == SUM_FORMULA:
        return [CheckRow(identity, a, v, None, first_bad(check_sum_formula(left, right, q_order, window)))]
    if identity == LMINUS1:
        return [CheckRow(identity, (1, 1), v, 0, first_bad(check_lminus1(right, q_order)))] if a == () else []
    orders = range(2, m + 1) if identity == AM else (0, *range(2, m + 1))
    rows = []
    for order in orders:
        if identity == AM:
            residual = check_am(left, right, order, q_order)
        else:
            residual = conformal_block_annihilation(left, right, order, q_order)
        rows.append(CheckRow(identity, a, v, order, first_bad(residual)))
    return rows


@beartype
def run_checks(
    identities: Iterable[str],
    deg_max: int,
    q_order: int,
    m: int = 2,
    window: Optional[int] = None,
    states: Optional[Sequence[Partition]] = None,
) -> list[CheckRow]:
    """
    Run identities over every pair of basis states ``a, v`` of degree at most ``deg_max``.

    ``m`` is the largest order used by ``am`` and ``block``; ``window`` defaults to ``q_order``.
    Pairs run as ``dask.delayed`` tasks on the threaded scheduler; rows come back in pair order.
    """
    chosen = list(identities)
    unknown = [name for name in chosen if name not in IDENTITIES]
    if unknown:
        raise StructuralError(f'Unknown identities {unknown}; choose from {list(IDENTITIES)}')
    pool = list(states) if states is not None else _states(deg_max)
    window = q_order if window is None else window
    tasks = [
        delayed(_run_one)(identity, a, v, m, q_order, window) for identity in chosen for a in pool for v in pool
    ]
    batches = dask.compute(*tasks, scheduler='threads', num_workers=get_settings().threads)
    rows = [row for batch in batches for row in batch]
    failed = sum(not row.passed for row in rows)
    logger.info('{} identity rows, {} failing', len(rows), failed)
    return rows

