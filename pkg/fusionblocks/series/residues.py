"""
Residue sums behind the ``a[-1]`` trace recursion.

Write ``(1+z)^(wt-1) / ln(1+z) = sum_{i>=-1} c_i z^i``. Each integrand

    c_i * iota((x-w)^i) * w^(wt-i-1) * x^(-wt) * f(w/x)

is ``x^-1`` times a function of ``t = w/x``, so its residue in ``x`` is the ``t^0`` coefficient.
Expanding in ``|w| < |x|`` pairs with ``P(t, q)`` and expanding in ``|x| < |w|`` pairs with
``P(tq, q)``. The three sums come out as ``1``, ``-u/2`` and ``G_{m+1}(q)``.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Optional

import icontract
from beartype import beartype
from loguru import logger

from fusionblocks.exceptions import StructuralError
from fusionblocks.series.eisenstein import eisenstein_index
from fusionblocks.series.exact import (
    ExactScalar,
    binomial,
)
from fusionblocks.series.laurent import ZLaurent
from fusionblocks.series.qseries import QSeries
from fusionblocks.series.weierstrass import p_series


def log_coefficients(wt: int, power: int, order: int) -> QSeries:
    """
    Coefficients of ``(1+z)^(wt-1) * ln(1+z)^power`` in ``z`` through ``z^order``.

    ``power`` may be ``-1``, giving the ``c_i`` above with offset ``-1``; ``power >= 0`` gives the
    square-bracket mode coefficients.

    >>> [str(c) for c in log_coefficients(2, -1, 1).coefficients()]
    ['1', '3/2', '5/12']
    """
    extra = max(-power, 0)
    reduced_log = QSeries([Fraction((-1) ** n, n + 1) for n in range(order + extra + 1)])
    length = order + extra + 1
    expansion = QSeries([binomial(wt - 1, n) for n in range(length)])
    series = (reduced_log**power) * expansion
    series = series.shift(power)
    return series.truncate(order)


def _geometric(start: int, sign: int, extent: int, q_order: int, outward: int) -> ZLaurent:
    # sign * sum_{l>=0} t^(start + outward*l), known out to |exponent| = extent
    if outward > 0:
        terms = {start + l: 1 for l in range(max(extent - start, -1) + 1)}
        return ZLaurent.polynomial({e: sign * c for e, c in terms.items()}, q_order).restrict(None, extent)
    terms = {start - l: 1 for l in range(max(start + extent, -1) + 1)}
    return ZLaurent.polynomial({e: sign * c for e, c in terms.items()}, q_order).restrict(-extent, None)


def _kernels(wt: int, i: int, q_order: int, extent: int) -> tuple[ZLaurent, ZLaurent]:
    # t-expansions of iota_{x,w}((x-w)^i) w^(wt-i-1) x^-wt and iota_{w,x}(...), stripped of x^-1
    if i == -1:
        inner = _geometric(wt, 1, extent, q_order, outward=1)
        outer = _geometric(wt - 1, -1, extent, q_order, outward=-1)
        return inner, outer
    # for i >= 0 both expansions are the same Laurent polynomial
    poly = {wt - i - 1 + j: (-1) ** j * comb(i, j) for j in range(i + 1)}
    kernel = ZLaurent.polynomial(poly, q_order)
    return kernel, kernel


@beartype
def residue_sum(
    wt: int,
    inner: Optional[ZLaurent],
    outer: Optional[ZLaurent],
    q_order: int,
    i_max: int,
    extent: int,
) -> QSeries:
    """
    ``sum_i c_i Res_x (iota_{x,w}(...) inner(t) - iota_{w,x}(...) outer(t))`` for ``-1 <= i <= i_max``.

    ``None`` stands for the constant function 1.

    Args:
        wt (int): Weight of ``a``.
        inner (Optional[ZLaurent]): Function paired with the ``|w| < |x|`` expansion.
        outer (Optional[ZLaurent]): Function paired with the ``|x| < |w|`` expansion.
        q_order (int): q-truncation of the result.
        i_max (int): Last ``i`` summed.
        extent (int): How far the geometric kernels of ``i = -1`` are expanded.

    Returns:
        QSeries: The residue sum.
    """
    c = log_coefficients(wt, -1, i_max)
    total = QSeries.zero(q_order)
    for i in range(-1, i_max + 1):
        weight = c.at(i)
        if not weight:
            continue
        first, second = _kernels(wt, i, q_order, extent)
        left = first if inner is None else first * inner
        right = second if outer is None else second * outer
        total = total + (left.constant_term() - right.constant_term()).scale(weight)
    return total


@icontract.require(lambda wt: wt >= 1, error=lambda wt: StructuralError(f'wt must be >= 1, got {wt}'))
@icontract.require(lambda m: m >= 1, error=lambda m: StructuralError(f'm must be >= 1, got {m}'))
@beartype
def residue_identities(wt: int, m: int, q_order: int) -> tuple[QSeries, QSeries, QSeries]:
    """
    The three residue sums with constant, ``P_1`` and ``P_{m+1}`` integrands.

    Args:
        wt (int): Weight of ``a``.
        m (int): Index of the third sum, ``m >= 1``.
        q_order (int): q-truncation.

    Returns:
        tuple[QSeries, QSeries, QSeries]: Equal to ``expected_residues(m, q_order)``.
    """
    i_max = wt + m + 2
    extent = q_order + 1
    window = q_order + wt + m + 3
    u = ExactScalar.u_power(1)
    first = residue_sum(wt, None, None, q_order, i_max, extent)
    p1_inner = p_series(1, q_order, (None, window))
    p1_outer = p_series(1, q_order, (-window, None), shifted=True) - ZLaurent.polynomial({0: u}, q_order)
    second = residue_sum(wt, p1_inner, p1_outer, q_order, i_max, extent)
    inner = p_series(m + 1, q_order, (None, window))
    outer = p_series(m + 1, q_order, (-window, None), shifted=True)
    third = residue_sum(wt, inner, outer, q_order, i_max, extent)
    logger.debug('residue sums wt={} m={}: {} | {} | {}', wt, m, first, second, third)
    return first, second, third


def expected_residues(m: int, q_order: int) -> tuple[QSeries, QSeries, QSeries]:
    """``(1, -u/2, G_{m+1})`` with an odd index meaning the zero series."""
    return (
        QSeries.constant(1, trunc=q_order),
        QSeries.constant(ExactScalar.u_power(1, Fraction(-1, 2)), trunc=q_order),
        eisenstein_index(m + 1, q_order),
    )
