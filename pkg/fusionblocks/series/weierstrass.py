"""
Weierstrass-family expansions and the P-series of genus-one trace functions.

``wp_expansion(m)`` is the Laurent expansion of ``wp_m`` around ``z = 0``; ``p_series(m+1)`` is the
formal expansion of

    P_{m+1}(z, q) = u^(m+1)/m! * sum_{k>=1} ( k^m z^k / (1 - q^k) + (-1)^(m+1) k^m z^-k q^k / (1 - q^k) )

on ``|q| < |z| < 1`` (or on ``1 < |z| < |q|^-1`` for the shifted argument ``zq``), and
``p_series_exp`` performs the substitution ``z -> e^(uz)`` exactly. ``p_wp_lemma_check`` compares
the two families.

Windows are pairs ``(lo, hi)`` of z-exponents; a side given as ``None`` asks for every term on that
side, which is only possible where the expansion is finite there.
"""
from __future__ import annotations

from fractions import Fraction
from math import (
    comb,
    factorial,
)
from typing import Optional

import icontract
from beartype import beartype
from loguru import logger

from fusionblocks.exceptions import (
    StructuralError,
    TruncationError,
)
from fusionblocks.series.eisenstein import (
    bernoulli_from_generating_function,
    eisenstein,
)
from fusionblocks.series.exact import ExactScalar
from fusionblocks.series.laurent import ZLaurent
from fusionblocks.series.qseries import QSeries

Window = tuple[Optional[int], Optional[int]]


def _from_nested(
    terms: dict[int, dict[int, ExactScalar]],
    q_order: int,
    lo: Optional[int],
    hi: Optional[int],
) -> ZLaurent:
    return ZLaurent(
        {e: QSeries.from_terms(dict(qterms), order=q_order) for e, qterms in terms.items()},
        q_order=q_order,
        lo=lo,
        hi=hi,
    )


def _accumulate(terms: dict[int, dict[int, ExactScalar]], z_exp: int, q_exp: int, value: ExactScalar) -> None:
    row = terms.setdefault(z_exp, {})
    row[q_exp] = row[q_exp] + value if q_exp in row else value


@icontract.require(lambda m: m >= 1, error=lambda m: StructuralError(f'wp_m needs m >= 1, got {m}'))
@beartype
def wp_expansion(m: int, q_order: int, window: Window, zhu_convention: bool = False) -> ZLaurent:
    """
    Expansion ``z^-m + (-1)^m sum_k binom(2k-1, m-1) G_2k(q) z^(2k-m)`` of ``wp_m``.

    Args:
        m (int): Index of the function, ``m >= 1``.
        q_order (int): q-truncation of the Eisenstein coefficients.
        window (Window): z-exponents to keep; the upper side must be finite and the lower side must
            reach the pole (or be ``None``).
        zhu_convention (bool): Drop the ``G_2`` (``k = 1``) term, the classical ``wp_1``/``wp_2`` normalization.

    Returns:
        ZLaurent: The expansion on the window.

    >>> wp = wp_expansion(2, 2, (None, 0))
    >>> print(wp.coefficient(-2))
    (1) q^0 + O(q^3)
    """
    lo, hi = window
    if hi is None:
        raise TruncationError('wp_expansion has infinitely many positive z-exponents; give an upper window bound')
    if lo is not None and lo > -m:
        raise TruncationError(f'Window starting at z^{lo} misses the pole z^{-m}')
    sign = -1 if m % 2 else 1
    terms: dict[int, QSeries] = {-m: QSeries.constant(1, trunc=q_order)}
    k = 2 if zhu_convention else 1
    while 2 * k - m <= hi:
        binomial = comb(2 * k - 1, m - 1)
        if binomial:
            terms[2 * k - m] = eisenstein(k, q_order).scale(sign * binomial)
        k += 1
    return ZLaurent(terms, q_order=q_order, lo=lo, hi=hi)


@icontract.require(lambda mp1: mp1 >= 1, error=lambda mp1: StructuralError(f'P_(m+1) needs m+1 >= 1, got {mp1}'))
@beartype
def p_series(mp1: int, q_order: int, window: Window, shifted: bool = False) -> ZLaurent:
    """
    Formal expansion of ``P_{m+1}(z, q)``, or of ``P_{m+1}(zq, q)`` when ``shifted``.

    Unshifted, the positive z-powers carry ``1/(1 - q^k)`` and are infinite in number, while ``z^-k``
    only appears from ``q^k`` on. Shifted, the roles of the two sides swap.

    Args:
        mp1 (int): ``m + 1 >= 1``.
        q_order (int): Last q-exponent kept.
        window (Window): z-exponents to keep.
        shifted (bool): Expand ``P_{m+1}(zq, q)``.

    Returns:
        ZLaurent: The expansion.

    >>> print(p_series(1, 1, (None, 1)).coefficient(-1))
    (-u^1) q^1 + O(q^2)
    """
    m = mp1 - 1
    lo, hi = window
    if not shifted and hi is None:
        raise TruncationError('P(z, q) has infinitely many positive z-exponents; give an upper window bound')
    if shifted and lo is None:
        raise TruncationError('P(zq, q) has infinitely many negative z-exponents; give a lower window bound')
    prefactor = ExactScalar.u_power(mp1, Fraction(1, factorial(m)))
    tail_sign = -1 if (m + 1) % 2 else 1
    positive_extent = q_order if shifted else hi
    negative_extent = -lo if shifted else q_order
    assert positive_extent is not None and negative_extent is not None
    terms: dict[int, dict[int, ExactScalar]] = {}
    for k in range(1, positive_extent + 1):
        weight = prefactor * k**m
        first = 1 if shifted else 0
        for j in range(first, q_order // k + 1):
            _accumulate(terms, k, j * k, weight)
    for k in range(1, negative_extent + 1):
        weight = prefactor * (tail_sign * k**m)
        first = 0 if shifted else 1
        for j in range(first, q_order // k + 1):
            _accumulate(terms, -k, j * k, weight)
    logger.debug(
        'p_series mp1={} q_order={} window={} shifted={}: {} z-terms', mp1, q_order, window, shifted, len(terms)
    )
    return _from_nested(terms, q_order, lo, hi)


def _geometric_pole(m: int, z_order: int) -> QSeries:
    # d^m/dz^m of 1/(1 - e^(uz)) as a Laurent series in z, through z^z_order;
    # uz / (e^(uz) - 1) = sum_n B_n (uz)^n / n!
    u = ExactScalar.u_power(1)
    numbers = bernoulli_from_generating_function(z_order + m + 1)
    generating = QSeries([ExactScalar.u_power(n, b / factorial(n)) for n, b in enumerate(numbers)])
    series = generating.scale(-u.inverse()).shift(-1)
    for _ in range(m):
        series = series.derivative()
    return series


@icontract.require(lambda mp1: mp1 >= 1, error=lambda mp1: StructuralError(f'P_(m+1) needs m+1 >= 1, got {mp1}'))
@beartype
def p_series_exp(mp1: int, q_order: int, z_order: int) -> ZLaurent:
    """
    ``P_{m+1}(e^(uz), q)`` as a Laurent series in ``z`` through ``z^z_order``.

    The ``q^0`` part is ``u/m! * d^m/dz^m (1/(1 - e^(uz)))`` (less ``u`` when ``m = 0``), a Laurent
    series with a pole of order ``m + 1``; every ``q^n`` part with ``n >= 1`` is a finite sum over the
    divisors of ``n`` of exponentials and therefore a power series in ``z``.
    """
    m = mp1 - 1
    u = ExactScalar.u_power(1)
    terms: dict[int, dict[int, ExactScalar]] = {}
    head = _geometric_pole(m, z_order).scale(u * Fraction(1, factorial(m)))
    for index, value in enumerate(head.coefficients()):
        if value:
            _accumulate(terms, int(head.offset) + index, 0, value)
    if m == 0:
        _accumulate(terms, 0, 0, -u)
    prefactor = ExactScalar.u_power(mp1, Fraction(1, factorial(m)))
    tail_sign = -1 if (m + 1) % 2 else 1
    for n in range(1, q_order + 1):
        for k in (d for d in range(1, n + 1) if n % d == 0):
            for e in range(z_order + 1):
                # e^(ukz) + (-1)^(m+1) e^(-ukz), z^e coefficient
                parity = 1 + tail_sign * (-1 if e % 2 else 1)
                if parity:
                    value = prefactor * (u**e * Fraction(parity * k ** (m + e), factorial(e)))
                    _accumulate(terms, e, n, value)
    return _from_nested(terms, q_order, None, z_order)


@beartype
def lemma_right_side(mp1: int, q_order: int, z_order: int, zhu_convention: bool = True) -> ZLaurent:
    """
    The Weierstrass side of ``P_k(e^(uz), q)``, assembled in either normalization of ``wp_1``, ``wp_2``.

    With ``zhu_convention`` the ``G_2`` terms appear explicitly:
    ``P_1 = -wp_1 + G_2 z - u/2``, ``P_2 = wp_2 + G_2`` and ``P_k = (-1)^k wp_k`` for ``k >= 3``.
    Without it the ``G_2`` terms live inside ``wp_1``, ``wp_2`` and ``P_k = (-1)^k wp_k - [k = 1] u/2``.
    """
    wp = wp_expansion(mp1, q_order, (None, z_order), zhu_convention=zhu_convention)
    side = wp.scale(-1 if mp1 % 2 else 1)
    if mp1 == 1:
        side = side + ZLaurent.polynomial({0: ExactScalar.u_power(1, Fraction(-1, 2))}, q_order)
    if zhu_convention and mp1 in (1, 2):
        g2 = ZLaurent({2 - mp1: eisenstein(1, q_order)}, q_order=q_order)
        side = side + g2
    return side


@beartype
def p_wp_lemma_check(mp1: int, q_order: int, z_order: int) -> ZLaurent:
    """
    ``p_series_exp(mp1) - lemma_right_side(mp1)``; the identity holds iff the residual is zero.

    >>> p_wp_lemma_check(2, 4, 4).is_zero()
    True
    """
    residual = p_series_exp(mp1, q_order, z_order) - lemma_right_side(mp1, q_order, z_order)
    if residual.is_zero():
        logger.info('P-wp identity holds for k={} through q^{}, z^{}', mp1, q_order, z_order)
    else:
        logger.warning('P-wp identity fails for k={}: first residual {}', mp1, residual.first_nonzero())
    return residual


@beartype
def wp_derivative_check(m: int, q_order: int, z_order: int) -> ZLaurent:
    """``d/dz wp_m + m wp_{m+1}``, zero on the common window."""
    derivative = wp_expansion(m, q_order, (None, z_order)).derivative()
    following = wp_expansion(m + 1, q_order, (None, z_order)).scale(m)
    return derivative + following
