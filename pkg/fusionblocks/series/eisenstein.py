"""
Bernoulli numbers, divisor sums and the q-expansions of the even-weight Eisenstein series.

With ``u = 2*pi*i`` and the lattice normalization ``G_2k(tau) = sum' (m tau + n)^(-2k)``,

    G_2k(q) = u^2k * ( -B_2k / (2k)! + 2 / (2k-1)! * sum_n sigma_{2k-1}(n) q^n ).

>>> print(eisenstein(1, 2))
(-1/12 u^2) q^0 + (2 u^2) q^1 + (6 u^2) q^2 + O(q^3)
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import (
    comb,
    factorial,
)

import icontract
from beartype import beartype

from fusionblocks.exceptions import StructuralError
from fusionblocks.series.exact import ExactScalar
from fusionblocks.series.qseries import QSeries


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """
    Bernoulli number ``B_n`` from ``sum_{k=0}^{n} binom(n+1, k) B_k = 0`` (so ``B_1 = -1/2``).

    >>> bernoulli(2), bernoulli(4), bernoulli(3)
    (Fraction(1, 6), Fraction(-1, 30), Fraction(0, 1))
    """
    if n < 0:
        raise StructuralError(f'Bernoulli index must be nonnegative, got {n}')
    if n == 0:
        return Fraction(1)
    total = sum((comb(n + 1, k) * bernoulli(k) for k in range(n)), Fraction(0))
    return -total / (n + 1)


def bernoulli_from_generating_function(order: int) -> list[Fraction]:
    """``B_0 .. B_order`` read off ``z / (e^z - 1)``, computed by series division."""
    exp_minus_one_over_z = QSeries([Fraction(1, factorial(n + 1)) for n in range(order + 1)])
    inverse = exp_minus_one_over_z.inverse()
    return [inverse.coefficient(n).as_rational() * factorial(n) for n in range(order + 1)]


def divisor_sigma(k: int, n: int) -> int:
    """
    ``sigma_k(n) = sum_{d | n} d^k``.

    >>> divisor_sigma(1, 6), divisor_sigma(3, 2)
    (12, 9)
    """
    if n < 1:
        raise StructuralError(f'divisor_sigma needs n >= 1, got {n}')
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


@icontract.require(lambda k: k >= 1, error=lambda k: StructuralError(f'Eisenstein weight index must be >= 1, got {k}'))
@icontract.require(lambda order: order >= 0, error=lambda order: StructuralError(f'q-order must be >= 0, got {order}'))
@beartype
def eisenstein(k: int, order: int) -> QSeries:
    """
    The q-expansion of ``G_2k`` through ``q^order``.

    Args:
        k (int): Half the weight; ``k = 1`` gives the quasi-modular ``G_2``.
        order (int): Last q-exponent computed.

    Returns:
        QSeries: Offset 0, coefficients in ``Q * u^2k``.
    """
    weight = 2 * k
    constant = -bernoulli(weight) / factorial(weight)
    scale = Fraction(2, factorial(weight - 1))
    coeffs = [ExactScalar.u_power(weight, constant)]
    coeffs.extend(ExactScalar.u_power(weight, scale * divisor_sigma(weight - 1, n)) for n in range(1, order + 1))
    return QSeries(coeffs, trunc=order)


@beartype
def eisenstein_index(index: int, order: int) -> QSeries:
    """
    ``G_index`` for any ``index >= 1``; odd indices give the zero series and ``index = 0`` is not defined.

    >>> eisenstein_index(3, 4).is_zero()
    True
    """
    if index < 1:
        raise StructuralError(f'Eisenstein index must be >= 1, got {index}')
    if index % 2:
        return QSeries.zero(order)
    return eisenstein(index // 2, order)
