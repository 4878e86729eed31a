"""
Concrete fusion rings and the numeric Verlinde S-matrix oracle.

This is the only module that touches floating point; ``from_smatrix`` rounds every Verlinde sum
to an integer (or refuses) before anything crosses into the exact modules.
"""
from __future__ import annotations

import math
import re
from typing import (
    Callable,
    Optional,
    Sequence,
)

import icontract
import numpy as np
from beartype import beartype
from loguru import logger

from fusionblocks._config import get_settings
from fusionblocks.core.fusion_ring import FusionData
from fusionblocks.exceptions import (
    LabelError,
    NonIntegralError,
    NonUnitaryError,
    StructuralError,
)

SMatrix = np.ndarray

UNITARY_TOLERANCE = 1e-9

_SU2_NAME = re.compile(r'^su2_(\d+)$')


def trivial() -> FusionData:
    return FusionData.build(['1'], [0], [[[1]]])


def ising() -> FusionData:
    """
    The Ising ring on ``(1, eps, sigma)``.

    >>> ising().labels
    ('1', 'eps', 'sigma')
    """
    one = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    eps = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    sigma = [[0, 0, 1], [0, 0, 1], [1, 1, 0]]
    return FusionData.build(['1', 'eps', 'sigma'], [0, 1, 2], [one, eps, sigma])


def lee_yang() -> FusionData:
    """``(1, tau)`` with ``tau . tau = 1 + tau``."""
    return FusionData.build(['1', 'tau'], [0, 1], [[[1, 0], [0, 1]], [[0, 1], [1, 1]]])


@icontract.require(lambda k: k >= 0, error=lambda k: StructuralError(f'su(2) level must be nonnegative, got {k}'))
@beartype
def su2_level(k: int) -> FusionData:
    """
    su(2) at level ``k``: labels ``0..k`` and the truncated Clebsch-Gordan rule.

    ``N[i][j][l] = 1`` iff ``|i-j| <= l <= min(i+j, 2k-i-j)`` and ``i+j+l`` is even. Level 0 is the
    trivial ring.
    """
    size = k + 1
    tensor = [
        [
            [int(abs(i - j) <= l <= min(i + j, 2 * k - i - j) and (i + j + l) % 2 == 0) for l in range(size)]
            for j in range(size)
        ]
        for i in range(size)
    ]
    return FusionData.build([str(i) for i in range(size)], range(size), tensor)


def ising_smatrix() -> SMatrix:
    root = math.sqrt(2.0)
    return 0.5 * np.array([[1.0, 1.0, root], [1.0, 1.0, -root], [root, -root, 0.0]])


def lee_yang_smatrix() -> SMatrix:
    """The unitary Galois conjugate (Fibonacci form), whose vacuum row is positive."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    norm = math.sqrt(2.0 + phi)
    return np.array([[1.0, phi], [phi, -1.0]]) / norm


@beartype
def su2_smatrix(k: int) -> SMatrix:
    """``S_ab = sqrt(2/(k+2)) sin((a+1)(b+1) pi / (k+2))``."""
    if k < 0:
        raise StructuralError(f'su(2) level must be nonnegative, got {k}')
    index = np.arange(k + 1) + 1
    return math.sqrt(2.0 / (k + 2)) * np.sin(np.outer(index, index) * math.pi / (k + 2))


def _check_unitary(s: np.ndarray) -> None:
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise StructuralError(f'S-matrix must be square, got shape {s.shape}')
    if not np.allclose(s, s.T, atol=UNITARY_TOLERANCE):
        raise NonUnitaryError('S-matrix is not symmetric')
    if not np.allclose(s.conj().T @ s, np.eye(s.shape[0]), atol=UNITARY_TOLERANCE):
        raise NonUnitaryError('S-matrix is not unitary')
    vacuum_row = s[0]
    if np.any(np.abs(vacuum_row.imag) > UNITARY_TOLERANCE) or np.any(vacuum_row.real <= 0):
        raise NonUnitaryError('The vacuum row of the S-matrix must be strictly positive')


def _round_exact(values: np.ndarray, tolerance: float, what: str) -> np.ndarray:
    rounded = np.rint(values.real)
    deviation = np.abs(values - rounded)
    worst = float(deviation.max()) if deviation.size else 0.0
    if worst > tolerance:
        index = tuple(int(x) for x in np.unravel_index(int(deviation.argmax()), values.shape))
        raise NonIntegralError(f'{what} at {index} is {values[index]}, {worst:.2e} away from an integer')
    return rounded.astype(np.int64)


@beartype
def from_smatrix(
    s: SMatrix,
    labels: Optional[Sequence[str]] = None,
    tolerance: Optional[float] = None,
) -> FusionData:
    """
    Fusion ring from a modular S-matrix by the Verlinde formula.

    ``N[i][j][k] = sum_a S_ia S_ja conj(S_ka) / S_0a`` and the dual is read off ``S^2``.

    Args:
        s (SMatrix): Symmetric unitary matrix with a positive vacuum row.
        labels (Optional[Sequence[str]]): Label names, default ``0..r``.
        tolerance (Optional[float]): Integrality tolerance, default from the settings.

    Returns:
        FusionData: The rounded ring.

    Raises:
        NonUnitaryError: ``s`` is not symmetric, unitary or vacuum-positive.
        NonIntegralError: A Verlinde number is not within tolerance of an integer.
    """
    tolerance = get_settings().tolerance if tolerance is None else tolerance
    s = np.asarray(s, dtype=complex)
    _check_unitary(s)
    size = s.shape[0]
    verlinde = np.einsum('ia,ja,ka,a->ijk', s, s, s.conj(), 1.0 / s[0])
    tensor = _round_exact(verlinde, tolerance, 'Verlinde number')
    if np.any(tensor < 0):
        raise NonIntegralError('Verlinde formula produced a negative multiplicity')
    charge = _round_exact(s @ s, tolerance, 'S^2 entry')
    dual = [int(np.flatnonzero(row)[0]) if np.count_nonzero(row) == 1 else -1 for row in charge]
    if -1 in dual:
        raise NonUnitaryError('S^2 is not a permutation matrix')
    names = [str(i) for i in range(size)] if labels is None else list(labels)
    logger.debug('Verlinde ring of size {} within tolerance {}', size, tolerance)
    return FusionData.build(names, dual, tensor.tolist())


@beartype
def product(a: FusionData, b: FusionData) -> FusionData:
    """Tensor product ring on label pairs; pair ``(i, j)`` sits at index ``i * |b| + j``."""
    labels = [f'({x},{y})' for x in a.labels for y in b.labels]
    dual = [a.dual[i] * b.size + b.dual[j] for i in range(a.size) for j in range(b.size)]
    size = a.size * b.size
    # axes (i, k, m, j, l, n) -> ((i, j), (k, l), (m, n))
    tensor = np.multiply.outer(a.array, b.array).transpose(0, 3, 1, 4, 2, 5).reshape(size, size, size)
    return FusionData.build(labels, dual, tensor.tolist())


_REGISTRY: dict[str, Callable[[], FusionData]] = {
    'trivial': trivial,
    'ising': ising,
    'lee_yang': lee_yang,
}


def names() -> list[str]:
    """Registered ring names; ``su2_<k>`` works for every ``k`` and ``<a>*<b>`` builds products."""
    return [*_REGISTRY, *(f'su2_{k}' for k in range(1, 7))]


@beartype
def by_name(name: str) -> FusionData:
    """
    Resolve a catalog name.

    >>> by_name('su2_2*lee_yang').size
    6
    """
    if '*' in name:
        left, right = name.split('*', 1)
        return product(by_name(left.strip()), by_name(right.strip()))
    if name in _REGISTRY:
        return _REGISTRY[name]()
    match = _SU2_NAME.match(name)
    if match:
        return su2_level(int(match.group(1)))
    raise LabelError(name, names())
