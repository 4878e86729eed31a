"""
Fusion rings: the integer tensor ``N_{i,j}^k`` on labels ``0..r`` with the vacuum at ``0``.

Matrices handed out by this module are numpy arrays of Python integers (``dtype=object``), so
products and powers never overflow. Axiom checks run on fixed-width copies when the entries are
small enough for every intermediate sum to fit.
"""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import (
    dataclass,
    field,
)
from functools import cached_property
from pathlib import Path
from typing import (
    Any,
    Iterable,
    Optional,
    Sequence,
    Union,
)

import icontract
import numpy as np
from beartype import beartype
from loguru import logger

from fusionblocks._config import get_settings
from fusionblocks.exceptions import (
    AxiomViolationError,
    FormulaMismatchError,
    LabelError,
    StructuralError,
)
from fusionblocks.formats import (
    FusionFile,
    read_model,
    write_model,
)

Label = Union[int, str]
IntMatrix = np.ndarray

IDENTITY = 'identity'
COMMUTATIVITY = 'commutativity'
ASSOCIATIVITY = 'associativity'
DUAL = 'dual'
TRANSPOSE = 'transpose'

# largest entry for which r * max^2 stays far inside int64
_FIXED_WIDTH_LIMIT = 1 << 20


@dataclass(frozen=True)
class AxiomViolation:
    """One failed axiom with the first index tuple that witnesses it."""

    axiom: str
    witness: tuple[int, ...]
    count: int = 1

    def __str__(self) -> str:
        return f'{self.axiom} {self.witness} ({self.count} violation{"s" if self.count != 1 else ""})'


@dataclass(frozen=True)
class FusionData:
    """
    Labels, the dagger involution and the fusion tensor of a fusion ring.

    Attributes:
        labels (tuple[str, ...]): Label names; index 0 is the vacuum.
        dual (tuple[int, ...]): The dagger permutation.
        tensor (tuple): ``tensor[i][j][k] = N_{i,j}^k``.
        vacuum_index (int): Always 0.
    """

    labels: tuple[str, ...]
    dual: tuple[int, ...]
    tensor: tuple[tuple[tuple[int, ...], ...], ...]
    vacuum_index: int = field(default=0)

    def __post_init__(self) -> None:
        labels = tuple(str(label) for label in self.labels)
        size = len(labels)
        if size == 0:
            raise StructuralError('A fusion ring needs at least the vacuum label')
        if len(set(labels)) != size:
            raise StructuralError(f'Label names must be distinct, got {list(labels)}')
        if self.vacuum_index != 0:
            raise StructuralError(f'The vacuum must be label 0, got vacuum_index={self.vacuum_index}')
        dual = tuple(int(d) for d in self.dual)
        if sorted(dual) != list(range(size)):
            raise StructuralError(f'dual must be a permutation of 0..{size - 1}, got {list(dual)}')
        tensor = _tensor_tuple(self.tensor, size)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'dual', dual)
        object.__setattr__(self, 'tensor', tensor)

    @classmethod
    def build(cls, labels: Iterable[Any], dual: Iterable[int], tensor: Any) -> 'FusionData':
        """Construct from any nested sequences or arrays."""
        return cls(labels=tuple(labels), dual=tuple(dual), tensor=tensor)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def rank(self) -> int:
        """``r``, the largest label index."""
        return self.size - 1

    def N(self, i: int, j: int, k: int) -> int:  # noqa: N802
        return self.tensor[i][j][k]

    @cached_property
    def array(self) -> np.ndarray:
        """The tensor as an exact (object) array."""
        return np.array(self.tensor, dtype=object).reshape((self.size,) * 3)

    @cached_property
    def fixed_width(self) -> np.ndarray:
        """The tensor in int64 when that is exact for every check, otherwise the object array."""
        if max(value for plane in self.tensor for line in plane for value in line) <= _FIXED_WIDTH_LIMIT:
            return np.array(self.tensor, dtype=np.int64).reshape((self.size,) * 3)
        return self.array

    @cached_property
    def axiom_report(self) -> tuple[AxiomViolation, ...]:
        return tuple(_check_axioms(self))


def _tensor_tuple(tensor: Any, size: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    try:
        rows = [[[int(value) for value in line] for line in plane] for plane in tensor]
    except TypeError as e:
        raise StructuralError(f'tensor must be a 3-dimensional array of integers: {e}') from e
    if len(rows) != size or any(len(plane) != size or any(len(line) != size for line in plane) for plane in rows):
        raise StructuralError(f'tensor must have shape ({size}, {size}, {size}) to match the labels')
    if any(value < 0 for plane in rows for line in plane for value in line):
        raise StructuralError('Fusion multiplicities must be nonnegative')
    return tuple(tuple(tuple(line) for line in plane) for plane in rows)


def _first(mask: np.ndarray) -> Optional[tuple[tuple[int, ...], int]]:
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(x) for x in hits[0]), len(hits)


def _associativity_plane(tensor: np.ndarray, i: int) -> Optional[tuple[tuple[int, ...], int]]:
    # sum_W N[i][j][W] N[W][k][l] against sum_W N[j][k][W] N[i][W][l], indexed [j, k, l]
    left = np.einsum('jw,wkl->jkl', tensor[i], tensor) if tensor.dtype != object else _object_left(tensor, i)
    right = np.einsum('jkw,wl->jkl', tensor, tensor[i]) if tensor.dtype != object else _object_right(tensor, i)
    hit = _first(left != right)
    if hit is None:
        return None
    (j, k, l), count = hit
    return (i, j, k, l), count


def _object_left(tensor: np.ndarray, i: int) -> np.ndarray:
    size = tensor.shape[0]
    return np.array([[tensor[i][j] @ tensor[:, k, :] for k in range(size)] for j in range(size)], dtype=object)


def _object_right(tensor: np.ndarray, i: int) -> np.ndarray:
    size = tensor.shape[0]
    return np.array([[tensor[j, k, :] @ tensor[i] for k in range(size)] for j in range(size)], dtype=object)


def _check_axioms(ring: FusionData) -> list[AxiomViolation]:
    tensor = ring.fixed_width
    size = ring.size
    dual = np.array(ring.dual)
    report: list[AxiomViolation] = []

    broken = {i for i in range(size) if ring.dual[ring.dual[i]] != i}
    if ring.dual[0] != 0:
        broken.add(0)
    involution = sorted(broken)
    if involution:
        report.append(AxiomViolation(DUAL, (involution[0],), len(involution)))

    hit = _first(tensor[0] != np.eye(size, dtype=tensor.dtype))
    if hit is not None:
        (j, k), count = hit
        report.append(AxiomViolation(IDENTITY, (0, j, k), count))

    hit = _first(tensor != tensor.transpose(1, 0, 2))
    if hit is not None:
        report.append(AxiomViolation(COMMUTATIVITY, hit[0], hit[1]))

    workers = max(1, min(get_settings().threads, size))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        planes = list(executor.map(lambda i: _associativity_plane(tensor, i), range(size)))
    failures = [plane for plane in planes if plane is not None]
    if failures:
        report.append(AxiomViolation(ASSOCIATIVITY, failures[0][0], sum(count for _, count in failures)))

    # N[i][k][j] = N[i][dual(j)][dual(k)], indexed [i, j, k]
    hit = _first(tensor.transpose(0, 2, 1) != tensor[:, dual, :][:, :, dual])
    if hit is not None:
        report.append(AxiomViolation(TRANSPOSE, hit[0], hit[1]))
    return report


@beartype
def verify_axioms(ring: FusionData) -> list[AxiomViolation]:
    """
    Check the dual involution, identity, commutativity, associativity and transpose axioms.

    Args:
        ring (FusionData): Ring to check.

    Returns:
        list[AxiomViolation]: One entry per failed axiom, empty when the ring is valid.
    """
    report = list(ring.axiom_report)
    if report:
        logger.info('Fusion ring {} fails {}', list(ring.labels), [str(v) for v in report])
    else:
        logger.debug('Fusion ring {} satisfies every axiom', list(ring.labels))
    return report


def require_verified(ring: FusionData) -> None:
    if ring.axiom_report:
        raise AxiomViolationError(
            f'Fusion ring {list(ring.labels)} fails {[str(v) for v in ring.axiom_report]}', ring.axiom_report
        )


@beartype
def label_index(ring: FusionData, label: Label) -> int:
    """
    Resolve a label name or index.

    >>> from fusionblocks.core.catalog import ising
    >>> label_index(ising(), 'sigma')
    2
    """
    if isinstance(label, int):
        if 0 <= label < ring.size:
            return label
        raise LabelError(label, ring.labels)
    if label in ring.labels:
        return ring.labels.index(label)
    raise LabelError(label, ring.labels)


@beartype
def multiply(ring: FusionData, i: Label, j: Label) -> Counter[int]:
    """``W^i . W^j`` as a multiset of label indices."""
    a, b = label_index(ring, i), label_index(ring, j)
    return Counter({k: n for k, n in enumerate(ring.tensor[a][b]) if n})


@beartype
def fusion_matrix(ring: FusionData, i: Label) -> IntMatrix:
    """``(N_i)_j^k = N_{i,j}^k``."""
    return np.array(ring.array[label_index(ring, i)], dtype=object)


def identity_matrix(size: int) -> IntMatrix:
    matrix = np.zeros((size, size), dtype=object)
    for i in range(size):
        matrix[i, i] = 1
    return matrix


@beartype
def fusion_product_matrix(ring: FusionData, labels: Sequence[Label]) -> IntMatrix:
    """``N_{i_1} ... N_{i_n}``; the identity for no labels."""
    product = identity_matrix(ring.size)
    for label in labels:
        product = product @ fusion_matrix(ring, label)
    return product


def matrix_power(matrix: IntMatrix, exponent: int) -> IntMatrix:
    """Exact power of a square object matrix by repeated squaring."""
    if exponent < 0:
        raise StructuralError(f'Matrix exponent must be nonnegative, got {exponent}')
    result = identity_matrix(matrix.shape[0])
    base = matrix
    while exponent:
        if exponent & 1:
            result = result @ base
        base = base @ base
        exponent >>= 1
    return result


@icontract.require(
    lambda ring: not ring.axiom_report,
    error=lambda ring: AxiomViolationError(
        f'average_matrix needs a valid ring, {list(ring.labels)} fails axioms', ring.axiom_report
    ),
)
@beartype
def average_matrix(ring: FusionData) -> IntMatrix:
    """
    ``W = sum_i N_i N_{i^dagger}``, cross-checked against ``sum_l Tr(N_{l^dagger}) N_l``.

    Raises:
        AxiomViolationError: The ring fails an axiom.
        FormulaMismatchError: The two expressions differ.
    """
    size = ring.size
    average = np.zeros((size, size), dtype=object)
    traced = np.zeros((size, size), dtype=object)
    for i in range(size):
        average = average + fusion_matrix(ring, i) @ fusion_matrix(ring, ring.dual[i])
        traced = traced + np.trace(fusion_matrix(ring, ring.dual[i])) * fusion_matrix(ring, i)
    if not np.array_equal(average, traced):
        raise FormulaMismatchError(f'Average matrix forms disagree:\n{average}\nversus\n{traced}')
    return average


@beartype
def find_isomorphism(a: FusionData, b: FusionData) -> Optional[tuple[int, ...]]:
    """
    A relabeling ``perm`` fixing the vacuum with ``N^b[perm i][perm j][perm k] = N^a[i][j][k]``
    and ``dual_b(perm i) = perm dual_a(i)``, or ``None``.
    """
    if a.size != b.size:
        return None
    size = a.size

    def signature(ring: FusionData, i: int) -> tuple[Any, ...]:
        matrix = ring.array[i]
        return int(np.trace(matrix)), int(matrix.sum()), ring.dual[i] == i

    candidates = [[t for t in range(1, size) if signature(b, t) == signature(a, s)] for s in range(size)]
    candidates[0] = [0]
    perm: list[int] = []
    used: set[int] = set()

    def consistent(index: int) -> bool:
        image = perm[index]
        for x in range(index + 1):
            for y in range(index + 1):
                for z in range(index + 1):
                    if index not in (x, y, z):
                        continue
                    if a.tensor[x][y][z] != b.tensor[perm[x]][perm[y]][perm[z]]:
                        return False
        dual = a.dual[index]
        if dual <= index and b.dual[image] != perm[dual]:
            return False
        return True

    def extend(index: int) -> bool:
        if index == size:
            return True
        for image in candidates[index]:
            if image in used:
                continue
            perm.append(image)
            used.add(image)
            if consistent(index) and extend(index + 1):
                return True
            perm.pop()
            used.discard(image)
        return False

    return tuple(perm) if extend(0) else None


def load_ring(path: Union[str, Path]) -> FusionData:
    """Read the fusion-data JSON format."""
    document = read_model(path, FusionFile)
    return FusionData.build(document.labels, document.dual, document.tensor)


def dump_ring(ring: FusionData, path: Union[str, Path]) -> None:
    write_model(path, ring_document(ring))


def ring_document(ring: FusionData) -> FusionFile:
    return FusionFile(
        labels=list(ring.labels),
        dual=list(ring.dual),
        tensor=[[list(line) for line in plane] for plane in ring.tensor],
    )
