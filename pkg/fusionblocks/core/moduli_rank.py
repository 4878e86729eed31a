"""
Ranks of conformal-block bundles on stable pointed curves.

The closed form ``(N_{i_1} ... N_{i_n} W^g)_{00}`` is checked against the factorization sum over
edge labelings of a dual graph.
"""
from __future__ import annotations

import itertools
from dataclasses import (
    dataclass,
    field,
)
from functools import lru_cache
from typing import (
    Any,
    Optional,
    Sequence,
)

import dask
import icontract
import numpy as np
from beartype import beartype
from dask import delayed
from loguru import logger

from fusionblocks._config import get_settings
from fusionblocks.core.dual_graph import (
    DualGraph,
    enumerate_stable_graphs,
    validate,
)
from fusionblocks.core.fusion_ring import (
    FusionData,
    Label,
    average_matrix,
    fusion_product_matrix,
    label_index,
    matrix_power,
    require_verified,
)
from fusionblocks.exceptions import (
    FormulaMismatchError,
    StructuralError,
    UnstableCurveError,
)


@dataclass(frozen=True)
class RankQuery:
    genus: int
    legs: tuple[Label, ...] = ()

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise StructuralError(f'Genus must be nonnegative, got {self.genus}')
        object.__setattr__(self, 'legs', tuple(self.legs))

    @property
    def stable(self) -> bool:
        return 2 * self.genus - 2 + len(self.legs) > 0


@beartype
def three_point_rank(ring: FusionData, i: Label, j: Label, k: Label) -> int:
    """
    ``N[i][j][dual(k)]``, the rank with three incoming legs on the sphere.

    >>> from fusionblocks.core.catalog import ising
    >>> three_point_rank(ising(), 'sigma', 'sigma', 'eps'), three_point_rank(ising(), 'sigma', 'sigma', 'sigma')
    (1, 0)
    """
    a, b, c = (label_index(ring, x) for x in (i, j, k))
    return ring.tensor[a][b][ring.dual[c]]


@beartype
def insert_vacuum(query: RankQuery) -> RankQuery:
    """Append a vacuum leg; the rank does not change."""
    return RankQuery(query.genus, (*query.legs, 0))


def _stabilize(query: RankQuery, fallback: bool) -> RankQuery:
    if query.stable:
        return query
    if not fallback:
        raise UnstableCurveError(f'(g, n) = ({query.genus}, {len(query.legs)}) is not stable')
    while not query.stable:
        query = insert_vacuum(query)
    logger.debug('Padded rank query with vacuum legs to {}', query)
    return query


@icontract.ensure(lambda result: result >= 0)
@beartype
def rank_closed_form(ring: FusionData, query: RankQuery, vacuum_fallback: bool = True) -> int:
    """
    ``(N_{i_1} ... N_{i_n} W^g)_{00}``.

    For ``g >= 1`` the trace form ``Tr(N_{i_1} ... N_{i_n} W^(g-1))`` is computed too and must agree.
    Unstable queries are padded with vacuum legs unless ``vacuum_fallback`` is off.

    Args:
        ring (FusionData): A ring passing every axiom.
        query (RankQuery): Genus and leg labels.
        vacuum_fallback (bool): Pad unstable queries with vacuum legs.

    Returns:
        int: The rank.

    Raises:
        AxiomViolationError: The ring fails an axiom.
        UnstableCurveError: The query is unstable and the fallback is off.
        FormulaMismatchError: The two forms disagree.

    Examples:
        >>> from fusionblocks.core.catalog import ising
        >>> rank_closed_form(ising(), RankQuery(2))
        10
        >>> rank_closed_form(ising(), RankQuery(1, ('1',)))
        3
    """
    require_verified(ring)
    query = _stabilize(query, vacuum_fallback)
    legs = fusion_product_matrix(ring, list(query.legs))
    average = average_matrix(ring)
    rank = int((legs @ matrix_power(average, query.genus))[0, 0])
    if query.genus >= 1:
        traced = int(np.trace(legs @ matrix_power(average, query.genus - 1)))
        if traced != rank:
            raise FormulaMismatchError(
                f'Rank forms disagree for {query}: (N W^g)_00 = {rank}, Tr(N W^(g-1)) = {traced}'
            )
    return rank


# a factor is a tensor of Python integers with one axis per variable, axes sorted by variable
Factor = tuple[np.ndarray, tuple[int, ...]]


def _merge(factors: Sequence[Factor]) -> Factor:
    axes = tuple(sorted({axis for _, own in factors for axis in own}))
    product = np.ones((1,) * len(axes), dtype=object)
    for tensor, own in factors:
        shape = [tensor.shape[own.index(axis)] if axis in own else 1 for axis in axes]
        product = np.asarray(product * tensor.reshape(shape), dtype=object)
    return product, axes


def _eliminate(factors: list[Factor], variables: Sequence[int]) -> list[Factor]:
    # sum out one variable at a time, always the one whose merged factor is smallest
    remaining = set(variables)
    while remaining:

        def width(variable: int) -> int:
            return len({axis for _, own in factors if variable in own for axis in own})

        variable = min(sorted(remaining), key=width)
        remaining.discard(variable)
        tensor, axes = _merge([f for f in factors if variable in f[1]])
        factors = [f for f in factors if variable not in f[1]]
        position = axes.index(variable)
        factors.append((np.asarray(tensor.sum(axis=position), dtype=object), axes[:position] + axes[position + 1 :]))
    return factors


def _contract(factors: list[Factor], variables: Sequence[int], kept: tuple[int, ...]) -> np.ndarray:
    tensor, axes = _merge(_eliminate(factors, variables))
    return tensor.transpose([axes.index(axis) for axis in kept])


def _fix(factors: list[Factor], variable: int, label: int) -> list[Factor]:
    fixed = []
    for tensor, own in factors:
        if variable in own:
            position = own.index(variable)
            tensor = np.asarray(np.take(tensor, label, axis=position), dtype=object)
            own = own[:position] + own[position + 1 :]
        fixed.append((tensor, own))
    return fixed


def _graph_sum(ring: FusionData, graph: DualGraph, flips: Optional[Sequence[bool]], open_legs: bool) -> np.ndarray:
    require_verified(ring)
    validate(graph)
    flips = [False] * len(graph.edges) if flips is None else list(flips)
    if len(flips) != len(graph.edges):
        raise StructuralError(f'Need one orientation flag per edge, got {len(flips)} for {len(graph.edges)}')
    edges = [(y, x) if flip else (x, y) for (x, y), flip in zip(graph.edges, flips)]

    @lru_cache(maxsize=None)
    def factor(vertex: int, labels: tuple[int, ...]) -> int:
        genus = graph.genera[vertex]
        if genus == 0 and len(labels) == 3:
            return three_point_rank(ring, *labels)
        return rank_closed_form(ring, RankQuery(genus, labels))

    # variables: edge e is e, leg p is len(edges) + p
    factors: list[Factor] = []
    for vertex in range(graph.vertex_count):
        incident = [index for index, edge in enumerate(edges) if vertex in edge]
        slots = [p for p, leg in enumerate(graph.legs) if leg.vertex == vertex] if open_legs else []
        fixed = [] if open_legs else [label_index(ring, label) for label in graph.leg_labels(vertex)]
        axes = (*incident, *(len(edges) + p for p in slots))
        tensor = np.zeros((ring.size,) * len(axes), dtype=object)
        for labels in itertools.product(range(ring.size), repeat=len(axes)):
            seen = [*fixed, *labels[len(incident) :]]
            for index, label in zip(incident, labels):
                x, y = edges[index]
                if x == vertex:
                    seen.append(label)
                if y == vertex:
                    seen.append(ring.dual[label])
            tensor[labels] = factor(vertex, tuple(sorted(seen)))
        factors.append((tensor, axes))

    kept = tuple(len(edges) + p for p in range(len(graph.legs))) if open_legs else ()
    if not edges:
        return _contract(factors, (), kept)
    rest = range(1, len(edges))
    tasks = [delayed(_contract)(_fix(factors, 0, label), rest, kept) for label in range(ring.size)]
    partial = dask.compute(*tasks, scheduler='threads', num_workers=get_settings().threads)
    total = np.asarray(sum(partial[1:], partial[0]), dtype=object)
    logger.debug('Dual graph with {} edges summed in {} parts by the label of its first edge', len(edges), len(partial))
    return total


@beartype
def rank_dual_graph(ring: FusionData, graph: DualGraph, flips: Optional[Sequence[bool]] = None) -> int:
    """
    Factorization sum: over labelings of the edges, the product of the vertex ranks.

    An edge ``(x, y)`` with label ``a`` contributes ``a`` at ``x`` and ``dual(a)`` at ``y``; ``flips``
    reverses chosen edges, which never changes the value. Each vertex becomes a table of its ranks
    indexed by its edge labels and the edge labels are summed out one at a time. The sum is split over
    the label of the first edge with ``dask.delayed`` on the threaded scheduler.

    >>> from fusionblocks.core.catalog import ising
    >>> rank_dual_graph(ising(), DualGraph((0, 0), ((0, 1), (0, 1), (0, 1))))
    10

    Raises:
        DisconnectedGraphError: The graph is not connected.
        UnstableCurveError: A vertex is unstable.
    """
    return int(_graph_sum(ring, graph, flips, open_legs=False)[()])


@beartype
def rank_table(ring: FusionData, graph: DualGraph, flips: Optional[Sequence[bool]] = None) -> np.ndarray:
    """
    ``rank_dual_graph`` for every labeling of the legs at once.

    The entry at ``(l_1, ..., l_n)`` is the rank with label index ``l_p`` on the ``p``-th leg of
    ``graph``; the labels stored on the legs are ignored.

    >>> from fusionblocks.core.catalog import ising
    >>> from fusionblocks.core.dual_graph import Leg
    >>> rank_table(ising(), DualGraph((0,), ((0, 0),), (Leg(0, 0),))).tolist()
    [3, 1, 0]
    """
    return _graph_sum(ring, graph, flips, open_legs=True)


@dataclass
class DecompositionReport:
    """Closed form against every maximal degeneration of ``(genus, legs)``."""

    genus: int
    legs: tuple[Label, ...]
    closed_form: int
    values: list[int] = field(default_factory=list)
    graphs: list[DualGraph] = field(default_factory=list)
    discrepancy: Optional[tuple[DualGraph, int]] = None

    @property
    def consistent(self) -> bool:
        return self.discrepancy is None

    @property
    def common_value(self) -> Optional[int]:
        return self.closed_form if self.consistent else None

    def rows(self) -> list[dict[str, Any]]:
        return [
            {'graph': index, 'vertices': g.vertex_count, 'edges': len(g.edges), 'rank': value}
            for index, (g, value) in enumerate(zip(self.graphs, self.values))
        ]


@beartype
def decomposition_invariance(ring: FusionData, genus: int, legs: Sequence[Label] = ()) -> DecompositionReport:
    """
    Evaluate ``rank_dual_graph`` on every trivalent stable graph of ``(genus, len(legs))``.

    Unstable inputs are padded with vacuum legs first. Enumeration stops at the first graph whose
    value differs from the closed form.

    Raises:
        EnumerationBoundError: ``genus > 3`` or more than 4 legs after padding.
    """
    query = _stabilize(RankQuery(genus, tuple(legs)), fallback=True)
    closed = rank_closed_form(ring, query)
    report = DecompositionReport(query.genus, query.legs, closed)
    for graph in enumerate_stable_graphs(query.genus, len(query.legs)):
        labeled = graph.with_labels(query.legs)
        value = rank_dual_graph(ring, labeled)
        report.graphs.append(labeled)
        report.values.append(value)
        if value != closed:
            report.discrepancy = (labeled, value)
            logger.warning('Degeneration {} gives {} but the closed form gives {}', labeled, value, closed)
            break
    logger.info('{} degenerations of genus {} with legs {} checked', len(report.values), query.genus, query.legs)
    return report

