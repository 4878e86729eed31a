"""
Dual graphs of stable pointed curves.

A vertex is a component with its geometric genus, an edge is a node (a self-loop when both
branches lie on the same component) and a leg is a marked point carrying a fusion label.
"""
from __future__ import annotations

from dataclasses import (
    dataclass,
    field,
)
from pathlib import Path
from typing import (
    Any,
    Iterable,
    Sequence,
    Union,
)

import networkx as nx
from beartype import beartype
from loguru import logger

from fusionblocks.exceptions import (
    DisconnectedGraphError,
    EnumerationBoundError,
    StructuralError,
    UnstableCurveError,
)
from fusionblocks.formats import (
    GraphFile,
    LegRecord,
    VertexRecord,
    read_model,
    write_model,
)

Label = Union[int, str]


@dataclass(frozen=True)
class Leg:
    vertex: int
    label: Label


@dataclass(frozen=True)
class DualGraph:
    """
    Combinatorial type of a stable pointed curve.

    Attributes:
        genera (tuple[int, ...]): Geometric genus of each component.
        edges (tuple[tuple[int, int], ...]): Nodes as vertex pairs, stored with the smaller index first.
        legs (tuple[Leg, ...]): Marked points in order.
    """

    genera: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = field(default=())
    legs: tuple[Leg, ...] = field(default=())

    def __post_init__(self) -> None:
        genera = tuple(int(g) for g in self.genera)
        if not genera:
            raise StructuralError('A dual graph needs at least one vertex')
        if any(g < 0 for g in genera):
            raise StructuralError(f'Vertex genera must be nonnegative, got {list(genera)}')
        edges = tuple(tuple(sorted((int(x), int(y)))) for x, y in self.edges)
        legs = tuple(leg if isinstance(leg, Leg) else Leg(*leg) for leg in self.legs)
        for x, y in edges:
            if not (0 <= x < len(genera) and 0 <= y < len(genera)):
                raise StructuralError(f'Edge ({x}, {y}) refers to a missing vertex')
        for leg in legs:
            if not 0 <= leg.vertex < len(genera):
                raise StructuralError(f'Leg {leg} refers to a missing vertex')
        object.__setattr__(self, 'genera', genera)
        object.__setattr__(self, 'edges', edges)
        object.__setattr__(self, 'legs', legs)

    @classmethod
    def single(cls, genus: int, labels: Sequence[Label] = ()) -> 'DualGraph':
        """A smooth curve: one vertex, no edges."""
        return cls((genus,), (), tuple(Leg(0, label) for label in labels))

    @property
    def vertex_count(self) -> int:
        return len(self.genera)

    def valence(self, vertex: int) -> int:
        """Half-edges plus legs at ``vertex``; a self-loop counts twice."""
        half_edges = sum((x == vertex) + (y == vertex) for x, y in self.edges)
        return half_edges + sum(leg.vertex == vertex for leg in self.legs)

    def leg_labels(self, vertex: int) -> list[Label]:
        return [leg.label for leg in self.legs if leg.vertex == vertex]

    def with_labels(self, labels: Sequence[Label]) -> 'DualGraph':
        """The same graph with leg labels replaced in order."""
        if len(labels) != len(self.legs):
            raise StructuralError(f'Graph has {len(self.legs)} legs but {len(labels)} labels were given')
        return DualGraph(self.genera, self.edges, tuple(Leg(leg.vertex, lab) for leg, lab in zip(self.legs, labels)))

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        for vertex, genus in enumerate(self.genera):
            graph.add_node(vertex, genus=genus, legs=tuple(sorted(map(str, self.leg_labels(vertex)))))
        graph.add_edges_from(self.edges)
        return graph

    def to_document(self) -> GraphFile:
        return GraphFile(
            vertices=[VertexRecord(genus=g) for g in self.genera],
            edges=list(self.edges),
            legs=[LegRecord(vertex=leg.vertex, label=str(leg.label)) for leg in self.legs],
        )


@beartype
def arithmetic_genus(graph: DualGraph) -> int:
    """
    ``sum g_v + #edges - #vertices + 1``.

    >>> arithmetic_genus(DualGraph((0, 0), ((0, 1), (0, 1), (0, 1))))
    2
    """
    return sum(graph.genera) + len(graph.edges) - graph.vertex_count + 1


def unstable_vertices(graph: DualGraph) -> list[int]:
    return [v for v, g in enumerate(graph.genera) if 2 * g - 2 + graph.valence(v) <= 0]


@beartype
def is_connected(graph: DualGraph) -> bool:
    return bool(nx.is_connected(graph.to_networkx()))


@beartype
def is_stable(graph: DualGraph) -> bool:
    """Connected with every vertex satisfying ``2 g_v - 2 + valence > 0``."""
    return is_connected(graph) and not unstable_vertices(graph)


def validate(graph: DualGraph) -> None:
    """Raise the matching error unless ``graph`` is connected and stable."""
    if not is_connected(graph):
        raise DisconnectedGraphError(f'Dual graph with edges {list(graph.edges)} is not connected')
    bad = unstable_vertices(graph)
    if bad:
        raise UnstableCurveError(f'Vertices {bad} fail 2g - 2 + valence > 0')


@beartype
def smooth_edge(graph: DualGraph, edge_index: int) -> DualGraph:
    """
    Smooth one node.

    A self-loop disappears and raises its vertex genus by one; any other edge is contracted,
    merging its endpoints, adding their genera and turning parallel edges into self-loops.
    The arithmetic genus and the legs are preserved.
    """
    if not 0 <= edge_index < len(graph.edges):
        raise StructuralError(f'Edge index {edge_index} out of range for {len(graph.edges)} edges')
    x, y = graph.edges[edge_index]
    rest = [edge for index, edge in enumerate(graph.edges) if index != edge_index]
    if x == y:
        genera = list(graph.genera)
        genera[x] += 1
        return DualGraph(tuple(genera), tuple(rest), graph.legs)

    def relabel(v: int) -> int:
        v = x if v == y else v
        return v - 1 if v > y else v

    genera = [g for v, g in enumerate(graph.genera) if v != y]
    genera[relabel(x)] = graph.genera[x] + graph.genera[y]
    edges = tuple((relabel(a), relabel(b)) for a, b in rest)
    legs = tuple(Leg(relabel(leg.vertex), leg.label) for leg in graph.legs)
    return DualGraph(tuple(genera), edges, legs)


def _graph_from_document(document: GraphFile) -> DualGraph:
    return DualGraph(
        tuple(vertex.genus for vertex in document.vertices),
        tuple(document.edges),
        tuple(Leg(leg.vertex, leg.label) for leg in document.legs),
    )


def load_graph(path: Union[str, Path]) -> DualGraph:
    """Read the dual-graph JSON format; structure is checked, stability is left to the caller."""
    return _graph_from_document(read_model(path, GraphFile))


def dump_graph(graph: DualGraph, path: Union[str, Path]) -> None:
    write_model(path, graph.to_document())


def graph_from_data(data: dict[str, Any]) -> DualGraph:
    return _graph_from_document(GraphFile.model_validate(data))


def isomorphic(a: DualGraph, b: DualGraph) -> bool:
    """Isomorphism of multigraphs matching genus and the multiset of leg labels per vertex."""
    return bool(
        nx.is_isomorphic(
            a.to_networkx(),
            b.to_networkx(),
            node_match=lambda p, q: p['genus'] == q['genus'] and p['legs'] == q['legs'],
        )
    )


def deduplicate(graphs: Iterable[DualGraph]) -> list[DualGraph]:
    """Keep one representative per isomorphism class, in first-seen order."""
    buckets: dict[tuple[Any, ...], list[DualGraph]] = {}
    kept: list[DualGraph] = []
    for graph in graphs:
        key = _invariant(graph)
        bucket = buckets.setdefault(key, [])
        if any(isomorphic(graph, other) for other in bucket):
            continue
        bucket.append(graph)
        kept.append(graph)
    return kept


def _invariant(graph: DualGraph) -> tuple[Any, ...]:
    loops = [0] * graph.vertex_count
    for x, y in graph.edges:
        if x == y:
            loops[x] += 1
    profile = sorted(
        (graph.genera[v], graph.valence(v), loops[v], tuple(sorted(map(str, graph.leg_labels(v)))))
        for v in range(graph.vertex_count)
    )
    return len(graph.edges), tuple(profile)


MAX_ENUMERATION_GENUS = 3
MAX_ENUMERATION_LEGS = 4


def _closed_trivalent(genus: int) -> list[DualGraph]:
    # pair the 3 half-edges of each of 2g - 2 vertices in every way
    vertices = 2 * genus - 2
    stubs = [v for v in range(vertices) for _ in range(3)]
    found: set[tuple[tuple[int, int], ...]] = set()

    def pair(free: list[int], edges: list[tuple[int, int]]) -> None:
        if not free:
            found.add(tuple(sorted(edges)))
            return
        first, rest = free[0], free[1:]
        tried: set[int] = set()
        for position, partner in enumerate(rest):
            if partner in tried:
                continue
            tried.add(partner)
            pair(rest[:position] + rest[position + 1 :], edges + [(first, partner)])

    pair(stubs, [])
    graphs = [DualGraph((0,) * vertices, edges) for edges in sorted(found)]
    return deduplicate(graph for graph in graphs if is_connected(graph))


def _attach_leg(graph: DualGraph, leg: int) -> list[DualGraph]:
    # every way of putting leg `leg` on a new trivalent vertex
    new = graph.vertex_count
    genera = (*graph.genera, 0)
    grown = []
    for index, (x, y) in enumerate(graph.edges):
        edges = (*graph.edges[:index], *graph.edges[index + 1 :], (x, new), (y, new))
        grown.append(DualGraph(genera, edges, (*graph.legs, Leg(new, leg))))
    for index, old in enumerate(graph.legs):
        legs = list(graph.legs)
        legs[index] = Leg(new, old.label)
        grown.append(DualGraph(genera, (*graph.edges, (old.vertex, new)), (*legs, Leg(new, leg))))
    return grown


@beartype
def enumerate_stable_graphs(genus: int, legs: int, trivalent: bool = True) -> list[DualGraph]:
    """
    Maximally degenerate stable graphs: connected, every vertex genus 0 and trivalent.

    Legs are labeled ``0..legs-1``; relabel with ``DualGraph.with_labels``. Graphs are returned up
    to isomorphism fixing the legs. With ``trivalent`` off every connected stable graph of the type
    is returned, reached by smoothing nodes of the maximal degenerations.

    >>> [len(g.edges) for g in enumerate_stable_graphs(2, 0)]
    [3, 3]
    >>> len(enumerate_stable_graphs(0, 4))
    3
    >>> len(enumerate_stable_graphs(2, 0, trivalent=False))
    7

    Raises:
        UnstableCurveError: ``2 genus - 2 + legs <= 0``.
        EnumerationBoundError: ``genus > 3`` or ``legs > 4``.
    """
    if genus < 0 or legs < 0:
        raise StructuralError(f'Genus and leg count must be nonnegative, got ({genus}, {legs})')
    if 2 * genus - 2 + legs <= 0:
        raise UnstableCurveError(f'(g, n) = ({genus}, {legs}) is not stable')
    if genus > MAX_ENUMERATION_GENUS or legs > MAX_ENUMERATION_LEGS:
        raise EnumerationBoundError(
            f'Graph enumeration is capped at genus {MAX_ENUMERATION_GENUS} and {MAX_ENUMERATION_LEGS} legs, '
            f'got ({genus}, {legs})'
        )
    if genus == 0:
        graphs, start = [DualGraph.single(0, (0, 1, 2))], 3
    elif genus == 1:
        graphs, start = [DualGraph((0,), ((0, 0),), (Leg(0, 0),))], 1
    else:
        graphs, start = _closed_trivalent(genus), 0
    for leg in range(start, legs):
        graphs = deduplicate(grown for graph in graphs for grown in _attach_leg(graph, leg))
    if not trivalent:
        graphs = _all_smoothings(graphs)
    logger.debug('{} stable graphs of genus {} with {} legs, trivalent only: {}', len(graphs), genus, legs, trivalent)
    return graphs


def _all_smoothings(graphs: list[DualGraph]) -> list[DualGraph]:
    found = list(graphs)
    frontier = graphs
    while frontier:
        frontier = [
            smoothed
            for graph in frontier
            for smoothed in deduplicate(smooth_edge(graph, index) for index in range(len(graph.edges)))
        ]
        kept = deduplicate([*found, *frontier])
        frontier = kept[len(found) :]
        found = kept
    return found
