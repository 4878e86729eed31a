from __future__ import annotations

import tempfile
import unittest
from pathlib import Path

from fusionblocks.core.dual_graph import (
    DualGraph,
    Leg,
    arithmetic_genus,
    dump_graph,
    enumerate_stable_graphs,
    graph_from_data,
    is_connected,
    is_stable,
    isomorphic,
    load_graph,
    smooth_edge,
    validate,
)
from fusionblocks.exceptions import (
    DisconnectedGraphError,
    EnumerationBoundError,
    FormatError,
    StructuralError,
    UnstableCurveError,
)

THETA = DualGraph((0, 0), ((0, 1), (0, 1), (0, 1)))
DUMBBELL = DualGraph((0, 0), ((0, 0), (1, 1), (0, 1)))


class TestDualGraph(unittest.TestCase):
    def test_edges_are_normalized(self):
        self.assertEqual(DualGraph((0, 0), ((1, 0),)).edges, ((0, 1),))

    def test_valence_counts_loops_twice(self):
        graph = DualGraph((0, 0), ((0, 0), (0, 1)), (Leg(1, 'a'), Leg(1, 'b')))
        self.assertEqual(graph.valence(0), 3)
        self.assertEqual(graph.valence(1), 3)

    def test_arithmetic_genus(self):
        self.assertEqual(arithmetic_genus(THETA), 2)
        self.assertEqual(arithmetic_genus(DUMBBELL), 2)
        self.assertEqual(arithmetic_genus(DualGraph.single(3)), 3)

    def test_stability(self):
        self.assertTrue(is_stable(THETA))
        self.assertFalse(is_stable(DualGraph((0,), ((0, 0),))))
        self.assertFalse(is_stable(DualGraph.single(1)))
        self.assertTrue(is_stable(DualGraph.single(1, ['x'])))
        with self.assertRaises(UnstableCurveError):
            validate(DualGraph.single(0, ['a', 'b']))

    def test_disconnected(self):
        graph = DualGraph((2, 2))
        self.assertFalse(is_connected(graph))
        with self.assertRaises(DisconnectedGraphError):
            validate(graph)

    def test_bad_structure(self):
        with self.assertRaises(StructuralError):
            DualGraph(())
        with self.assertRaises(StructuralError):
            DualGraph((0,), ((0, 1),))
        with self.assertRaises(StructuralError):
            DualGraph((-1,))
        with self.assertRaises(StructuralError):
            THETA.with_labels(['a'])


class TestSmoothing(unittest.TestCase):
    def test_contracting_a_theta_edge_leaves_two_loops(self):
        smoothed = smooth_edge(THETA, 0)
        self.assertEqual(smoothed.genera, (0,))
        self.assertEqual(smoothed.edges, ((0, 0), (0, 0)))
        self.assertEqual(arithmetic_genus(smoothed), 2)

    def test_smoothing_a_loop_raises_the_genus(self):
        smoothed = smooth_edge(DUMBBELL, 0)
        self.assertEqual(smoothed.genera, (1, 0))
        self.assertEqual(arithmetic_genus(smoothed), 2)

    def test_legs_follow_the_merged_vertex(self):
        graph = DualGraph((0, 0, 0), ((0, 1), (1, 2), (0, 2)), (Leg(2, 'x'),))
        smoothed = smooth_edge(graph, 1)
        self.assertEqual(smoothed.vertex_count, 2)
        self.assertEqual(smoothed.legs, (Leg(1, 'x'),))
        self.assertEqual(arithmetic_genus(smoothed), 1)

    def test_out_of_range(self):
        with self.assertRaises(StructuralError):
            smooth_edge(THETA, 3)


class TestEnumeration(unittest.TestCase):
    def test_counts(self):
        for (genus, legs), count in {(0, 3): 1, (0, 4): 3, (1, 1): 1, (1, 2): 2, (2, 0): 2}.items():
            with self.subTest(genus=genus, legs=legs):
                self.assertEqual(len(enumerate_stable_graphs(genus, legs)), count)

    def test_graphs_are_trivalent_stable_and_of_the_right_genus(self):
        for genus, legs in [(0, 4), (1, 2), (2, 1), (3, 0)]:
            for graph in enumerate_stable_graphs(genus, legs):
                with self.subTest(genus=genus, legs=legs, graph=graph):
                    self.assertTrue(is_stable(graph))
                    self.assertEqual(arithmetic_genus(graph), genus)
                    self.assertEqual(len(graph.legs), legs)
                    self.assertEqual(set(graph.genera), {0})
                    self.assertTrue(all(graph.valence(v) == 3 for v in range(graph.vertex_count)))

    def test_every_stable_graph_when_not_only_trivalent(self):
        for (genus, legs), count in {(0, 4): 4, (1, 1): 2, (1, 2): 5, (2, 0): 7}.items():
            graphs = enumerate_stable_graphs(genus, legs, trivalent=False)
            with self.subTest(genus=genus, legs=legs):
                self.assertEqual(len(graphs), count)
                for graph in graphs:
                    self.assertTrue(is_stable(graph))
                    self.assertTrue(is_connected(graph))
                    self.assertEqual(arithmetic_genus(graph), genus)
                    self.assertEqual(len(graph.legs), legs)
                trivalent = enumerate_stable_graphs(genus, legs)
                self.assertTrue(all(any(isomorphic(t, g) for g in graphs) for t in trivalent))

    def test_genus_two_graphs_are_theta_and_dumbbell(self):
        graphs = enumerate_stable_graphs(2, 0)
        self.assertTrue(any(isomorphic(g, THETA) for g in graphs))
        self.assertTrue(any(isomorphic(g, DUMBBELL) for g in graphs))

    def test_no_two_graphs_are_isomorphic(self):
        graphs = enumerate_stable_graphs(1, 3)
        for i, first in enumerate(graphs):
            for second in graphs[i + 1 :]:
                self.assertFalse(isomorphic(first, second))

    def test_bounds(self):
        with self.assertRaises(UnstableCurveError):
            enumerate_stable_graphs(1, 0)
        with self.assertRaises(UnstableCurveError):
            enumerate_stable_graphs(0, 2)
        with self.assertRaises(EnumerationBoundError):
            enumerate_stable_graphs(4, 0)
        with self.assertRaises(EnumerationBoundError):
            enumerate_stable_graphs(0, 6)
        with self.assertRaises(StructuralError):
            enumerate_stable_graphs(-1, 4)


class TestGraphFiles(unittest.TestCase):
    def test_dump_and_load(self):
        graph = DualGraph((0, 1), ((0, 1), (0, 0)), (Leg(0, 'sigma'),))
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / 'graph.json'
            dump_graph(graph, path)
            self.assertEqual(load_graph(path), graph)

    def test_from_data(self):
        data = {'vertices': [{'genus': 0}, {'genus': 0}], 'edges': [[0, 1], [0, 1], [0, 1]], 'legs': []}
        self.assertEqual(graph_from_data(data), THETA)

    def test_negative_genus_in_file(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / 'graph.json'
            path.write_text('{"vertices": [{"genus": -1}], "edges": []}')
            with self.assertRaises(FormatError) as raised:
                load_graph(path)
            self.assertIn('vertices.0.genus', str(raised.exception))
