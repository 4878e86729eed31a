from __future__ import annotations

import tempfile
import unittest
from pathlib import Path

import numpy as np

from fusionblocks.core import catalog
from fusionblocks.core.fusion_ring import (
    COMMUTATIVITY,
    IDENTITY,
    FusionData,
    average_matrix,
    dump_ring,
    find_isomorphism,
    fusion_matrix,
    fusion_product_matrix,
    label_index,
    load_ring,
    matrix_power,
    multiply,
    require_verified,
    verify_axioms,
)
from fusionblocks.exceptions import (
    AxiomViolationError,
    FormatError,
    LabelError,
    StructuralError,
)


def cyclic_ring(n: int) -> FusionData:
    """Group ring of Z/n: ``i . j = i + j`` with ``dual(i) = -i``."""
    tensor = [[[int((i + j - k) % n == 0) for k in range(n)] for j in range(n)] for i in range(n)]
    return FusionData.build([str(i) for i in range(n)], [(-i) % n for i in range(n)], tensor)


def broken_lee_yang() -> FusionData:
    return FusionData.build(['1', 'tau'], [0, 1], [[[1, 0], [0, 0]], [[0, 1], [1, 1]]])


class TestFusionData(unittest.TestCase):
    def test_catalog_rings_satisfy_every_axiom(self):
        for name in ['trivial', 'ising', 'lee_yang', 'su2_1', 'su2_2', 'su2_3', 'su2_5', 'ising*lee_yang']:
            with self.subTest(name=name):
                self.assertEqual(verify_axioms(catalog.by_name(name)), [])

    def test_cyclic_ring_satisfies_every_axiom(self):
        self.assertEqual(verify_axioms(cyclic_ring(3)), [])
        self.assertEqual(verify_axioms(cyclic_ring(4)), [])

    def test_broken_identity_is_reported_with_a_witness(self):
        report = verify_axioms(broken_lee_yang())
        axioms = [violation.axiom for violation in report]
        self.assertIn(IDENTITY, axioms)
        self.assertIn(COMMUTATIVITY, axioms)
        identity = report[axioms.index(IDENTITY)]
        self.assertEqual(identity.witness, (0, 1, 1))

    def test_require_verified_raises_with_the_report(self):
        with self.assertRaises(AxiomViolationError) as raised:
            require_verified(broken_lee_yang())
        self.assertTrue(raised.exception.report)

    def test_average_matrix_refuses_a_broken_ring(self):
        with self.assertRaises(AxiomViolationError):
            average_matrix(broken_lee_yang())

    def test_structural_errors(self):
        with self.assertRaises(StructuralError):
            FusionData.build(['1', '1'], [0, 1], [[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
        with self.assertRaises(StructuralError):
            FusionData.build(['1', 'x'], [0, 0], [[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
        with self.assertRaises(StructuralError):
            FusionData.build(['1', 'x'], [0, 1], [[[1, 0], [0, 1]]])
        with self.assertRaises(StructuralError):
            FusionData.build(['1', 'x'], [0, 1], [[[1, 0], [0, 1]], [[0, 1], [1, -1]]])


class TestFusionMatrices(unittest.TestCase):
    def setUp(self) -> None:
        self.ising = catalog.ising()

    def test_label_index_by_name_and_index(self):
        self.assertEqual(label_index(self.ising, 'eps'), 1)
        self.assertEqual(label_index(self.ising, 2), 2)
        with self.assertRaises(LabelError):
            label_index(self.ising, 'psi')
        with self.assertRaises(LabelError):
            label_index(self.ising, 3)

    def test_sigma_fusion_matrix(self):
        expected = np.array([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
        self.assertTrue(np.array_equal(fusion_matrix(self.ising, 'sigma'), expected))

    def test_multiply(self):
        self.assertEqual(dict(multiply(self.ising, 'sigma', 'sigma')), {0: 1, 1: 1})
        self.assertEqual(dict(multiply(self.ising, 'eps', 'sigma')), {2: 1})

    def test_average_matrix(self):
        expected = np.array([[3, 1, 0], [1, 3, 0], [0, 0, 4]])
        self.assertTrue(np.array_equal(average_matrix(self.ising), expected))
        self.assertTrue(np.array_equal(average_matrix(cyclic_ring(3)), 3 * np.eye(3, dtype=int)))

    def test_product_matrix_of_no_labels_is_the_identity(self):
        self.assertTrue(np.array_equal(fusion_product_matrix(self.ising, []), np.eye(3, dtype=int)))

    def test_product_matrix_is_order_independent(self):
        first = fusion_product_matrix(self.ising, ['sigma', 'eps', 'sigma'])
        second = fusion_product_matrix(self.ising, ['eps', 'sigma', 'sigma'])
        self.assertTrue(np.array_equal(first, second))

    def test_matrix_power_is_exact(self):
        # entries of W^40 for su2_5 overflow int64
        average = average_matrix(catalog.su2_level(5))
        power = matrix_power(average, 40)
        self.assertGreater(power[0, 0], 2**63)
        self.assertEqual(power[0, 0], (matrix_power(average, 20) @ matrix_power(average, 20))[0, 0])
        with self.assertRaises(StructuralError):
            matrix_power(average, -1)


class TestIsomorphism(unittest.TestCase):
    def test_su2_level_two_is_ising(self):
        perm = find_isomorphism(catalog.ising(), catalog.su2_level(2))
        self.assertEqual(perm, (0, 2, 1))

    def test_different_rings_are_not_isomorphic(self):
        self.assertIsNone(find_isomorphism(catalog.ising(), cyclic_ring(3)))
        self.assertIsNone(find_isomorphism(catalog.lee_yang(), catalog.su2_level(1)))
        self.assertIsNone(find_isomorphism(catalog.ising(), catalog.lee_yang()))

    def test_relabeled_ring_is_isomorphic(self):
        z3 = cyclic_ring(3)
        order = [0, 2, 1]
        tensor = np.array(z3.tensor)[order][:, order][:, :, order]
        swapped = FusionData.build(['0', 'b', 'a'], z3.dual, tensor)
        self.assertIsNotNone(find_isomorphism(z3, swapped))


class TestRingFiles(unittest.TestCase):
    def test_dump_and_load(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / 'ising.json'
            dump_ring(catalog.ising(), path)
            self.assertEqual(load_ring(path), catalog.ising())

    def test_bad_file_names_the_field(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / 'bad.json'
            path.write_text('{"labels": ["1"], "dual": [0], "tensor": [[[-1]]]}')
            with self.assertRaises(FormatError) as raised:
                load_ring(path)
            self.assertIn('tensor', str(raised.exception))
            path.write_text('{"labels": ["1"], ')
            with self.assertRaises(FormatError):
                load_ring(path)
        with self.assertRaises(FormatError):
            load_ring('/nonexistent/ring.json')


def every_ring() -> list[tuple[str, FusionData]]:
    small = ['trivial', 'ising', 'lee_yang', 'su2_2', 'su2_3']
    products = [f'{a}*{b}' for index, a in enumerate(small) for b in small[index:]]
    return [(name, catalog.by_name(name)) for name in [*catalog.names(), *products]]


class TestRingIdentities(unittest.TestCase):
    def setUp(self) -> None:
        self.rings = every_ring()

    def test_names_cover_higher_levels(self):
        names = [name for name, _ in self.rings]
        self.assertIn('su2_4', names)
        self.assertIn('su2_6', names)
        self.assertIn('ising*lee_yang', names)

    def test_every_ring_satisfies_every_axiom(self):
        for name, ring in self.rings:
            with self.subTest(ring=name):
                self.assertEqual(verify_axioms(ring), [])

    def test_fusion_matrices_commute(self):
        for name, ring in self.rings:
            matrices = [fusion_matrix(ring, i) for i in range(ring.size)]
            for i, first in enumerate(matrices):
                for j, second in enumerate(matrices[i + 1 :], start=i + 1):
                    with self.subTest(ring=name, i=i, j=j):
                        self.assertTrue(np.array_equal(first @ second, second @ first))

    def test_dual_matrix_is_the_transpose(self):
        for name, ring in self.rings:
            for i in range(ring.size):
                with self.subTest(ring=name, label=i):
                    self.assertTrue(np.array_equal(fusion_matrix(ring, ring.dual[i]), fusion_matrix(ring, i).T))

    def test_average_matrix_commutes_with_every_fusion_matrix(self):
        for name, ring in self.rings:
            average = average_matrix(ring)
            for i in range(ring.size):
                with self.subTest(ring=name, label=i):
                    matrix = fusion_matrix(ring, i)
                    self.assertTrue(np.array_equal(average @ matrix, matrix @ average))

    def test_average_matrix_is_a_trace_weighted_sum(self):
        for name, ring in self.rings:
            with self.subTest(ring=name):
                traced = np.zeros((ring.size, ring.size), dtype=object)
                for i in range(ring.size):
                    traced = traced + int(np.trace(fusion_matrix(ring, ring.dual[i]))) * fusion_matrix(ring, i)
                self.assertTrue(np.array_equal(average_matrix(ring), traced))
