from __future__ import annotations

import math
import unittest

import numpy as np

from fusionblocks.core import catalog
from fusionblocks.core.fusion_ring import (
    find_isomorphism,
    verify_axioms,
)
from fusionblocks.exceptions import (
    LabelError,
    NonIntegralError,
    NonUnitaryError,
    StructuralError,
)


class TestCatalog(unittest.TestCase):
    def test_su2_level_fusion_rule(self):
        ring = catalog.su2_level(3)
        # 1 x 1 = 0 + 2 and 2 x 2 = 0 + 2 at level 3
        self.assertEqual(ring.tensor[1][1], (1, 0, 1, 0))
        self.assertEqual(ring.tensor[2][2], (1, 0, 1, 0))
        self.assertEqual(ring.tensor[3][3], (1, 0, 0, 0))

    def test_level_zero_is_trivial(self):
        self.assertEqual(catalog.su2_level(0).tensor, catalog.trivial().tensor)

    def test_negative_level(self):
        with self.assertRaises(StructuralError):
            catalog.su2_level(-1)

    def test_by_name(self):
        self.assertEqual(catalog.by_name('su2_4').size, 5)
        self.assertEqual(catalog.by_name('ising').labels, ('1', 'eps', 'sigma'))
        with self.assertRaises(LabelError):
            catalog.by_name('e8_1')

    def test_names_resolve(self):
        for name in catalog.names():
            with self.subTest(name=name):
                self.assertEqual(verify_axioms(catalog.by_name(name)), [])

    def test_product_labels_and_duals(self):
        ring = catalog.product(catalog.ising(), catalog.lee_yang())
        self.assertEqual(ring.size, 6)
        self.assertEqual(ring.labels[5], '(sigma,tau)')
        # sigma x sigma = 1 + eps, tau x tau = 1 + tau
        self.assertEqual(ring.tensor[5][5], (1, 1, 1, 1, 0, 0))


class TestVerlinde(unittest.TestCase):
    def test_ising_smatrix_reproduces_ising(self):
        ring = catalog.from_smatrix(catalog.ising_smatrix(), labels=['1', 'eps', 'sigma'])
        self.assertEqual(ring, catalog.ising())

    def test_lee_yang_smatrix_reproduces_lee_yang(self):
        ring = catalog.from_smatrix(catalog.lee_yang_smatrix(), labels=['1', 'tau'])
        self.assertEqual(ring, catalog.lee_yang())

    def test_su2_smatrix_reproduces_su2(self):
        for k in range(1, 7):
            with self.subTest(level=k):
                self.assertEqual(catalog.from_smatrix(catalog.su2_smatrix(k)), catalog.su2_level(k))

    def test_su2_level_two_smatrix_matches_ising_up_to_relabeling(self):
        ring = catalog.from_smatrix(catalog.su2_smatrix(2))
        self.assertIsNotNone(find_isomorphism(catalog.ising(), ring))

    def test_non_unitary_matrix_is_refused(self):
        with self.assertRaises(NonUnitaryError):
            catalog.from_smatrix(np.array([[1.0, 1.0], [1.0, -1.0]]))

    def test_non_symmetric_matrix_is_refused(self):
        c, s = math.cos(0.3), math.sin(0.3)
        with self.assertRaises(NonUnitaryError):
            catalog.from_smatrix(np.array([[c, s], [-s, c]]))

    def test_non_integral_matrix_is_refused(self):
        c, s = math.cos(0.3), math.sin(0.3)
        with self.assertRaises(NonIntegralError):
            catalog.from_smatrix(np.array([[c, s], [s, -c]]))
