from __future__ import annotations

import itertools
import random
import unittest
from fractions import Fraction

from loguru import logger

from fusionblocks.exceptions import (
    NonHomogeneousError,
    StructuralError,
)
from fusionblocks.series.qseries import QSeries
from fusionblocks.voa.fock import (
    TRACE_OFFSET,
    Vector,
    basis,
    character,
    square_bracket,
    virasoro_vector,
    zero_mode,
)
from fusionblocks.voa.zhu_trace import (
    A0,
    AM,
    AMINUS1,
    BLOCK,
    IDENTITIES,
    LMINUS1,
    SUM_FORMULA,
    bracket_trace,
    check_a0,
    check_am,
    check_aminus1,
    check_lminus1,
    check_sum_formula,
    composed_trace,
    conformal_block_annihilation,
    first_bad,
    run_checks,
    sum_formula_left,
    sum_formula_right,
    trace,
)

Q_ORDER = 3
LOW_STATES = [Vector.vacuum(), Vector.basis((1,)), Vector.basis((2,)), Vector.basis((1, 1))]


def states_up_to(degree: int) -> list[Vector]:
    return [Vector.basis(p) for d in range(degree + 1) for p in basis(d)]


def combination(rng: random.Random, states: list[Vector]) -> Vector:
    total = Vector.zero()
    for state in rng.sample(states, min(3, len(states))):
        total = total + state.scale(Fraction(rng.choice((-1, 1)) * rng.randint(1, 6), rng.randint(1, 5)))
    return total


class TestTrace(unittest.TestCase):
    def test_vacuum_trace_is_the_character(self):
        self.assertTrue((trace(Vector.vacuum(), 6) - character(6)).is_zero())

    def test_conformal_vector_trace(self):
        self.assertEqual([str(c) for c in trace(virasoro_vector(), 5).coefficients()], ['0', '1', '4', '9', '20', '35'])
        doubled = trace(Vector.basis((1, 1)), 5)
        self.assertEqual([str(c) for c in doubled.coefficients()], ['0', '2', '8', '18', '40', '70'])

    def test_alpha_has_no_zero_mode(self):
        self.assertTrue(trace(Vector.basis((1,)), 5).is_zero())

    def test_offset(self):
        self.assertEqual(trace(Vector.vacuum(), 2).offset, TRACE_OFFSET)

    def test_trace_is_linear_over_mixed_degrees(self):
        mixed = Vector({(): 2, (1, 1): Fraction(1, 3), (3,): 5})
        parts = trace(Vector.vacuum(), 6).scale(2) + trace(Vector.basis((1, 1)), 6).scale(Fraction(1, 3))
        self.assertTrue((trace(mixed, 6) - parts).is_zero())
        with self.assertRaises(NonHomogeneousError):
            zero_mode(mixed)

    def test_bracket_trace_is_the_trace_of_the_bracket(self):
        rng = random.Random(5)
        states = states_up_to(4)
        for _ in range(12):
            degree = rng.randint(0, 3)
            a = combination(rng, [Vector.basis(p) for p in basis(degree)])
            v = combination(rng, states)
            for m in range(-3, 3):
                with self.subTest(a=a, v=v, m=m):
                    expected = trace(square_bracket(a, m, v), 5)
                    self.assertTrue((bracket_trace(a, m, v, 5) - expected).is_zero())

    def test_composed_trace(self):
        omega = virasoro_vector()
        # o(omega) = L(0), so the trace of L(0)^2 is sum_n n^2 p(n)
        squares = composed_trace(omega, omega, 5)
        self.assertEqual([str(c) for c in squares.coefficients()], ['0', '1', '8', '27', '80', '175'])
        for a, v in itertools.product(states_up_to(3), repeat=2):
            outer, inner = zero_mode(a), zero_mode(v)
            for n in range(4):
                matrix = outer.matrix(n).dot(inner.matrix(n))
                with self.subTest(a=a, v=v, n=n):
                    diagonal = sum(matrix[i, i] for i in range(len(basis(n))))
                    self.assertEqual(composed_trace(a, v, 3).coefficient(n), diagonal)


class TestIdentities(unittest.TestCase):
    def test_a0(self):
        for a, v in itertools.product(LOW_STATES, repeat=2):
            with self.subTest(a=a, v=v):
                self.assertTrue(check_a0(a, v, Q_ORDER).is_zero())

    def test_am(self):
        for a, v in itertools.product(LOW_STATES, repeat=2):
            for m in (2, 3, 4):
                with self.subTest(a=a, v=v, m=m):
                    self.assertTrue(check_am(a, v, m, Q_ORDER).is_zero())
        with self.assertRaises(StructuralError):
            check_am(Vector.basis((1,)), Vector.basis((1,)), 1, Q_ORDER)

    def test_aminus1(self):
        for a, v in itertools.product(LOW_STATES, repeat=2):
            with self.subTest(a=a, v=v):
                self.assertTrue(check_aminus1(a, v, Q_ORDER).is_zero())

    def test_aminus1_on_degree_three(self):
        a = Vector.basis((2, 1))
        for v in (Vector.basis((1,)), Vector.basis((2,))):
            with self.subTest(v=v):
                self.assertTrue(check_aminus1(a, v, 2).is_zero())

    def test_lminus1(self):
        for v in LOW_STATES + [Vector.basis((3,)), Vector.basis((2, 1))]:
            with self.subTest(v=v):
                self.assertTrue(check_lminus1(v, Q_ORDER).is_zero())

    def test_block_annihilation(self):
        for a, v in itertools.product(LOW_STATES, repeat=2):
            for m in (0, 2, 3):
                with self.subTest(a=a, v=v, m=m):
                    self.assertTrue(conformal_block_annihilation(a, v, m, Q_ORDER).is_zero())
        with self.assertRaises(StructuralError):
            conformal_block_annihilation(Vector.basis((1,)), Vector.vacuum(), 1, Q_ORDER)
        with self.assertRaises(StructuralError):
            conformal_block_annihilation(Vector.basis((1,)), Vector.vacuum(), -2, Q_ORDER)

    def test_sum_formula_both_expansions(self):
        pairs = itertools.product(LOW_STATES[1:], LOW_STATES[:3])
        for (a, v), shifted in itertools.product(pairs, (True, False)):
            with self.subTest(a=a, v=v, shifted=shifted):
                self.assertEqual(check_sum_formula(a, v, Q_ORDER, 3, shifted=shifted), {})

    def test_sum_formula_sides_agree_term_by_term(self):
        for a, v in itertools.product(states_up_to(2)[1:], states_up_to(3)):
            left = sum_formula_left(a, v, 4, 4)
            right = sum_formula_right(a, v, 4, 4)
            for partition in set(left) | set(right):
                with self.subTest(a=a, v=v, partition=partition):
                    if partition not in left:
                        self.assertTrue(right[partition].is_zero())
                    elif partition not in right:
                        self.assertTrue(left[partition].is_zero())
                    else:
                        self.assertTrue((left[partition] - right[partition]).is_zero())

    def test_identities_vanish_on_random_combinations(self):
        rng = random.Random(11)
        states = states_up_to(4)
        for _ in range(8):
            degree = rng.randint(1, 3)
            a = combination(rng, [Vector.basis(p) for p in basis(degree)])
            v = combination(rng, states)
            with self.subTest(a=a, v=v):
                self.assertTrue(check_a0(a, v, 5).is_zero())
                self.assertTrue(check_am(a, v, 2, 5).is_zero())
                self.assertTrue(check_aminus1(a, v, 5).is_zero())
                self.assertTrue(conformal_block_annihilation(a, v, 3, 5).is_zero())
                self.assertEqual(check_sum_formula(a, v, 5, 4), {})
                self.assertTrue(check_lminus1(v, 5).is_zero())

    def test_a0_logs_its_verdict(self):
        messages: list[str] = []
        handler = logger.add(messages.append, level='DEBUG', format='{message}')
        try:
            check_a0(Vector.basis((1,)), Vector.basis((1,)), 2)
        finally:
            logger.remove(handler)
        self.assertTrue(any('a0 residual vanishes' in str(message) for message in messages), messages)


class TestRunChecks(unittest.TestCase):
    def test_every_identity_passes_on_low_degrees(self):
        rows = run_checks(IDENTITIES, 1, 2, m=3)
        self.assertTrue(rows)
        self.assertTrue(all(row.passed for row in rows), [row.to_dict() for row in rows if not row.passed])
        self.assertEqual({row.identity for row in rows}, set(IDENTITIES))

    def test_every_identity_passes_at_the_default_sizes(self):
        rows = run_checks(IDENTITIES, 6, 8, m=4)
        self.assertTrue(all(row.passed for row in rows), [row.to_dict() for row in rows if not row.passed][:5])
        pairs = len(states_up_to(6)) ** 2
        self.assertEqual(len(rows), pairs * 10 + len(states_up_to(6)))

    def test_row_counts(self):
        pool = [(), (1,)]
        self.assertEqual(len(run_checks([A0], 1, 2, states=pool)), 4)
        self.assertEqual(len(run_checks([AM], 1, 2, m=4, states=pool)), 12)
        self.assertEqual(len(run_checks([BLOCK], 1, 2, m=3, states=pool)), 12)
        self.assertEqual(len(run_checks([LMINUS1], 1, 2, states=pool)), 2)
        self.assertEqual(len(run_checks([AMINUS1, SUM_FORMULA], 1, 2, states=pool)), 8)

    def test_unknown_identity(self):
        with self.assertRaises(StructuralError):
            run_checks(['a1'], 1, 2)

    def test_first_bad(self):
        self.assertIsNone(first_bad(QSeries.zero(3)))
        self.assertEqual(first_bad(QSeries([0, 0, 5])), 'q^2: 5')
        self.assertIsNone(first_bad({}))
