import itertools
import random
from fractions import Fraction as F

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from formulas.nodes import Dist, Sup
from structures.codes import Signature, StructureCode
from structures.exceptions import BudgetExceeded, IndexOutOfRange, StructureFormatError
from structures.sampling import random_isomorphic_copy, random_structure

from .codes import (
    Basic, Neg, SupFamily, borel_from_dict, borel_to_dict, constant_code,
    diameter_code, negation_count,
)
from .exceptions import InsufficientPrefix, InvalidBorelCode
from .oracle import VaughtOracle, a_star_k_oracle, eval_borel, k_lipschitz_audit, seq_distance
from .sampling import random_borel_code, random_corpus

GAP = Basic(Dist('z0', 'z1'), 2)


def two_points(d):
    return StructureCode(Signature(), 2, ((0, d), (d, 0)))


class BorelCodeTests(SimpleTestCase):
    def test_derived_attributes(self):
        code = Neg(SupFamily((GAP, constant_code(F(1, 3)))))
        self.assertEqual(code.support, 2)
        self.assertEqual(code.depth, 3)
        self.assertEqual(code.bound(), 1)
        self.assertEqual(negation_count(code), 1)

    def test_leaf_restrictions(self):
        with self.assertRaises(InvalidBorelCode):
            Basic(Sup('z0', Dist('z0', 'z0')), 1)
        with self.assertRaises(InvalidBorelCode):
            Basic(Dist('z0', 'z1', truncated=False), 2)
        with self.assertRaises(InvalidBorelCode):
            Basic(Dist('z0', 'z1'), 1)
        with self.assertRaises(InvalidBorelCode):
            SupFamily(())

    def test_json_form(self):
        code = Neg(SupFamily((GAP, constant_code(1))))
        data = borel_to_dict(code)
        self.assertEqual(data, {'neg': {'sup': [
            {'basic': {'theta': '(dhat z0 z1)', 'support': 2}},
            {'basic': {'theta': '(const 1/1)', 'support': 0}},
        ]}})
        self.assertEqual(borel_from_dict(data), code)

    def test_bad_json(self):
        with self.assertRaises(StructureFormatError):
            borel_from_dict({'basic': {'theta': '(const 1)'}})
        with self.assertRaises(StructureFormatError):
            borel_from_dict({'max': []})

    def test_diameter_code_shape(self):
        code = diameter_code(4)
        self.assertEqual(len(code.members), 4)
        self.assertEqual(code.support, 4)
        self.assertEqual(code.bound(), 1)

    def test_corpus_generator(self):
        corpus = random_corpus(random.Random(1), 12)
        self.assertEqual({c.depth for c in corpus[:-1]}, {1, 2, 3, 4})
        self.assertTrue(all(negation_count(c) <= 1 for c in corpus))
        self.assertIsInstance(corpus[-1], Neg)
        self.assertIsInstance(corpus[-1].inner, SupFamily)


class SeqDistanceTests(SimpleTestCase):
    def test_empty_prefix(self):
        self.assertEqual(seq_distance(two_points(1), (), (0, 1)), 0)

    def test_equal_sequences(self):
        self.assertEqual(seq_distance(two_points(1), (0, 1), (0, 1)), 0)

    def test_single_entries(self):
        self.assertEqual(seq_distance(two_points(F(1, 2)), (0,), (1,)), F(1, 2))

    def test_truncated_and_common_prefix(self):
        self.assertEqual(seq_distance(two_points(3), (0, 0, 1), (0, 1)), 1)

    def test_bad_index(self):
        with self.assertRaises(IndexOutOfRange):
            seq_distance(two_points(1), (2,), (0,))


class EvalBorelTests(SimpleTestCase):
    def test_basic_on_diagonal(self):
        self.assertEqual(eval_borel(GAP, two_points(1), (1, 1)), 0)

    def test_negated_constant(self):
        self.assertEqual(eval_borel(Neg(constant_code(F(2, 3))), two_points(1), ()), F(-2, 3))

    def test_sup_family(self):
        code = SupFamily((GAP, constant_code(F(1, 4))))
        self.assertEqual(eval_borel(code, two_points(F(1, 2)), (0, 1)), F(1, 2))
        self.assertEqual(eval_borel(code, two_points(F(1, 2)), (0, 0)), F(1, 4))

    def test_prefix_too_short(self):
        with self.assertRaises(InsufficientPrefix):
            eval_borel(GAP, two_points(1), (0,))


class VaughtOracleTests(SimpleTestCase):
    def test_constant_code(self):
        code = constant_code(F(1, 3))
        p = random_structure(random.Random(1), 3)
        for k in range(3):
            for u in itertools.product(p.points, repeat=k):
                self.assertEqual(a_star_k_oracle(code, p, k, u), F(1, 3))

    def test_k_zero_is_plain_max(self):
        rng = random.Random(8)
        p = random_structure(rng, 3)
        code = random_borel_code(rng, 3)
        expected = max(
            eval_borel(code, p, y) for y in itertools.product(p.points, repeat=code.support)
        )
        self.assertEqual(a_star_k_oracle(code, p, 0, ()), expected)

    def test_u_length_must_be_k(self):
        with self.assertRaises(InsufficientPrefix):
            a_star_k_oracle(GAP, two_points(1), 2, (0,))

    def test_budget(self):
        with self.assertRaises(BudgetExceeded):
            a_star_k_oracle(diameter_code(6), random_structure(random.Random(0), 4), 0, (), tuple_budget=100)

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=10, deadline=None)
    def test_invariant_code_ignores_k_and_u(self, seed):
        rng = random.Random(seed)
        p = random_structure(rng, rng.randint(1, 4))
        oracle = VaughtOracle(diameter_code(6), p)
        expected = min(F(1), p.diameter)
        for k in range(3):
            for u, value in oracle.table(k).items():
                self.assertEqual(value, expected, (k, u))

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=30, deadline=None)
    def test_k_lipschitz(self, seed):
        rng = random.Random(seed)
        p = random_structure(rng, rng.randint(1, 4))
        code = random_borel_code(rng, rng.randint(1, 4))
        oracle = VaughtOracle(code, p)
        for k in range(3):
            report = k_lipschitz_audit(code, p, k, oracle)
            self.assertTrue(report.valid, report.to_dict())
        values = oracle.table(0)
        self.assertEqual(len(set(values.values())), 1)

    def test_two_point_k_one(self):
        p = two_points(F(1, 2))
        report = k_lipschitz_audit(GAP, p, 1)
        self.assertTrue(report.valid)
        self.assertEqual(report.checked_pairs, 1)
        values = VaughtOracle(GAP, p).table(1)
        self.assertLessEqual(abs(values[(0,)] - values[(1,)]), p.dhat(0, 1))

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=30, deadline=None)
    def test_isomorphism_invariance(self, seed):
        rng = random.Random(seed)
        a = random_structure(rng, rng.randint(1, 4))
        b, sigma = random_isomorphic_copy(rng, a)
        code = random_borel_code(rng, rng.randint(1, 3))
        k = rng.randint(0, 2)
        u = tuple(rng.randrange(a.size) for _ in range(k))
        self.assertEqual(
            a_star_k_oracle(code, a, k, u),
            a_star_k_oracle(code, b, k, tuple(sigma[i] for i in u)),
        )

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=30, deadline=None)
    def test_adding_members_never_decreases(self, seed):
        rng = random.Random(seed)
        p = random_structure(rng, rng.randint(1, 4))
        members = [random_borel_code(rng, rng.randint(1, 2)) for _ in range(3)]
        k = rng.randint(0, 2)
        u = tuple(rng.randrange(p.size) for _ in range(k))
        smaller = a_star_k_oracle(SupFamily(tuple(members[:2])), p, k, u)
        larger = a_star_k_oracle(SupFamily(tuple(members)), p, k, u)
        self.assertGreaterEqual(larger, smaller)

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=30, deadline=None)
    def test_negation_duality(self, seed):
        rng = random.Random(seed)
        p = random_structure(rng, rng.randint(1, 4))
        inner = random_borel_code(rng, rng.randint(1, 3), max_negations=0)
        lowest = min(
            eval_borel(inner, p, y) for y in itertools.product(p.points, repeat=inner.support)
        )
        self.assertEqual(a_star_k_oracle(Neg(inner), p, 0, ()), -lowest)

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=30, deadline=None)
    def test_extension_independence(self, seed):
        rng = random.Random(seed)
        p = random_structure(rng, rng.randint(1, 3))
        code = random_borel_code(rng, 1)
        k = rng.randint(0, 2)
        u = tuple(rng.randrange(p.size) for _ in range(k))
        short = VaughtOracle(code, p).a_star(k, u)
        longer = VaughtOracle(code, p, length=max(k, code.support) + 2).a_star(k, u)
        self.assertEqual(short, longer)
