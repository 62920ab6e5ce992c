import itertools
import random
from fractions import Fraction as F

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from formulas.analysis import check_wellformed, free_variables, infer_modulus
from formulas.interpreter import Exactness, Interpreter, evaluate
from formulas.nodes import Const, Dist, Join, Sup
from structures.codes import Signature, StructureCode
from structures.sampling import SAMPLE_SIGNATURE, random_isomorphic_copy, random_structure
from vaught.codes import Basic, Neg, SupFamily, constant_code, diameter_code
from vaught.oracle import VaughtOracle, a_star_k_oracle
from vaught.sampling import random_borel_code, random_corpus

from .exceptions import Mismatch
from .lowering import input_variables, synthesize, synthesize_sentence, truncation_bound
from .verification import (
    join_prefix_sweep, join_prefix_values, root_truncation_bound, verify_against_oracle, verify_sweep,
)

DIAMETER_SENTENCE = Sup('x', Sup('y', Dist('x', 'y')))
GAP = Basic(Dist('z0', 'z1'), 2)


def corpus_structures(seed, count, max_size=4):
    rng = random.Random(seed)
    return [random_structure(rng, 1 + i % max_size) for i in range(count)]


def unit_structure(size):
    """All distinct points at distance 1."""
    dist = tuple(tuple(0 if i == j else 1 for j in range(size)) for i in range(size))
    return StructureCode(SAMPLE_SIGNATURE, size, dist, {
        'P': tuple(F(i % 2) for i in range(size)),
        'R': tuple(F((i + j) % 2) for i in range(size) for j in range(size)),
    })


class SynthesizeExamplesTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.structures = corpus_structures(17, 8)

    def test_constant_leaf_any_k(self):
        for p in self.structures:
            for k in range(3):
                phi = synthesize(constant_code(F(1, 3)), k, structure=p)
                interpreter = Interpreter(p)
                for u in itertools.product(p.points, repeat=k):
                    self.assertEqual(interpreter.value(phi, dict(zip(input_variables(k), u))), F(1, 3))

    def test_sentence_of_constant(self):
        sentence = synthesize_sentence(constant_code(F(1, 3)))
        self.assertEqual(free_variables(sentence), frozenset())
        for p in self.structures:
            self.assertEqual(evaluate(sentence, p).value, F(1, 3))

    def test_negated_gap_vanishes(self):
        code = Neg(GAP)
        for p in self.structures:
            self.assertEqual(evaluate(synthesize(code, 0, structure=p), p).value, 0)
            self.assertEqual(a_star_k_oracle(code, p, 0, ()), 0)

    def test_diameter_sentence(self):
        code = diameter_code(6)
        sentence = synthesize_sentence(code)
        for p in self.structures:
            value = evaluate(sentence, p)
            self.assertEqual(value.value, evaluate(DIAMETER_SENTENCE, p).value)
            self.assertEqual(value.value, min(F(1), p.diameter))
            self.assertEqual(value.exactness, Exactness.EXACT)
            self.assertTrue(verify_against_oracle(code, p, 0, ()).equal)

    def test_basic_shape(self):
        phi = synthesize(GAP, 1)
        self.assertEqual(free_variables(phi), {'x0'})
        self.assertTrue(check_wellformed(phi, free={'x0'}).valid)
        sentence = synthesize(GAP, 0)
        self.assertEqual(sentence, Sup('z0_0', Sup('z0_1', Dist('z0_0', 'z0_1'))))

    def test_uncertified_negation_is_lower_bound(self):
        phi = synthesize(Neg(GAP), 1, prefix=3)
        self.assertIsInstance(phi, Join)
        self.assertEqual(len(phi.family.members), 3)
        self.assertTrue(phi.family.lower_bound_only)
        p = self.structures[2]
        self.assertEqual(evaluate(phi, p, {'x0': 0}).exactness, Exactness.LOWER_BOUND)
        certified = synthesize(Neg(GAP), 1, structure=p)
        self.assertEqual(evaluate(certified, p, {'x0': 0}).exactness, Exactness.EXACT)

    def test_mismatch_raised(self):
        p = self.structures[1]
        with self.assertRaises(Mismatch) as ctx:
            verify_against_oracle(constant_code(0), p, 0, (), formula=Const(5))
        self.assertEqual(ctx.exception.to_dict()['witnesses']['lhs'], '5')


class TruncationBoundTests(SimpleTestCase):
    def test_single_point(self):
        self.assertEqual(truncation_bound(unit_structure(1), 2, F(1)), 1)

    def test_formula(self):
        p = StructureCode(Signature(), 3, ((0, F(1, 2), 1), (F(1, 2), 0, F(1, 2)), (1, F(1, 2), 0)))
        self.assertEqual(truncation_bound(p, 0, F(1)), 3 + 6)
        self.assertEqual(truncation_bound(p, 2, F(1, 2)), 3 + 8)
        self.assertEqual(truncation_bound(p, 0, 0, support=20), 21)

    def test_monotone(self):
        p = random_structure(random.Random(3), 4)
        for k in range(3):
            previous = 0
            for bound in (F(0), F(1, 2), F(1), F(2)):
                value = truncation_bound(p, k, bound)
                self.assertGreaterEqual(value, previous)
                self.assertGreaterEqual(value, truncation_bound(p, max(0, k - 1), bound))
                previous = value

    def test_join_stabilizes(self):
        code = Neg(SupFamily((GAP, constant_code(F(1, 4)))))
        p = random_structure(random.Random(5), 3)
        for k in range(3):
            m_star = root_truncation_bound(code, k, p)
            u = (0,) * k
            values = join_prefix_values(code, k, p, u, range(1, m_star + 3))
            self.assertEqual(values, sorted(values))
            self.assertEqual(len(set(values[m_star - 1:])), 1)
            self.assertEqual(values[-1], a_star_k_oracle(code, p, k, u))


class ModulusExactnessTests(SimpleTestCase):
    @given(st.integers(0, 10 ** 9), st.integers(0, 2))
    @settings(max_examples=60, deadline=None)
    def test_constant_is_k(self, seed, k):
        code = random_borel_code(random.Random(seed), random.Random(seed).randint(1, 4))
        phi = synthesize(code, k, signature=SAMPLE_SIGNATURE, prefix=3)
        modulus = infer_modulus(phi, SAMPLE_SIGNATURE)
        self.assertLessEqual(free_variables(phi), set(input_variables(k)))
        for var in free_variables(phi):
            self.assertEqual(modulus.constant(var), k)
        self.assertEqual(modulus.value_bound, code.bound(SAMPLE_SIGNATURE))
        self.assertTrue(check_wellformed(phi, input_variables(k), SAMPLE_SIGNATURE).valid)


class OracleEqualitySuiteTests(SimpleTestCase):
    """Synthesized formulas against the brute-force oracle on a fixed corpus."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.codes = random_corpus(random.Random(1234), 50, max_depth=4)
        cls.structures = corpus_structures(99, 20)

    def test_every_instance_equal(self):
        report = verify_sweep(self.codes, self.structures, ks=(0, 1, 2))
        mismatches = [r.to_dict() for r in report.mismatches()[:5]]
        self.assertTrue(report.valid, mismatches)
        self.assertGreater(report.total, 50 * 20 * 3)

    def test_corpus_covers_all_node_kinds(self):
        kinds = set()
        for code in self.codes:
            kinds.add(type(code).__name__)
            if isinstance(code, Neg) and isinstance(code.inner, SupFamily):
                kinds.add('Neg(SupFamily)')
        self.assertLessEqual({'Basic', 'SupFamily', 'Neg', 'Neg(SupFamily)'}, kinds)

    def test_negation_truncation(self):
        negations = [c for c in self.codes if isinstance(c, Neg)]
        self.assertTrue(negations)
        checked = 0
        for code in negations:
            for p in self.structures:
                oracle = VaughtOracle(code, p)
                for k in range(3):
                    m_star = root_truncation_bound(code, k, p)
                    sweep = join_prefix_sweep(code, k, p, [m_star, 2 * m_star])
                    self.assertEqual(len(sweep), p.size ** k)
                    for u, (at_bound, doubled) in sweep.items():
                        self.assertEqual(at_bound, doubled)
                        self.assertEqual(at_bound, oracle.a_star(k, u))
                        checked += 1
        self.assertEqual(checked, len(negations) * sum(1 + p.size + p.size ** 2 for p in self.structures))

    def test_sentence_invariance(self):
        rng = random.Random(7)
        for code in self.codes[:20]:
            for p in self.structures[:10]:
                copy, _ = random_isomorphic_copy(rng, p)
                sentence = synthesize_sentence(code, structure=p)
                self.assertEqual(evaluate(sentence, p).value, evaluate(sentence, copy).value)


class NestedNegationTests(SimpleTestCase):
    def test_double_negation_on_unit_spaces(self):
        code = Neg(SupFamily((Neg(GAP), constant_code(F(-1, 2)))))
        for size in (1, 2):
            p = unit_structure(size)
            oracle = VaughtOracle(code, p)
            for k in range(3):
                phi = synthesize(code, k, structure=p)
                interpreter = Interpreter(p)
                for u in itertools.product(p.points, repeat=k):
                    result = verify_against_oracle(code, p, k, u, phi, oracle, interpreter)
                    self.assertTrue(result.equal)

    def test_negated_family_depth_three(self):
        code = Neg(SupFamily((GAP, Basic(Dist('z0', 'z0'), 1))))
        for p in corpus_structures(4, 4):
            for k in range(3):
                for u in itertools.product(p.points, repeat=k):
                    self.assertTrue(verify_against_oracle(code, p, k, u).equal)
