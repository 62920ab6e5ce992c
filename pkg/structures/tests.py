import os
import random
import tempfile
from fractions import Fraction as F

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from .codes import (
    PredicateSymbol,
    Signature,
    StructureCode,
    add_function_symbol,
    class_indices,
    encode_function_symbol,
    iso_check,
    quotient_zero_distance,
    reindex,
    truncated_distance,
    validate_structure,
    zero_distance_classes,
)
from .exceptions import (
    AsymmetricDistance,
    BoundViolation,
    DimensionMismatch,
    InconsistentPredicateOnClass,
    IndexOutOfRange,
    ModulusViolation,
    NegativeDistance,
    NonzeroDiagonal,
    RationalFormatError,
    SignatureError,
    StructureFormatError,
    TriangleViolation,
)
from .io import dump_structure, load_quotiented_structure, structure_from_dict, structure_to_dict
from .moduli import ModulusVector
from .rationals import format_rational, parse_rational
from .sampling import (
    SAMPLE_SIGNATURE,
    random_isomorphic_copy,
    random_permutation,
    random_structure,
    with_duplicates,
)

UNARY_B = Signature((PredicateSymbol('B', 1, (F(1),), F(5)),))


def metric(*rows):
    return StructureCode(Signature(), len(rows), rows)


class RationalTests(SimpleTestCase):
    def test_parse_forms(self):
        self.assertEqual(parse_rational('1/2'), F(1, 2))
        self.assertEqual(parse_rational('3'), F(3))
        self.assertEqual(parse_rational(4), F(4))
        self.assertEqual(parse_rational(' -2/4 '), F(-1, 2))

    def test_rejects_floats_and_garbage(self):
        for bad in (0.5, True, '1/0', 'x', None):
            with self.assertRaises(RationalFormatError):
                parse_rational(bad)

    def test_format_always_has_denominator(self):
        self.assertEqual(format_rational(F(0)), '0/1')
        self.assertEqual(format_rational(F(6, 4)), '3/2')


class ModulusVectorTests(SimpleTestCase):
    def test_domination(self):
        small = ModulusVector({'x': 1}, 1)
        big = ModulusVector({'x': 2, 'y': 1}, 1)
        self.assertTrue(small.dominated_by(big))
        self.assertFalse(big.dominated_by(small))

    def test_equality_ignores_representation(self):
        self.assertEqual(ModulusVector({'x': 1}, F(1)), ModulusVector({'x': F(1)}, 1))
        self.assertEqual(hash(ModulusVector({'x': 1}, 1)), hash(ModulusVector({'x': F(1)}, 1)))

    def test_negative_rejected(self):
        with self.assertRaises(ValueError):
            ModulusVector({'x': -1}, 0)


class SignatureTests(SimpleTestCase):
    def test_reserved_and_duplicate_names(self):
        with self.assertRaises(SignatureError):
            Signature((PredicateSymbol('d', 1, (1,), 1),))
        with self.assertRaises(SignatureError):
            Signature((PredicateSymbol('B', 1, (1,), 1), PredicateSymbol('B', 1, (1,), 1)))

    def test_constants_must_match_arity(self):
        with self.assertRaises(SignatureError):
            Signature((PredicateSymbol('B', 2, (1,), 1),))

    def test_symbols_lists_distance_first(self):
        self.assertEqual(SAMPLE_SIGNATURE.symbols, ('d', 'P', 'R'))
        self.assertIn('d', SAMPLE_SIGNATURE)


class ValidateStructureTests(SimpleTestCase):
    def first_error(self, code):
        report = validate_structure(code)
        self.assertFalse(report.valid)
        return report.errors[0]

    def test_triangle_violation_witness(self):
        code = metric((0, 1, 3), (1, 0, 1), (3, 1, 0))
        error = self.first_error(code)
        self.assertIsInstance(error, TriangleViolation)
        self.assertEqual((error.i, error.j, error.k), (0, 2, 1))

    def test_zero_distances_allowed(self):
        code = StructureCode(UNARY_B, 2, ((0, 0), (0, 0)), {'B': (F(1, 2), F(1, 2))})
        self.assertTrue(validate_structure(code).valid)

    def test_modulus_violation(self):
        code = StructureCode(UNARY_B, 2, ((0, 1), (1, 0)), {'B': (0, 5)})
        error = self.first_error(code)
        self.assertIsInstance(error, ModulusViolation)
        self.assertEqual((error.predicate, error.u, error.v), ('B', (0,), (1,)))

    def test_bound_violation(self):
        signature = Signature((PredicateSymbol('B', 1, (1,), F(1, 2)),))
        code = StructureCode(signature, 2, ((0, 1), (1, 0)), {'B': (1, 1)})
        error = self.first_error(code)
        self.assertIsInstance(error, BoundViolation)
        self.assertEqual(error.u, (0,))

    def test_metric_axioms(self):
        self.assertIsInstance(self.first_error(metric((0, 1), (2, 0))), AsymmetricDistance)
        self.assertIsInstance(self.first_error(metric((1, 1), (1, 0))), NonzeroDiagonal)
        self.assertIsInstance(self.first_error(metric((0, -1), (-1, 0))), NegativeDistance)

    def test_dimensions_checked_at_construction(self):
        with self.assertRaises(DimensionMismatch):
            StructureCode(Signature(), 2, ((0, 1),))
        with self.assertRaises(DimensionMismatch):
            StructureCode(UNARY_B, 2, ((0, 1), (1, 0)), {'B': (0,)})

    def test_report_is_serializable(self):
        report = validate_structure(metric((0, 1, 3), (1, 0, 1), (3, 1, 0)))
        data = report.to_dict()
        self.assertEqual(data['errors'][0]['code'], 'TRIANGLE_VIOLATION')
        self.assertEqual(data['errors'][0]['witnesses'], {'i': 0, 'j': 2, 'k': 1})
        with self.assertRaises(TriangleViolation):
            report.raise_for_errors()

    @given(st.integers(0, 10 ** 6), st.integers(1, 5))
    @settings(max_examples=30, deadline=None)
    def test_sampled_structures_are_valid(self, seed, size):
        code = random_structure(random.Random(seed), size)
        self.assertTrue(validate_structure(code).valid)
        self.assertTrue(code.is_metric)


class TruncatedDistanceTests(SimpleTestCase):
    def test_examples(self):
        code = metric((0, 3, F(1, 2)), (3, 0, 3), (F(1, 2), 3, 0))
        self.assertEqual(truncated_distance(code, 0, 1), 1)
        self.assertEqual(truncated_distance(code, 0, 2), F(1, 2))
        self.assertEqual(truncated_distance(code, 1, 1), 0)

    def test_index_out_of_range(self):
        with self.assertRaises(IndexOutOfRange):
            truncated_distance(metric((0,)), 0, 1)


class QuotientTests(SimpleTestCase):
    def test_two_points_at_zero_collapse(self):
        code = StructureCode(UNARY_B, 2, ((0, 0), (0, 0)), {'B': (1, 1)})
        merged = quotient_zero_distance(code)
        self.assertEqual(merged.size, 1)
        self.assertEqual(merged.pred_tables['B'], (F(1),))

    def test_positive_distances_are_identity(self):
        code = random_structure(random.Random(3), 4)
        self.assertIs(quotient_zero_distance(code), code)

    def test_partial_collapse(self):
        code = StructureCode(UNARY_B, 3, ((0, 0, 2), (0, 0, 2), (2, 2, 0)), {'B': (1, 1, 0)})
        self.assertEqual(zero_distance_classes(code), [(0, 1), (2,)])
        merged = quotient_zero_distance(code)
        self.assertEqual(merged.dist, ((0, 2), (2, 0)))
        self.assertEqual(merged.pred_tables['B'], (1, 0))

    def test_class_indices(self):
        code = StructureCode(UNARY_B, 3, ((0, 2, 0), (2, 0, 2), (0, 2, 0)), {'B': (1, 0, 1)})
        self.assertEqual(class_indices(code), (0, 1, 0))
        merged = quotient_zero_distance(code)
        self.assertEqual(merged.d(0, 1), code.d(0, 1))
        self.assertEqual(merged.pred_tables['B'], (1, 0))

    def test_inconsistent_predicate(self):
        signature = Signature((PredicateSymbol('B', 1, (0,), 1),))
        code = StructureCode(signature, 2, ((0, 0), (0, 0)), {'B': (0, 1)})
        with self.assertRaises(InconsistentPredicateOnClass):
            quotient_zero_distance(code)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_idempotent_and_isomorphic_to_source(self, seed):
        rng = random.Random(seed)
        base = random_structure(rng, rng.randint(1, 4))
        padded = with_duplicates(rng, base, extra=2)
        self.assertTrue(validate_structure(padded).valid)
        once = quotient_zero_distance(padded)
        self.assertEqual(quotient_zero_distance(once), once)
        self.assertTrue(iso_check(once, base).isomorphic)


class ReindexTests(SimpleTestCase):
    def test_swap(self):
        code = StructureCode(UNARY_B, 2, ((0, 1), (1, 0)), {'B': (0, 1)})
        self.assertEqual(reindex(code, (1, 0)).pred_tables['B'], (1, 0))

    def test_repeated_index(self):
        code = metric((0, 1), (1, 0))
        self.assertEqual(reindex(code, (0, 0)).dist, ((0, 0), (0, 0)))

    def test_identity(self):
        code = random_structure(random.Random(5), 3)
        self.assertEqual(reindex(code, (0, 1, 2)), code)

    def test_bad_index(self):
        with self.assertRaises(IndexOutOfRange):
            reindex(metric((0,)), (1,))

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_composition_law(self, seed):
        rng = random.Random(seed)
        code = random_structure(rng, rng.randint(1, 4))
        y = [rng.randrange(code.size) for _ in range(rng.randint(1, 4))]
        z = [rng.randrange(len(y)) for _ in range(rng.randint(1, 4))]
        composed = [y[i] for i in z]
        self.assertEqual(reindex(code, composed), reindex(reindex(code, y), z))


class IsoCheckTests(SimpleTestCase):
    def test_reflexive_with_identity(self):
        code = random_structure(random.Random(11), 4)
        result = iso_check(code, code)
        self.assertTrue(result.isomorphic)
        self.assertEqual(result.bijection, (0, 1, 2, 3))

    def test_different_distances(self):
        self.assertFalse(iso_check(metric((0, 1), (1, 0)), metric((0, 2), (2, 0))).isomorphic)

    def test_size_mismatch(self):
        self.assertFalse(iso_check(metric((0,)), metric((0, 1), (1, 0))).isomorphic)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_permuted_copy_bijection_preserves_tables(self, seed):
        rng = random.Random(seed)
        code = random_structure(rng, rng.randint(1, 5))
        copy, _ = random_isomorphic_copy(rng, code)
        result = iso_check(code, copy)
        self.assertTrue(result.isomorphic)
        sigma = result.bijection
        for i in code.points:
            for j in code.points:
                self.assertEqual(code.d(i, j), copy.d(sigma[i], sigma[j]))
        for u in code.tuples(2):
            self.assertEqual(code.value('R', u), copy.value('R', tuple(sigma[i] for i in u)))

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_equivalence_relation(self, seed):
        rng = random.Random(seed)
        size = rng.randint(1, 3)
        # coarse distances make accidental isomorphisms likely
        codes = [random_structure(rng, size, Signature(), max_steps=2) for _ in range(3)]
        a, b, c = codes
        self.assertEqual(iso_check(a, b).isomorphic, iso_check(b, a).isomorphic)
        if iso_check(a, b).isomorphic and iso_check(b, c).isomorphic:
            self.assertTrue(iso_check(a, c).isomorphic)


class FunctionSymbolTests(SimpleTestCase):
    def setUp(self):
        self.code = random_structure(random.Random(7), 3, Signature())

    def test_identity(self):
        table = encode_function_symbol(self.code, (0, 1, 2), 1)
        for i in range(3):
            for r in range(3):
                self.assertEqual(table[i * 3 + r], self.code.d(i, r))

    def test_constant(self):
        table = encode_function_symbol(self.code, (0, 0, 0), 1)
        for i in range(3):
            self.assertEqual(table[i * 3: i * 3 + 3], self.code.dist[0])

    def test_vanishes_on_graph(self):
        rng = random.Random(2)
        f = [rng.randrange(3) for _ in range(9)]
        table = encode_function_symbol(self.code, f, 2)
        for u in self.code.tuples(2):
            position = self.code.flat_index(u)
            self.assertEqual(table[position * 3 + f[position]], 0)

    def test_bad_target(self):
        with self.assertRaises(IndexOutOfRange):
            encode_function_symbol(self.code, (0, 1, 7), 1)

    def test_added_symbol_validates(self):
        for f in ((0, 1, 2), (1, 1, 1)):
            extended = add_function_symbol(self.code, 'Bf', f, 1)
            self.assertTrue(validate_structure(extended).valid)
            self.assertEqual(extended.signature.get('Bf').arity, 2)


class QuotientedLoadTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def load(self, code):
        path = os.path.join(self.tmp.name, 'p.json')
        dump_structure(code, path)
        return load_quotiented_structure(path)

    def test_duplicates_merged(self):
        loaded = self.load(metric((0, 0, 1), (0, 0, 1), (1, 1, 0)))
        self.assertEqual(loaded.code.size, 2)
        self.assertEqual([loaded.point(i) for i in range(3)], [0, 0, 1])
        with self.assertRaises(IndexOutOfRange):
            loaded.point(3)

    def test_violation_raised(self):
        with self.assertRaises(TriangleViolation):
            self.load(metric((0, 1, 3), (1, 0, 1), (3, 1, 0)))


class StructureIOTests(SimpleTestCase):
    def test_dict_round_trip(self):
        code = random_structure(random.Random(9), 3)
        self.assertEqual(structure_from_dict(structure_to_dict(code)), code)

    def test_rationals_written_as_strings(self):
        data = structure_to_dict(metric((0, 1), (1, 0)))
        self.assertEqual(data['dist'], [['0/1', '1/1'], ['1/1', '0/1']])

    def test_integers_accepted(self):
        code = structure_from_dict({'size': 2, 'dist': [[0, 1], [1, 0]]})
        self.assertEqual(code.d(0, 1), 1)

    def test_missing_field(self):
        with self.assertRaises(StructureFormatError):
            structure_from_dict({'size': 1})

    def test_equal_codes_hash_equal(self):
        code = random_structure(random.Random(9), 3)
        same = structure_from_dict(structure_to_dict(code))
        self.assertEqual(hash(code), hash(same))
        self.assertIn(same, {code})
        self.assertEqual(len({code, same, metric((0,))}), 2)

    def test_permutation_helper(self):
        self.assertEqual(sorted(random_permutation(random.Random(1), 5)), [0, 1, 2, 3, 4])
