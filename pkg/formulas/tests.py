import random
from fractions import Fraction as F

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from structures.codes import Signature, StructureCode
from structures.exceptions import BudgetExceeded, IndexOutOfRange
from structures.moduli import ModulusVector
from structures.sampling import SAMPLE_SIGNATURE, random_isomorphic_copy, random_structure

from .analysis import check_wellformed, free_variables, infer_modulus, substitute
from .audit import lipschitz_audit
from .exceptions import (
    ArityMismatch,
    FormulaSyntaxError,
    IllFormed,
    ModulusExceedsDeclared,
    UnboundVariable,
    UnknownPredicate,
)
from .grammar import parse_formula, print_formula
from .interpreter import Exactness, Interpreter, evaluate
from .nodes import (
    Abs, Add, Atom, Const, Dist, FormulaFamily, Inf, Join, Max, Meet, Min,
    Scale, Sub, Sup, sup_over,
)
from .sampling import FormulaSampler, random_formula

DHAT_XY = Dist('x', 'y')
DIAMETER_SENTENCE = Sup('x', Sup('y', DHAT_XY))


def three_points():
    return StructureCode(Signature(), 3, ((0, 1, 3), (1, 0, 2), (3, 2, 0)))


def join(*members, declared=None, lower_bound_only=False):
    declared = declared or ModulusVector({}, 1)
    return Join(FormulaFamily(tuple(members), declared, lower_bound_only))


class ParseFormulaTests(SimpleTestCase):
    def test_nested_sup(self):
        self.assertEqual(parse_formula('(sup x (sup y (dhat x y)))'), DIAMETER_SENTENCE)

    def test_raw_distance_and_constant(self):
        self.assertEqual(
            parse_formula('(min (const 1/2) (d x y))'),
            Min(Const(F(1, 2)), Dist('x', 'y', truncated=False)),
        )

    def test_unterminated(self):
        with self.assertRaises(FormulaSyntaxError) as ctx:
            parse_formula('(sup x')
        self.assertEqual(ctx.exception.position, 6)

    def test_unknown_operator_position(self):
        with self.assertRaises(FormulaSyntaxError) as ctx:
            parse_formula('(add (const 1) (frob x))')
        self.assertEqual(ctx.exception.position, 16)

    def test_trailing_input(self):
        with self.assertRaises(FormulaSyntaxError):
            parse_formula('(const 1) (const 2)')

    def test_negative_scale_rejected(self):
        with self.assertRaises(FormulaSyntaxError):
            parse_formula('(scale -1/2 (dhat x y))')

    def test_predicates_checked_against_signature(self):
        self.assertEqual(
            parse_formula('(pred R x y)', SAMPLE_SIGNATURE),
            Atom('R', ('x', 'y')),
        )
        with self.assertRaises(UnknownPredicate):
            parse_formula('(pred Q x)', SAMPLE_SIGNATURE)
        with self.assertRaises(ArityMismatch):
            parse_formula('(pred P x y)', SAMPLE_SIGNATURE)

    def test_family_declaration(self):
        f = parse_formula('(join [x=1 bound=2] :lower-bound-only (const 0) (dhat x x))')
        self.assertEqual(f.family.declared, ModulusVector({'x': 1}, 2))
        self.assertTrue(f.family.lower_bound_only)
        self.assertEqual(len(f.family.members), 2)

    def test_family_needs_bound_and_members(self):
        with self.assertRaises(FormulaSyntaxError):
            parse_formula('(join [x=1] (const 0))')
        with self.assertRaises(FormulaSyntaxError):
            parse_formula('(meet [bound=1])')

    def test_duplicate_declaration_keys(self):
        with self.assertRaises(FormulaSyntaxError) as ctx:
            parse_formula('(join [bound=1 x=1 x=2] (dhat x x))')
        self.assertEqual(ctx.exception.position, 19)
        with self.assertRaises(FormulaSyntaxError):
            parse_formula('(join [bound=1 bound=2] (const 0))')

    def test_bound_is_reserved(self):
        with self.assertRaises(FormulaSyntaxError):
            parse_formula('(sup bound (dhat bound bound))')
        with self.assertRaises(FormulaSyntaxError):
            parse_formula('(dhat x bound)')


class PrintFormulaTests(SimpleTestCase):
    def test_constant(self):
        self.assertEqual(print_formula(Const(0)), '(const 0/1)')

    def test_quantifier(self):
        self.assertEqual(print_formula(Sup('x', Dist('x', 'x'))), '(sup x (dhat x x))')

    def test_family_canonical_order(self):
        f = join(Const(0), Const(F(1, 2)), declared=ModulusVector({'y': 1, 'x': 2}, 1), lower_bound_only=True)
        self.assertEqual(
            print_formula(f),
            '(join [bound=1/1 x=2/1 y=1/1] :lower-bound-only (const 0/1) (const 1/2))',
        )

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=500, deadline=None)
    def test_round_trip(self, seed):
        f = random_formula(random.Random(seed), depth=4, diameter_bound=F(2), lower_bound_only=True)
        text = print_formula(f)
        parsed = parse_formula(text, SAMPLE_SIGNATURE)
        self.assertEqual(parsed, f)
        self.assertEqual(print_formula(parsed), text)


class InferModulusTests(SimpleTestCase):
    def test_truncated_distance(self):
        self.assertEqual(infer_modulus(DHAT_XY), ModulusVector({'x': 1, 'y': 1}, 1))

    def test_scale(self):
        self.assertEqual(infer_modulus(Scale(3, DHAT_XY)), ModulusVector({'x': 3, 'y': 3}, 3))

    def test_max_is_pointwise(self):
        f = Max(Scale(2, Dist('x', 'z')), DHAT_XY)
        self.assertEqual(infer_modulus(f), ModulusVector({'x': 2, 'y': 1, 'z': 2}, 2))

    def test_quantifier_drops_variable(self):
        self.assertEqual(infer_modulus(Sup('y', DHAT_XY)), ModulusVector({'x': 1}, 1))

    def test_intervals(self):
        self.assertEqual(infer_modulus(Sub(Const(0), DHAT_XY)).value_bound, 1)
        self.assertEqual(infer_modulus(Add(DHAT_XY, Const(-3))).value_bound, 3)
        self.assertEqual(infer_modulus(Abs(Sub(DHAT_XY, Const(F(1, 2))))).value_bound, F(1, 2))

    def test_atoms_use_declared_moduli(self):
        modulus = infer_modulus(Atom('R', ('x', 'x')), SAMPLE_SIGNATURE)
        self.assertEqual(modulus, ModulusVector({'x': 2}, 1))
        with self.assertRaises(UnknownPredicate):
            infer_modulus(Atom('R', ('x', 'x')))

    def test_raw_distance_needs_diameter(self):
        raw = Dist('x', 'y', truncated=False)
        with self.assertRaises(IllFormed):
            infer_modulus(raw)
        self.assertEqual(infer_modulus(raw, diameter_bound=3), ModulusVector({'x': 3, 'y': 3}, 3))
        self.assertEqual(infer_modulus(raw, diameter_bound=F(1, 2)), ModulusVector({'x': 1, 'y': 1}, F(1, 2)))

    def test_family_uses_declaration(self):
        declared = ModulusVector({'x': 5}, 7)
        self.assertEqual(infer_modulus(join(Dist('x', 'x'), declared=declared)), declared)

    def test_member_above_declaration(self):
        f = join(DHAT_XY, Scale(2, DHAT_XY), declared=ModulusVector({'x': 1, 'y': 1}, 2))
        with self.assertRaises(ModulusExceedsDeclared) as ctx:
            infer_modulus(f)
        self.assertEqual(ctx.exception.index, 1)


class CheckWellformedTests(SimpleTestCase):
    def test_member_index_reported(self):
        f = join(DHAT_XY, Scale(2, DHAT_XY), declared=ModulusVector({'x': 1, 'y': 1}, 1))
        report = check_wellformed(f)
        self.assertFalse(report.valid)
        self.assertIsInstance(report.errors[0], ModulusExceedsDeclared)
        self.assertEqual(report.errors[0].index, 1)

    def test_constant_family(self):
        report = check_wellformed(join(Const(0), Const(F(1, 2))))
        self.assertTrue(report.valid)
        self.assertEqual(report.modulus.value_bound, 1)

    def test_unbound_variable(self):
        report = check_wellformed(Dist('x', 'y'), free={'x'})
        self.assertIsInstance(report.errors[0], UnboundVariable)
        with self.assertRaises(UnboundVariable):
            report.raise_for_errors()

    def test_shadowing(self):
        report = check_wellformed(Add(DHAT_XY, Sup('x', DHAT_XY)))
        self.assertFalse(report.valid)
        report = check_wellformed(Sup('x', Inf('x', Dist('x', 'x'))))
        self.assertFalse(report.valid)

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=50, deadline=None)
    def test_sampled_formulas_are_wellformed(self, seed):
        f = random_formula(random.Random(seed), depth=4)
        report = check_wellformed(f, free={'x', 'y'}, signature=SAMPLE_SIGNATURE)
        self.assertTrue(report.valid, report.to_dict())


class SubstituteTests(SimpleTestCase):
    def test_renames_free_only(self):
        f = Add(DHAT_XY, Sup('y', DHAT_XY))
        renamed = substitute(f, {'x': 'a', 'y': 'b'})
        self.assertEqual(renamed, Add(Dist('a', 'b'), Sup('y', Dist('a', 'y'))))
        self.assertEqual(free_variables(renamed), {'a', 'b'})

    def test_capture(self):
        with self.assertRaises(IllFormed):
            substitute(Sup('y', DHAT_XY), {'x': 'y'})

    def test_family_declaration_renamed(self):
        f = join(DHAT_XY, declared=ModulusVector({'x': 1, 'y': 1}, 1))
        renamed = substitute(f, {'x': 'z0'})
        self.assertEqual(renamed.family.declared, ModulusVector({'z0': 1, 'y': 1}, 1))


class EvaluateTests(SimpleTestCase):
    def test_diameter_sentence_truncates(self):
        result = evaluate(DIAMETER_SENTENCE, three_points())
        self.assertEqual(result.value, 1)
        self.assertEqual(result.exactness, Exactness.EXACT)

    def test_raw_diameter(self):
        raw = sup_over(['x', 'y'], Dist('x', 'y', truncated=False))
        self.assertEqual(evaluate(raw, three_points()).value, 3)

    def test_inf_of_self_distance(self):
        self.assertEqual(evaluate(Inf('x', Dist('x', 'x')), three_points()).value, 0)

    def test_lower_bound_join(self):
        result = evaluate(join(Const(0), Const(F(1, 2)), lower_bound_only=True), three_points())
        self.assertEqual(result.value, F(1, 2))
        self.assertEqual(result.exactness, Exactness.LOWER_BOUND)

    def test_meet_and_flips(self):
        family = FormulaFamily((Const(0), Const(F(1, 2))), ModulusVector({}, 1), True)
        meet = Meet(family)
        self.assertEqual(evaluate(meet, three_points()).exactness, Exactness.UPPER_BOUND)
        self.assertEqual(evaluate(meet, three_points()).value, 0)
        negated = Sub(Const(0), Join(family))
        self.assertEqual(evaluate(negated, three_points()).exactness, Exactness.UPPER_BOUND)
        mixed = Add(Join(family), meet)
        self.assertEqual(evaluate(mixed, three_points()).exactness, Exactness.APPROXIMATE)

    def test_environment(self):
        code = three_points()
        self.assertEqual(evaluate(Dist('x', 'y', truncated=False), code, {'x': 1, 'y': 2}).value, 2)
        self.assertEqual(evaluate(Sup('y', DHAT_XY), code, {'x': 1}).value, 1)
        with self.assertRaises(UnboundVariable):
            evaluate(DHAT_XY, code, {'x': 0})
        with self.assertRaises(IndexOutOfRange):
            evaluate(DHAT_XY, code, {'x': 0, 'y': 3})

    def test_predicates(self):
        code = random_structure(random.Random(4), 3)
        interpreter = Interpreter(code)
        for i in range(3):
            for j in range(3):
                self.assertEqual(
                    interpreter.value(Atom('R', ('x', 'y')), {'x': i, 'y': j}),
                    code.value('R', (i, j)),
                )
        top = interpreter.value(sup_over(['x'], Atom('P', ('x',))))
        self.assertEqual(top, max(code.pred_tables['P']))

    def test_shared_subtrees_are_reused(self):
        shared = Sup('y', DHAT_XY)
        f = Max(shared, Min(shared, Const(1)))
        self.assertEqual(evaluate(f, three_points(), {'x': 0}).value, 1)

    def test_family_above_declared_bound(self):
        with self.assertRaises(ModulusExceedsDeclared):
            evaluate(parse_formula('(join [bound=1/2] (const 1))'), three_points())

    def test_family_above_declared_constants(self):
        with self.assertRaises(ModulusExceedsDeclared):
            evaluate(parse_formula('(join [bound=1] (dhat x y))'), three_points(), {'x': 0, 'y': 1})

    def test_rebinding_quantifier(self):
        with self.assertRaises(IllFormed):
            evaluate(parse_formula('(sup x (inf x (dhat x x)))'), three_points())
        with self.assertRaises(IllFormed):
            evaluate(Max(DHAT_XY, Sup('x', Const(0))), three_points(), {'x': 0, 'y': 1})

    def test_raw_distance_checked_against_diameter(self):
        member = Dist('x', 'y', truncated=False)
        fits = join(member, declared=ModulusVector({'x': 3, 'y': 3}, 3))
        self.assertEqual(evaluate(fits, three_points(), {'x': 0, 'y': 2}).value, 3)
        tight = join(member, declared=ModulusVector({'x': 2, 'y': 2}, 2))
        with self.assertRaises(ModulusExceedsDeclared):
            evaluate(tight, three_points(), {'x': 0, 'y': 2})

    def test_unknown_predicate(self):
        with self.assertRaises(UnknownPredicate):
            evaluate(Atom('P', ('x',)), three_points(), {'x': 0})

    def test_check_returns_modulus(self):
        interpreter = Interpreter(three_points())
        modulus = interpreter.check(Scale(2, DHAT_XY))
        self.assertEqual(modulus.constant('x'), 2)
        self.assertEqual(modulus.value_bound, 2)

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=40, deadline=None)
    def test_join_prefix_monotone(self, seed):
        rng = random.Random(seed)
        code = random_structure(rng, rng.randint(1, 4))
        members = [random_formula(rng, ('x',), depth=2) for _ in range(4)]
        declared = FormulaSampler(rng).declaration(members)
        interpreter = Interpreter(code)
        env = {'x': rng.randrange(code.size)}
        joins, meets = [], []
        for length in range(1, 5):
            family = FormulaFamily(tuple(members[:length]), declared, True)
            joins.append(interpreter.value(Join(family), env))
            meets.append(interpreter.value(Meet(family), env))
        self.assertEqual(joins, sorted(joins))
        self.assertEqual(meets, sorted(meets, reverse=True))

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=40, deadline=None)
    def test_isomorphism_invariance(self, seed):
        rng = random.Random(seed)
        code = random_structure(rng, rng.randint(1, 4))
        copy, sigma = random_isomorphic_copy(rng, code)
        f = random_formula(rng, ('x', 'y'), depth=3, diameter_bound=F(3))
        env = {'x': rng.randrange(code.size), 'y': rng.randrange(code.size)}
        moved = {v: sigma[i] for v, i in env.items()}
        self.assertEqual(evaluate(f, code, env).value, evaluate(f, copy, moved).value)


class LipschitzAuditTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        rng = random.Random(2024)
        cls.corpus = [random_structure(rng, rng.randint(1, 4)) for _ in range(10)]

    def test_truncated_distance(self):
        code = three_points()
        report = lipschitz_audit(DHAT_XY, code)
        self.assertTrue(report.valid)
        self.assertEqual(report.checked_pairs, 36)
        x_moves = Interpreter(code)
        for i in range(3):
            for j in range(3):
                delta = abs(x_moves.value(DHAT_XY, {'x': i, 'y': 0}) - x_moves.value(DHAT_XY, {'x': j, 'y': 0}))
                self.assertLessEqual(delta, code.dhat(i, j))

    def test_scaled(self):
        report = lipschitz_audit(Scale(3, DHAT_XY), three_points())
        self.assertTrue(report.valid)
        self.assertEqual(report.modulus.constant('x'), 3)

    def test_budget(self):
        f = Add(DHAT_XY, Dist('z', 'w'))
        with self.assertRaises(BudgetExceeded):
            lipschitz_audit(f, three_points())

    def test_needs_exact_families(self):
        with self.assertRaises(IllFormed):
            lipschitz_audit(join(Const(0), lower_bound_only=True), three_points())

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=100, deadline=None)
    def test_inference_is_sound(self, seed):
        f = random_formula(random.Random(seed), ('x', 'y'), depth=3, diameter_bound=F(3))
        for code in self.corpus:
            report = lipschitz_audit(f, code)
            self.assertTrue(report.valid, (print_formula(f), report.to_dict()))
