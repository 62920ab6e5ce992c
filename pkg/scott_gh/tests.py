import io
import itertools
import random
from fractions import Fraction as F

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from formulas.analysis import free_variables
from formulas.interpreter import Interpreter
from formulas.nodes import QUANTIFIERS, Abs, Const, Dist, Scale, Sub, children
from structures.exceptions import BudgetExceeded, TriangleViolation
from structures.sampling import random_isomorphic_copy, random_metric_space

from .correspondences import delta_k, distortion, gh_bruteforce, optimal_correspondence
from .exceptions import DegenerateSpace, EmptySubspace, LengthMismatch, MissingStage, RankInvariantViolation
from .katetov import correspondence_function, katetov_check, katetov_extend, q_error
from .ranks import (
    BackAndForth, check_rank_invariants, continuous_scott_rank, gh_cross_check, gh_rank,
    lipschitz_witness, r0, rank_step, rank_table, stabilization_rank,
)
from .sentences import ScottFormulaBuilder, scott_formula, tuple_variable
from .spaces import FiniteSpace, rescale_pair

POINT = FiniteSpace(((0,),))


def two(d):
    return FiniteSpace(((0, d), (d, 0)))


def equilateral(size, d):
    return FiniteSpace(tuple(tuple(0 if i == j else d for j in range(size)) for i in range(size)))


def random_spaces(seed, count, max_size):
    rng = random.Random(seed)
    return [FiniteSpace.from_structure(random_metric_space(rng, 1 + i % max_size)) for i in range(count)]


def relabelled(rng, X):
    copy, _ = random_isomorphic_copy(rng, X.as_structure())
    return FiniteSpace.from_structure(copy)


def tuple_pairs(X, Y, n):
    for a in itertools.product(X.points, repeat=n):
        for b in itertools.product(Y.points, repeat=n):
            yield a, b


def has_quantifier(formula):
    seen, stack = set(), [formula]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, QUANTIFIERS):
            return True
        stack.extend(children(node))
    return False


SMALL = random_spaces(21, 6, 3) + [equilateral(3, F(1, 2))]


class FiniteSpaceTests(SimpleTestCase):
    def test_rejects_zero_distance(self):
        with self.assertRaises(DegenerateSpace):
            FiniteSpace(((0, 0), (0, 0)))

    def test_rejects_triangle_violation(self):
        with self.assertRaises(TriangleViolation):
            FiniteSpace(((0, 1, 3), (1, 0, 1), (3, 1, 0)))

    def test_rescale(self):
        X, Y, factor = rescale_pair(two(3), POINT)
        self.assertEqual(factor, F(1, 4))
        self.assertEqual(X.diameter, F(3, 4))
        small = two(F(1, 2))
        self.assertIs(rescale_pair(small, POINT)[0], small)


class BaseRankTests(SimpleTestCase):
    def test_same_tuple(self):
        X = equilateral(3, F(1, 2))
        self.assertEqual(r0(X, X, (0, 2, 1), (0, 2, 1)), 0)

    def test_distance_gap(self):
        self.assertEqual(r0(two(1), two(3), (0, 1), (0, 1)), 1)

    def test_empty_tuples(self):
        self.assertEqual(r0(two(1), two(3), (), ()), 0)

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatch):
            r0(two(1), two(1), (0,), ())

    def test_matches_game_base(self):
        for X, Y in itertools.product(SMALL[:4], repeat=2):
            game = BackAndForth(X, Y)
            for n in range(3):
                for a, b in tuple_pairs(X, Y, n):
                    self.assertEqual(game.value(0, a, b), r0(X, Y, a, b))


class RankStepTests(SimpleTestCase):
    def test_identity_tuples_stay_zero(self):
        for X in SMALL:
            game = BackAndForth(X, X)
            for alpha in range(4):
                for n in range(3):
                    for a in itertools.product(X.points, repeat=n):
                        self.assertEqual(game.value(alpha, a, a), 0)

    def test_singletons(self):
        game = BackAndForth(POINT, POINT)
        for alpha in range(3):
            self.assertEqual(game.value(alpha, (0, 0), (0, 0)), 0)

    def test_tuple_recursion_matches_table(self):
        for X, Y in itertools.product(SMALL[:5], repeat=2):
            table = rank_table(X, Y, alpha_max=3, n_max=2)
            for alpha in range(3):
                for n in range(2):
                    for (a, b), value in rank_step(table, alpha, n).items():
                        self.assertEqual(value, table.value(alpha + 1, a, b))

    def test_missing_stage(self):
        table = rank_table(two(F(1, 2)), POINT, alpha_max=1, n_max=2)
        with self.assertRaises(MissingStage):
            rank_step(table, 0, 2)
        with self.assertRaises(MissingStage):
            table.value(2, (), ())


class RankTableTests(SimpleTestCase):
    def test_budget(self):
        with self.assertRaises(BudgetExceeded):
            rank_table(equilateral(3, F(1, 2)), equilateral(3, F(1, 2)), 2, 4, tuple_budget=1000)
        with self.assertRaises(BudgetExceeded):
            BackAndForth(equilateral(3, F(1, 2)), equilateral(3, F(1, 2)), subset_budget=256)

    def test_invariants_hold_on_small_spaces(self):
        for X, Y in itertools.product(SMALL, repeat=2):
            game = BackAndForth(X, Y)
            top = game.stabilization() + 1
            check_rank_invariants(game, top)
            for alpha in range(top + 1):
                self.assertIsNone(lipschitz_witness(game, alpha))

    def test_corrupted_stage_breaks_lipschitz(self):
        X = FiniteSpace(((0, F(1, 8), 1), (F(1, 8), 0, 1), (1, 1, 0)))
        game = BackAndForth(X, POINT)
        self.assertEqual(game.value(1, (0,), (0,)), F(1, 2))
        corrupted = game.stage(1).copy()
        corrupted[game.mask_of((0,), (0,))] = game.levels.index(F(0))
        game.stages[1] = corrupted
        witness = lipschitz_witness(game, 1, n_max=1)
        self.assertEqual(witness['mask'], game.mask_of((0,), (0,)))
        self.assertEqual(witness['moved'], game.mask_of((1,), (0,)))
        with self.assertRaises(RankInvariantViolation) as ctx:
            check_rank_invariants(game, alpha_max=1, n_max=1)
        self.assertEqual(ctx.exception.witnesses['alpha'], 1)

    def test_corrupted_stage_decreases(self):
        X = FiniteSpace(((0, F(1, 8), 1), (F(1, 8), 0, 1), (1, 1, 0)))
        game = BackAndForth(X, POINT)
        both = game.mask_of((0, 1), (0, 0))
        self.assertEqual(game.value(0, (0, 1), (0, 0)), F(1, 16))
        corrupted = game.stage(1).copy()
        corrupted[both] = game.levels.index(F(0))
        game.stages[1] = corrupted
        with self.assertRaises(RankInvariantViolation) as ctx:
            check_rank_invariants(game, alpha_max=1, n_max=2)
        self.assertEqual(ctx.exception.witnesses['mask'], both)

    def test_self_pair_at_length_zero(self):
        for X in SMALL:
            table = rank_table(X, X, alpha_max=5, n_max=0)
            for alpha in range(6):
                self.assertEqual(table.value(alpha, (), ()), 0)

    def test_lemma_properties(self):
        for X, Y in itertools.product(SMALL, repeat=2):
            game = BackAndForth(X, Y)
            top = game.stabilization() + 1
            expected_levels = {abs(X.d(x, w) - Y.d(y, z)) / 2
                               for x in X.points for w in X.points
                               for y in Y.points for z in Y.points} | {F(0)}
            for alpha in range(top + 1):
                stage = game.stage(alpha)
                if alpha:
                    self.assertTrue(np.all(stage >= game.stage(alpha - 1)))
                self.assertLessEqual({game.levels[i] for i in np.unique(stage)}, expected_levels)
                for n in range(3):
                    for a, b in tuple_pairs(X, Y, n):
                        value = game.value(alpha, a, b)
                        for a2 in itertools.product(X.points, repeat=n):
                            moved = max((X.d(i, j) for i, j in zip(a, a2)), default=F(0))
                            self.assertLessEqual(abs(value - game.value(alpha, a2, b)), moved)
                        for b2 in itertools.product(Y.points, repeat=n):
                            moved = max((Y.d(i, j) for i, j in zip(b, b2)), default=F(0))
                            self.assertLessEqual(abs(value - game.value(alpha, a, b2)), moved)

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=40, deadline=None)
    def test_embedding_monotone(self, seed):
        rng = random.Random(seed)
        X, Y = rng.choice(SMALL), rng.choice(SMALL)
        game = BackAndForth(X, Y)
        n = rng.randint(0, 2)
        a = tuple(rng.randrange(X.size) for _ in range(n))
        b = tuple(rng.randrange(Y.size) for _ in range(n))
        pairs = list(zip(a, b)) + [(rng.randrange(X.size), rng.randrange(Y.size))
                                   for _ in range(rng.randint(0, 2))]
        rng.shuffle(pairs)
        c, d = tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)
        for alpha in range(4):
            self.assertLessEqual(game.value(alpha, a, b), game.value(alpha, c, d))

    def test_symmetry(self):
        for X, Y in itertools.product(SMALL[:5], repeat=2):
            forward, backward = BackAndForth(X, Y), BackAndForth(Y, X)
            for alpha in range(4):
                for n in range(3):
                    for a, b in tuple_pairs(X, Y, n):
                        self.assertEqual(forward.value(alpha, a, b), backward.value(alpha, b, a))

    def test_csv(self):
        table = rank_table(two(F(1, 2)), POINT, alpha_max=1, n_max=1)
        stream = io.StringIO()
        self.assertEqual(table.write_csv(stream), 2 * (1 + 2))
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], 'alpha,n,a,b,value')
        self.assertEqual(lines[1], '0,0,,,0/1')
        self.assertEqual(len(lines), 7)


class StabilizationTests(SimpleTestCase):
    def test_equilateral_is_stable_at_once(self):
        for size in (1, 2, 3):
            self.assertEqual(continuous_scott_rank(equilateral(size, F(1, 2))), 0)
        self.assertEqual(continuous_scott_rank(POINT), 0)

    def test_point_against_pair(self):
        self.assertGreaterEqual(stabilization_rank(POINT, two(F(2, 3))), 1)
        with self.assertRaises(BudgetExceeded):
            stabilization_rank(POINT, two(F(2, 3)), alpha_ceiling=0)

    def test_longer_tuples_agree(self):
        for X, Y in itertools.product(SMALL[2:], repeat=2):
            game = BackAndForth(X, Y)
            depth = X.size * Y.size
            alpha_star = game.stabilization()
            self.assertEqual(game.stabilization(depth + 1), alpha_star)
            self.assertEqual(game.value(alpha_star, (), ()), game.value(alpha_star + 3, (), ()))
        for X in SMALL:
            self.assertEqual(
                continuous_scott_rank(X), continuous_scott_rank(X, n_probe=X.size ** 2 + 1),
            )

    def test_isometric_copy(self):
        rng = random.Random(4)
        for X in SMALL:
            copy = relabelled(rng, X)
            alpha_star = stabilization_rank(X, copy)
            self.assertEqual(BackAndForth(X, copy).value(alpha_star, (), ()), 0)


class GromovHausdorffTests(SimpleTestCase):
    def test_point_against_pair(self):
        result = gh_rank(POINT, two(F(2, 3)))
        self.assertEqual(result.value, F(1, 3))
        self.assertEqual(result.to_dict(), {
            'value': '1/3', 'scale_factor': '1/1', 'alpha_star': result.alpha_star,
        })
        self.assertEqual(gh_bruteforce(POINT, two(F(2, 3))), F(1, 3))

    def test_rescaled(self):
        result = gh_rank(two(3), POINT)
        self.assertEqual(result.scale_factor, F(1, 4))
        self.assertEqual(result.value, F(3, 8))
        self.assertEqual(result.unscaled, gh_bruteforce(two(3), POINT))

    def test_cross_check_in_rescaled_units(self):
        result, expected = gh_cross_check(two(3), POINT)
        self.assertEqual(expected, F(3, 8))
        self.assertEqual(result.value, expected)
        self.assertNotEqual(gh_bruteforce(two(3), POINT), result.value)
        result, expected = gh_cross_check(two(F(2, 3)), POINT)
        self.assertEqual((result.value, expected), (F(1, 3), F(1, 3)))

    def test_identical(self):
        for X in SMALL:
            self.assertEqual(gh_rank(X, X).value, 0)
            self.assertEqual(gh_bruteforce(X, X), 0)

    def test_oracle_equivalence(self):
        spaces = random_spaces(33, 30, 4)
        for i, X in enumerate(spaces):
            for Y in spaces[i:]:
                expected = gh_bruteforce(X, Y)
                self.assertEqual(gh_rank(X, Y).value, expected)
                self.assertEqual(gh_bruteforce(Y, X), expected)

    def test_optimal_correspondence_is_total(self):
        for X, Y in itertools.product(SMALL, repeat=2):
            best = optimal_correspondence(X, Y)
            self.assertEqual({x for x, _ in best.pairs}, set(X.points))
            self.assertEqual({y for _, y in best.pairs}, set(Y.points))
            self.assertEqual(distortion(X, Y, best.pairs), best.distortion)

    def test_search_budget(self):
        with self.assertRaises(BudgetExceeded):
            gh_bruteforce(SMALL[2], SMALL[5], node_budget=1)


class DeltaTests(SimpleTestCase):
    def test_zero_length(self):
        for X, Y in itertools.product(SMALL[:4], repeat=2):
            self.assertEqual(delta_k(X, Y, (), ()), gh_bruteforce(X, Y))

    def test_same_tuple(self):
        X = SMALL[5]
        self.assertEqual(delta_k(X, X, (2, 0), (2, 0)), 0)

    def test_matches_stable_rank(self):
        for X, Y in itertools.product(SMALL, repeat=2):
            game = BackAndForth(X, Y)
            alpha_star = game.stabilization()
            for n in range(3):
                for a, b in tuple_pairs(X, Y, n):
                    self.assertEqual(delta_k(X, Y, a, b), game.value(alpha_star, a, b))

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatch):
            delta_k(POINT, POINT, (0,), (0, 0))


class KatetovTests(SimpleTestCase):
    def test_identity_function(self):
        X = SMALL[5]
        self.assertTrue(katetov_check(X.dist, X, X).valid)
        self.assertEqual(q_error(X.dist, X, X), 0)

    def test_large_constant(self):
        X, Y = SMALL[2], SMALL[4]
        c = max(X.diameter, Y.diameter)
        table = [[c] * Y.size for _ in X.points]
        self.assertTrue(katetov_check(table, X, Y).valid)
        self.assertEqual(q_error(table, X, Y), c)

    def test_zero_function_violates(self):
        report = katetov_check([[0], [0]], two(F(1, 2)), POINT)
        self.assertFalse(report.valid)
        self.assertEqual(report.errors[0].kind, 'triangle-x')
        self.assertEqual(report.errors[0].witness, (0, 1, 0))

    def test_singleton_extension(self):
        X, Y = SMALL[5], SMALL[2]
        extended = katetov_extend([[F(1, 4)]], X, Y, [1], [0])
        for x in X.points:
            for y in Y.points:
                self.assertEqual(extended[x][y], X.d(x, 1) + F(1, 4) + Y.d(0, y))

    def test_empty_subspace(self):
        with self.assertRaises(EmptySubspace):
            katetov_extend([], SMALL[2], SMALL[2], [], [0])

    def test_full_extension_is_identity(self):
        X, Y = SMALL[5], SMALL[4]
        best = optimal_correspondence(X, Y)
        f = correspondence_function(best.pairs, X, Y, best.distortion / 2)
        self.assertEqual(katetov_extend(f, X, Y, list(X.points), list(Y.points)), f)

    def test_optimal_correspondence_function(self):
        for X, Y in itertools.product(SMALL, repeat=2):
            best = optimal_correspondence(X, Y)
            f = correspondence_function(best.pairs, X, Y, best.distortion / 2)
            self.assertTrue(katetov_check(f, X, Y).valid)
            self.assertEqual(q_error(f, X, Y), gh_bruteforce(X, Y))

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=200, deadline=None)
    def test_random_extensions(self, seed):
        rng = random.Random(seed)
        X = FiniteSpace.from_structure(random_metric_space(rng, rng.randint(1, 4)))
        Y = FiniteSpace.from_structure(random_metric_space(rng, rng.randint(1, 4)))
        A0 = sorted(rng.sample(range(X.size), rng.randint(1, X.size)))
        B0 = sorted(rng.sample(range(Y.size), rng.randint(1, Y.size)))
        XA, YB = X.subspace(A0), Y.subspace(B0)
        pairs = {(a, rng.randrange(YB.size)) for a in XA.points}
        covered = {b for _, b in pairs}
        pairs |= {(rng.randrange(XA.size), b) for b in YB.points if b not in covered}
        pairs = sorted(pairs)
        c = distortion(XA, YB, pairs) / 2 + F(rng.randint(0, 2), 4)
        f0 = correspondence_function(pairs, XA, YB, c)
        self.assertTrue(katetov_check(f0, XA, YB).valid)

        extended = katetov_extend(f0, X, Y, A0, B0)
        self.assertTrue(katetov_check(extended, X, Y).valid, katetov_check(extended, X, Y).to_dict())
        for i, a in enumerate(A0):
            for j, b in enumerate(B0):
                self.assertEqual(extended[a][b], f0[i][j])
        self.assertGreaterEqual(q_error(extended, X, Y), gh_bruteforce(X, Y))


class ScottFormulaTests(SimpleTestCase):
    def test_base_transcription(self):
        X = SMALL[5]
        formula = scott_formula(X, 0, 2, (0, 2))
        self.assertEqual(
            formula,
            Scale(F(1, 2), Abs(Sub(Const(X.d(0, 2)), Dist('y0', 'y1', truncated=False)))),
        )
        self.assertFalse(has_quantifier(formula))
        self.assertEqual(scott_formula(X, 0, 1, (1,)), Const(0))

    def test_free_variables(self):
        formula = scott_formula(SMALL[5], 2, 2, (0, 1))
        self.assertEqual(free_variables(formula), {'y0', 'y1'})
        self.assertEqual(free_variables(scott_formula(SMALL[5], 3, 0, ())), frozenset())

    def test_argument_errors(self):
        with self.assertRaises(LengthMismatch):
            scott_formula(POINT, 1, 2, (0,))
        with self.assertRaises(BudgetExceeded):
            scott_formula(SMALL[5], 8, 0, (), node_budget=100)

    def test_vanishes_on_itself(self):
        X = SMALL[5]
        q = X.as_structure()
        interpreter = Interpreter(q)
        for a in itertools.product(X.points, repeat=2):
            env = {tuple_variable(i): v for i, v in enumerate(a)}
            self.assertEqual(interpreter.value(scott_formula(X, 2, 2, a), env), 0)

    def test_matches_rank_table(self):
        spaces = [POINT, two(F(1, 2))] + SMALL[1:3] + [SMALL[5]]
        for X, Q in itertools.product(spaces, repeat=2):
            builder = ScottFormulaBuilder(X)
            interpreter = Interpreter(Q.as_structure())
            game = BackAndForth(X, Q)
            for alpha in range(5):
                for n in range(3):
                    for a, b in tuple_pairs(X, Q, n):
                        formula = scott_formula(X, alpha, n, a, builder=builder)
                        env = {tuple_variable(i): v for i, v in enumerate(b)}
                        self.assertEqual(interpreter.value(formula, env), game.value(alpha, a, b))

    def test_sentence_at_stabilization(self):
        rng = random.Random(12)
        spaces = [POINT, two(F(1, 2)), two(F(1, 4)), equilateral(3, F(1, 2)), SMALL[5]]
        spaces.append(relabelled(rng, SMALL[5]))
        for X, Q in itertools.product(spaces, repeat=2):
            alpha = stabilization_rank(X, Q)
            sentence = scott_formula(X, alpha, 0, ())
            value = Interpreter(Q.as_structure()).value(sentence)
            self.assertEqual(value == 0, gh_bruteforce(X, Q) == 0)
            self.assertEqual(value, gh_bruteforce(X, Q))
