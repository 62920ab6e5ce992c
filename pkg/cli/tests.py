import json
import os
import random
import tempfile
from fractions import Fraction as F
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from formulas.grammar import parse_formula, print_formula
from formulas.nodes import Atom
from scott_gh.sentences import scott_formula
from scott_gh.spaces import FiniteSpace
from structures.codes import StructureCode
from structures.io import dump_structure
from structures.sampling import (
    EMPTY_SIGNATURE,
    SAMPLE_SIGNATURE,
    random_isomorphic_copy,
    random_metric_space,
    random_structure,
)
from synthesis.lowering import synthesize
from vaught.codes import Basic, constant_code, diameter_code, dump_borel_code

from .management.commands.verify_suite import gh_agreement

DIAMETER_SENTENCE = '(sup x (sup y (dhat x y)))'


def two_points(d):
    return StructureCode(EMPTY_SIGNATURE, 2, ((0, d), (d, 0)))


POINT = StructureCode(EMPTY_SIGNATURE, 1, ((0,),))
TRIANGLE_VIOLATION = StructureCode(EMPTY_SIGNATURE, 3, ((0, 1, 3), (1, 0, 1), (3, 1, 0)))
DUPLICATED = StructureCode(EMPTY_SIGNATURE, 3, ((0, 0, F(1, 2)), (0, 0, F(1, 2)), (F(1, 2), F(1, 2), 0)))


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def structure_file(self, name, code):
        path = self.path(name)
        dump_structure(code, path)
        return path

    def code_file(self, name, code):
        path = self.path(name)
        dump_borel_code(code, path)
        return path

    def run_command(self, *args):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err)
        return out.getvalue().strip()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(*args)
        self.assertEqual(ctx.exception.returncode, code)


class ValidateCommandTests(CommandTestCase):
    def test_valid(self):
        path = self.structure_file('a.json', random_structure(random.Random(1), 3))
        self.assertEqual(self.run_command('validate', path), 'valid (3 points)')

    def test_triangle_violation(self):
        bad = StructureCode(EMPTY_SIGNATURE, 3, ((0, 1, 3), (1, 0, 1), (3, 1, 0)))
        path = self.structure_file('bad.json', bad)
        self.assertExitCode(1, 'validate', path)

    def test_json_report(self):
        bad = StructureCode(EMPTY_SIGNATURE, 2, ((0, 1), (2, 0)))
        path = self.structure_file('bad.json', bad)
        out = StringIO()
        with self.assertRaises(CommandError):
            call_command('validate', path, '--format', 'json', stdout=out, stderr=StringIO())
        report = json.loads(out.getvalue())
        self.assertFalse(report['valid'])
        self.assertEqual(report['errors'][0]['code'], 'ASYMMETRIC_DISTANCE')

    def test_missing_file(self):
        self.assertExitCode(2, 'validate', self.path('missing.json'))

    def test_unreadable_file(self):
        path = self.path('junk.json')
        with open(path, 'w') as f:
            f.write('{not json')
        self.assertExitCode(2, 'validate', path)


class EvalCommandTests(CommandTestCase):
    def test_diameter_is_truncated(self):
        path = self.structure_file('p.json', two_points(3))
        self.assertEqual(self.run_command('eval', DIAMETER_SENTENCE, path), '1/1')

    def test_env(self):
        path = self.structure_file('p.json', two_points(F(1, 2)))
        self.assertEqual(self.run_command('eval', '(dhat x y)', path, '--env', 'x=0', 'y=1'), '1/2')

    def test_json(self):
        path = self.structure_file('p.json', two_points(F(1, 2)))
        output = self.run_command('eval', DIAMETER_SENTENCE, path, '--format', 'json')
        self.assertEqual(json.loads(output), {'value': '1/2', 'exactness': 'exact'})

    def test_usage_errors(self):
        path = self.structure_file('p.json', two_points(1))
        self.assertExitCode(2, 'eval', '(dhat x y)', path, '--env', 'x=0', 'y')
        self.assertExitCode(2, 'eval', '(dhat x y', path)
        self.assertExitCode(2, 'eval', '(dhat x y)', path, '--env', 'x=0', 'y=5')

    def test_invalid_structure(self):
        path = self.structure_file('bad.json', TRIANGLE_VIOLATION)
        self.assertExitCode(1, 'eval', DIAMETER_SENTENCE, path)

    def test_duplicate_points_are_merged(self):
        path = self.structure_file('dup.json', DUPLICATED)
        self.assertEqual(self.run_command('eval', '(dhat x y)', path, '--env', 'x=1', 'y=2'), '1/2')
        self.assertEqual(self.run_command('eval', '(dhat x y)', path, '--env', 'x=0', 'y=1'), '0/1')

    def test_ill_formed_formula(self):
        path = self.structure_file('p.json', two_points(1))
        self.assertExitCode(2, 'eval', '(join [bound=1/2] (const 1))', path)
        self.assertExitCode(2, 'eval', '(sup x (inf x (dhat x x)))', path)


class SynthesizeCommandTests(CommandTestCase):
    def test_verify_diameter_code(self):
        code = self.code_file('diam.json', diameter_code(6))
        rng = random.Random(3)
        paths = [self.structure_file(f"s{i}.json", random_structure(rng, 3)) for i in range(3)]
        self.assertEqual(self.run_command('synthesize', code, '-k', '0', '--verify', *paths), '3/3 equal')

    def test_prints_formula(self):
        code = self.code_file('c.json', constant_code(F(1, 3)))
        output = self.run_command('synthesize', code, '-k', '1')
        self.assertEqual(output, '(const 1/3)')

    def test_output_file(self):
        code = self.code_file('c.json', constant_code(F(1, 3)))
        target = self.path('out.json')
        self.assertEqual(self.run_command('synthesize', code, '--format', 'json', '--output', target), '')
        with open(target) as f:
            self.assertEqual(json.load(f), {'k': 0, 'formula': '(const 1/3)'})

    def test_predicate_leaf_needs_signature(self):
        leaf = Basic(Atom('P', ('z0',)), 1)
        code = self.code_file('p.json', leaf)
        path = self.structure_file('s.json', random_structure(random.Random(4), 3))
        output = self.run_command('synthesize', code, '-k', '1', '--signature', path)
        self.assertEqual(output, print_formula(synthesize(leaf, 1, signature=SAMPLE_SIGNATURE)))
        self.assertExitCode(2, 'synthesize', code, '-k', '1')

    def test_verify_rejects_invalid_structure(self):
        code = self.code_file('diam.json', diameter_code(6))
        path = self.structure_file('bad.json', TRIANGLE_VIOLATION)
        self.assertExitCode(1, 'synthesize', code, '--verify', path)


class AstarCommandTests(CommandTestCase):
    def test_constant(self):
        code = self.code_file('c.json', constant_code(F(1, 3)))
        path = self.structure_file('p.json', two_points(1))
        self.assertEqual(self.run_command('astar', code, path, '-k', '2', '-u', '0', '1'), '1/3')

    def test_wrong_u_length(self):
        code = self.code_file('c.json', constant_code(F(1, 3)))
        path = self.structure_file('p.json', two_points(1))
        self.assertExitCode(2, 'astar', code, path, '-k', '2', '-u', '0')

    def test_budget(self):
        code = self.code_file('diam.json', diameter_code(6))
        path = self.structure_file('p.json', random_structure(random.Random(2), 4))
        self.assertExitCode(2, 'astar', code, path, '-k', '0', '--budget', '10')

    def test_invalid_structure(self):
        code = self.code_file('c.json', constant_code(F(1, 3)))
        path = self.structure_file('bad.json', TRIANGLE_VIOLATION)
        self.assertExitCode(1, 'astar', code, path, '-k', '0')

    def test_u_indexes_file_points(self):
        code = self.code_file('diam.json', diameter_code(6))
        path = self.structure_file('dup.json', DUPLICATED)
        self.assertEqual(self.run_command('astar', code, path, '-k', '2', '-u', '0', '2'), '1/2')
        self.assertExitCode(2, 'astar', code, path, '-k', '1', '-u', '3')


class GHRankCommandTests(CommandTestCase):
    def test_identical_files(self):
        path = self.structure_file('x.json', random_metric_space(random.Random(5), 3))
        self.assertEqual(self.run_command('gh_rank', path, path), '0/1')

    def test_cross_check(self):
        first = self.structure_file('x.json', StructureCode(EMPTY_SIGNATURE, 1, ((0,),)))
        second = self.structure_file('y.json', two_points(F(2, 3)))
        output = json.loads(self.run_command('gh_rank', first, second, '--cross-check', '--format', 'json'))
        self.assertEqual(output['value'], '1/3')
        self.assertEqual(output['scale_factor'], '1/1')
        self.assertEqual(output['cross_check'], {'bruteforce': '1/3', 'equal': True})

    def test_alpha_ceiling(self):
        first = self.structure_file('x.json', StructureCode(EMPTY_SIGNATURE, 1, ((0,),)))
        second = self.structure_file('y.json', two_points(F(2, 3)))
        self.assertExitCode(2, 'gh_rank', first, second, '--alpha-ceiling', '0')

    def test_degenerate_space(self):
        path = self.structure_file('x.json', two_points(0))
        self.assertExitCode(1, 'gh_rank', path, path)


class ScottFormulaCommandTests(CommandTestCase):
    def test_round_trip(self):
        code = random_metric_space(random.Random(8), 3)
        path = self.structure_file('x.json', code)
        output = self.run_command('scott_formula', path, '--alpha', '1', '-n', '1', '-a', '2')
        self.assertEqual(parse_formula(output), scott_formula(FiniteSpace.from_structure(code), 1, 1, (2,)))

    def test_anchor_length(self):
        path = self.structure_file('x.json', two_points(F(1, 2)))
        self.assertExitCode(2, 'scott_formula', path, '--alpha', '1', '-n', '2', '-a', '0')


class RankTableCommandTests(CommandTestCase):
    def test_csv(self):
        first = self.structure_file('x.json', two_points(F(1, 2)))
        second = self.structure_file('y.json', StructureCode(EMPTY_SIGNATURE, 1, ((0,),)))
        lines = self.run_command('rank_table', first, second, '--alpha', '1', '-n', '1').splitlines()
        self.assertEqual(lines[0], 'alpha,n,a,b,value')
        self.assertEqual(len(lines), 1 + 2 * 3)


class IsoCheckCommandTests(CommandTestCase):
    def test_relabelled_copy(self):
        rng = random.Random(6)
        code = random_structure(rng, 4)
        copy, _ = random_isomorphic_copy(rng, code)
        first, second = self.structure_file('a.json', code), self.structure_file('b.json', copy)
        output = json.loads(self.run_command('iso_check', first, second, '--format', 'json'))
        self.assertTrue(output['isomorphic'])

    def test_different(self):
        first = self.structure_file('a.json', two_points(1))
        second = self.structure_file('b.json', two_points(F(1, 2)))
        self.assertExitCode(1, 'iso_check', first, second)

    def test_zero_distance_duplicate(self):
        first = self.structure_file('a.json', two_points(0))
        second = self.structure_file('b.json', POINT)
        self.assertEqual(self.run_command('iso_check', first, second), 'isomorphic [0]')

    def test_invalid_structure(self):
        first = self.structure_file('a.json', TRIANGLE_VIOLATION)
        self.assertExitCode(1, 'iso_check', first, first)


class VerifySuiteCommandTests(CommandTestCase):
    ARGS = ('verify_suite', '--seed', '11', '--codes', '4', '--structures', '3', '--spaces', '4',
            '--format', 'json')

    def test_deterministic(self):
        first = self.run_command(*self.ARGS)
        second = self.run_command(*self.ARGS)
        self.assertEqual(first, second)
        report = json.loads(first)
        self.assertEqual(report['seed'], 11)
        for name in ('synthesis', 'invariance', 'gromov_hausdorff'):
            self.assertEqual(report[name]['equal'], report[name]['total'])
        self.assertEqual(report['gromov_hausdorff']['total'], 10)

    def test_bad_sizes(self):
        self.assertExitCode(2, 'verify_suite', '--seed', '1', '--codes', '0')

    def test_gh_agreement_in_rescaled_units(self):
        spaces = [FiniteSpace.from_structure(two_points(3)), FiniteSpace.from_structure(POINT)]
        self.assertEqual(gh_agreement(spaces), [True, True, True])
