"""
Emit the finite-rank Scott-style formula of a finite metric space.

Usage:
    python manage.py scott_formula space.json --alpha 2 -n 0
    python manage.py scott_formula space.json --alpha 1 -n 2 -a 0 1
"""

from cli.runconfig import CommandOutcome, UsageError, WorkbenchCommand
from formulas.grammar import print_formula
from scott_gh.sentences import scott_formula
from scott_gh.spaces import load_space


class Command(WorkbenchCommand):
    help = 'Print psi_{alpha,n}(a), whose value at b on q is the rank r_{alpha,n}(a, b)'
    input_arguments = ['space']

    def add_inputs(self, parser):
        parser.add_argument('space', type=str, help='Path to a structure JSON file')
        parser.add_argument('--alpha', type=int, required=True, help='Rank stage')
        parser.add_argument('-n', type=int, default=0, help='Number of free variables')
        parser.add_argument('-a', type=int, nargs='*', help='Anchor tuple in the space (default all 0)')

    def run(self, config, options):
        alpha, n = options['alpha'], options['n']
        if alpha < 0 or n < 0:
            raise UsageError("--alpha and -n must be nonnegative")
        if alpha > config.alpha_ceiling:
            raise UsageError(f"--alpha exceeds the ceiling {config.alpha_ceiling}")
        a = tuple(options['a']) if options.get('a') is not None else (0,) * n
        X = load_space(options['space'])
        formula = scott_formula(X, alpha, n, a, node_budget=config.tuple_budget)
        text = print_formula(formula)
        return CommandOutcome({'alpha': alpha, 'n': n, 'a': list(a), 'formula': text}, text)
