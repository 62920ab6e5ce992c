"""
Write the back-and-forth rank table of two spaces as CSV.

Usage:
    python manage.py rank_table x.json y.json --alpha 3 -n 2
    python manage.py rank_table x.json y.json --alpha 3 -n 2 --output ranks.csv
"""

import io

from cli.runconfig import CommandOutcome, UsageError, WorkbenchCommand
from scott_gh.ranks import rank_table
from scott_gh.spaces import load_space


class Command(WorkbenchCommand):
    help = 'Tabulate r_{alpha,n}(a, b) (columns alpha, n, a, b, value)'
    input_arguments = ['first', 'second']

    def add_inputs(self, parser):
        parser.add_argument('first', type=str, help='Path to a structure JSON file')
        parser.add_argument('second', type=str, help='Path to a structure JSON file')
        parser.add_argument('--alpha', type=int, required=True, help='Highest stage')
        parser.add_argument('-n', type=int, default=1, help='Longest tuple length')

    def run(self, config, options):
        alpha, n = options['alpha'], options['n']
        if alpha < 0 or n < 0:
            raise UsageError("--alpha and -n must be nonnegative")
        if alpha > config.alpha_ceiling:
            raise UsageError(f"--alpha exceeds the ceiling {config.alpha_ceiling}")
        X, Y = load_space(options['first']), load_space(options['second'])
        table = rank_table(X, Y, alpha, n, tuple_budget=config.tuple_budget)

        stream = io.StringIO()
        table.write_csv(stream)
        payload = {'alpha_max': alpha, 'n_max': n, 'rows': list(table.rows())}
        return CommandOutcome(payload, stream.getvalue().rstrip('\n'))
