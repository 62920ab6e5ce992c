"""
Brute-force value of the Vaught transform A^{*k}(p, u).

Usage:
    python manage.py astar code.json structure.json -k 2 -u 0 1
"""

from cli.runconfig import CommandOutcome, UsageError, WorkbenchCommand
from structures.io import load_quotiented_structure
from structures.rationals import format_rational
from vaught.codes import load_borel_code
from vaught.oracle import a_star_k_oracle


class Command(WorkbenchCommand):
    help = 'Evaluate A^{*k}(p, u) by exhaustive enumeration'
    input_arguments = ['code', 'structure']

    def add_inputs(self, parser):
        parser.add_argument('code', type=str, help='Path to a Borel code JSON file')
        parser.add_argument('structure', type=str, help='Path to a structure JSON file')
        parser.add_argument('-k', type=int, required=True, help='Length of u')
        parser.add_argument('-u', type=int, nargs='*', default=[], help='Point indices u_0 .. u_{k-1}')

    def run(self, config, options):
        k, u = options['k'], tuple(options['u'])
        if len(u) != k:
            raise UsageError(f"-u needs {k} indices, got {len(u)}", k=k, u=u)
        structure = load_quotiented_structure(options['structure'])
        p = structure.code
        code = load_borel_code(options['code'], p.signature)
        value = a_star_k_oracle(code, p, k, tuple(structure.point(i) for i in u), tuple_budget=config.tuple_budget)
        text = format_rational(value)
        return CommandOutcome({'k': k, 'u': list(u), 'value': text}, text)
