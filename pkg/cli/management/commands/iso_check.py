"""
Exact isomorphism test between two structure codes.

Usage:
    python manage.py iso_check a.json b.json
"""

from cli.runconfig import CommandOutcome, WorkbenchCommand
from structures.codes import iso_check
from structures.io import load_quotiented_structure


class Command(WorkbenchCommand):
    help = 'Decide whether two structure codes are isomorphic'
    input_arguments = ['first', 'second']

    def add_inputs(self, parser):
        parser.add_argument('first', type=str, help='Path to a structure JSON file')
        parser.add_argument('second', type=str, help='Path to a structure JSON file')

    def run(self, config, options):
        first = load_quotiented_structure(options['first']).code
        second = load_quotiented_structure(options['second']).code
        result = iso_check(first, second)
        bijection = list(result.bijection) if result.bijection is not None else None
        payload = {'isomorphic': result.isomorphic, 'bijection': bijection}
        if result.isomorphic:
            return CommandOutcome(payload, f"isomorphic {bijection}")
        return CommandOutcome(payload, "not isomorphic", ok=False, failure='not isomorphic')
