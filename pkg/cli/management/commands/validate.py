"""
Validate a structure code file.

Usage:
    python manage.py validate structure.json
    python manage.py validate structure.json --format json
"""

from cli.runconfig import CommandOutcome, WorkbenchCommand
from structures.codes import validate_structure, zero_distance_classes
from structures.io import load_structure


class Command(WorkbenchCommand):
    help = 'Check the pseudo-metric, modulus and bound invariants of a structure code'
    input_arguments = ['structure']

    def add_inputs(self, parser):
        parser.add_argument('structure', type=str, help='Path to a structure JSON file')

    def run(self, config, options):
        code = load_structure(options['structure'])
        report = validate_structure(code)
        payload = report.to_dict()
        payload['size'] = code.size
        payload['zero_distance_classes'] = [list(c) for c in zero_distance_classes(code) if len(c) > 1]

        if report.valid:
            text = f"valid ({code.size} points)"
            return CommandOutcome(payload, text)
        error = report.errors[0]
        return CommandOutcome(payload, f"invalid: {error}", ok=False, failure=error.code)
