"""
Evaluate a formula on a structure code.

Usage:
    python manage.py eval "(sup x (sup y (dhat x y)))" structure.json
    python manage.py eval "(dhat x y)" structure.json --env x=0 y=1
    python manage.py eval formula.txt structure.json --format json
"""

import os

from cli.runconfig import CommandOutcome, UsageError, WorkbenchCommand
from formulas.grammar import parse_formula
from formulas.interpreter import Exactness, evaluate
from structures.io import load_quotiented_structure
from structures.rationals import format_rational


def parse_env(pairs):
    env = {}
    for item in pairs or []:
        name, sep, value = item.partition('=')
        if not sep or not name or not value.isdigit():
            raise UsageError(f"Bad --env entry {item!r}; expected VAR=INDEX", entry=item)
        env[name] = int(value)
    return env


class Command(WorkbenchCommand):
    help = 'Evaluate a formula (text or file) on a structure code'
    input_arguments = ['structure']

    def add_inputs(self, parser):
        parser.add_argument('formula', type=str, help='Formula text, or a file holding it')
        parser.add_argument('structure', type=str, help='Path to a structure JSON file')
        parser.add_argument('--env', nargs='*', default=[], help='Variable assignments VAR=INDEX')

    def run(self, config, options):
        text = options['formula']
        if os.path.isfile(text):
            with open(text, 'r', encoding='utf-8') as f:
                text = f.read()
        structure = load_quotiented_structure(options['structure'])
        formula = parse_formula(text, structure.code.signature)
        env = {name: structure.point(index) for name, index in parse_env(options['env']).items()}
        result = evaluate(formula, structure.code, env)

        value = format_rational(result.value)
        if result.exactness != Exactness.EXACT:
            value = f"{value} ({result.exactness.value})"
        return CommandOutcome(result.to_dict(), value)
