"""
Gromov-Hausdorff distance through the stabilized back-and-forth rank.

Usage:
    python manage.py gh_rank x.json y.json
    python manage.py gh_rank x.json y.json --cross-check --format json
"""

from cli.runconfig import CommandOutcome, WorkbenchCommand
from scott_gh.ranks import GHResult, gh_cross_check, gh_rank
from scott_gh.spaces import load_space
from structures.rationals import format_rational


def describe(result: GHResult) -> str:
    text = format_rational(result.value)
    if result.scale_factor != 1:
        text += f" (scale factor {format_rational(result.scale_factor)})"
    return text


class Command(WorkbenchCommand):
    help = 'Compute d_GH of two finite metric spaces as the stabilized rank r_{alpha*,0}'
    input_arguments = ['first', 'second']

    def add_inputs(self, parser):
        parser.add_argument('first', type=str, help='Path to a structure JSON file')
        parser.add_argument('second', type=str, help='Path to a structure JSON file')
        parser.add_argument('--cross-check', action='store_true',
                            help='Compare with the correspondence search')

    def run(self, config, options):
        X, Y = load_space(options['first']), load_space(options['second'])
        if not options['cross_check']:
            result = gh_rank(X, Y, n_probe=config.n_probe, alpha_ceiling=config.alpha_ceiling)
            return CommandOutcome(result.to_dict(), describe(result))

        result, expected = gh_cross_check(X, Y, config.n_probe, config.alpha_ceiling)
        text = describe(result)
        agree = expected == result.value
        payload = result.to_dict()
        payload['cross_check'] = {'bruteforce': format_rational(expected), 'equal': agree}
        if agree:
            return CommandOutcome(payload, f"{text}\ncross-check: equal")
        message = f"cross-check: bruteforce gives {format_rational(expected)}"
        return CommandOutcome(payload, f"{text}\n{message}", ok=False, failure=message)
