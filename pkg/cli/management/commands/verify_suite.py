"""
Seeded verification sweeps over generated corpora.

Runs three checks and reports "equal/total" for each:
  - synthesized formulas against the Vaught oracle (k = 0, 1, 2, all u)
  - synthesized sentences on pairs of isomorphic structures
  - stabilized back-and-forth ranks against the correspondence search

Usage:
    python manage.py verify_suite --seed 7
    python manage.py verify_suite --seed 7 --codes 50 --structures 20 --format json
"""

import itertools
import random

from cli.runconfig import CommandOutcome, UsageError, WorkbenchCommand
from formulas.interpreter import evaluate
from scott_gh.ranks import gh_cross_check
from scott_gh.spaces import FiniteSpace
from structures.sampling import random_isomorphic_copy, random_metric_space, random_structure
from synthesis.lowering import synthesize_sentence
from synthesis.verification import verify_sweep
from vaught.sampling import random_corpus


def tally(outcomes):
    outcomes = list(outcomes)
    return {'total': len(outcomes), 'equal': sum(1 for ok in outcomes if ok)}


def gh_agreement(spaces, n_probe=None, alpha_ceiling=None):
    """For every pair i <= j: does gh_rank agree with the correspondence search?"""
    outcomes = []
    for i, X in enumerate(spaces):
        for Y in spaces[i:]:
            result, expected = gh_cross_check(X, Y, n_probe, alpha_ceiling)
            outcomes.append(result.value == expected)
    return outcomes


class Command(WorkbenchCommand):
    help = 'Run the seeded synthesis, invariance and Gromov-Hausdorff sweeps'

    def add_inputs(self, parser):
        parser.add_argument('--seed', type=int, required=True, help='Seed for every generated corpus')
        parser.add_argument('--codes', type=int, default=12, help='Number of Borel codes')
        parser.add_argument('--structures', type=int, default=6, help='Number of structures (<= 4 points)')
        parser.add_argument('--spaces', type=int, default=8, help='Number of metric spaces (<= 4 points)')

    def run(self, config, options):
        if min(options['codes'], options['structures'], options['spaces']) < 1:
            raise UsageError("--codes, --structures and --spaces must be positive")
        rng = random.Random(options['seed'])
        codes = random_corpus(rng, options['codes'])
        structures = [random_structure(rng, 1 + i % 4) for i in range(options['structures'])]
        spaces = [
            FiniteSpace.from_structure(random_metric_space(rng, 1 + i % 4))
            for i in range(options['spaces'])
        ]

        sweep = verify_sweep(codes, structures, ks=(0, 1, 2), tuple_budget=config.tuple_budget)
        self.stderr.write(f"synthesis sweep: {sweep.summary()}")

        invariance = []
        for code, p in itertools.product(codes, structures):
            copy, _ = random_isomorphic_copy(rng, p)
            sentence = synthesize_sentence(code, structure=p)
            invariance.append(evaluate(sentence, p).value == evaluate(sentence, copy).value)

        gromov_hausdorff = gh_agreement(spaces, config.n_probe, config.alpha_ceiling)

        payload = {
            'seed': options['seed'],
            'synthesis': tally(r.equal for r in sweep.results),
            'invariance': tally(invariance),
            'gromov_hausdorff': tally(gromov_hausdorff),
        }
        lines = [
            f"{name}: {payload[name]['equal']}/{payload[name]['total']} equal"
            for name in ('synthesis', 'invariance', 'gromov_hausdorff')
        ]
        ok = all(payload[name]['equal'] == payload[name]['total']
                 for name in ('synthesis', 'invariance', 'gromov_hausdorff'))
        return CommandOutcome(payload, '\n'.join(lines), ok=ok, failure='' if ok else 'sweep mismatch')
