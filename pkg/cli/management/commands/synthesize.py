"""
Lower a Borel code to a formula, optionally checking it against the oracle.

Usage:
    python manage.py synthesize code.json -k 2
    python manage.py synthesize code.json -k 1 --verify a.json b.json c.json
    python manage.py synthesize code.json --prefix 10 --format json
    python manage.py synthesize code.json -k 1 --signature a.json
"""

from cli.runconfig import CommandOutcome, UsageError, WorkbenchCommand
from formulas.grammar import print_formula
from structures.io import load_quotiented_structure, load_structure
from synthesis.lowering import synthesize
from synthesis.verification import verify_sweep
from vaught.codes import load_borel_code


class Command(WorkbenchCommand):
    help = 'Synthesize the formula phi_{A,k} of a Borel code'
    input_arguments = ['code', 'verify', 'signature']

    def add_inputs(self, parser):
        parser.add_argument('code', type=str, help='Path to a Borel code JSON file')
        parser.add_argument('-k', type=int, default=0, help='Number of free variables')
        parser.add_argument('--prefix', type=int, help='Uncertified prefix length for negation joins')
        parser.add_argument('--verify', nargs='+', metavar='STRUCTURE',
                            help='Structure files to check the formula on')
        parser.add_argument('--signature', metavar='STRUCTURE',
                            help='Structure file whose signature bounds predicate leaves')

    def run(self, config, options):
        k = options['k']
        if k < 0:
            raise UsageError("-k must be nonnegative")
        signature = None
        if options.get('signature'):
            signature = load_structure(options['signature']).signature
        code = load_borel_code(options['code'], signature)

        if not options.get('verify'):
            formula = synthesize(code, k, signature=signature, prefix=options.get('prefix'))
            text = print_formula(formula)
            return CommandOutcome({'k': k, 'formula': text}, text)

        structures = []
        for path in options['verify']:
            p = load_quotiented_structure(path).code
            report = verify_sweep([code], [p], ks=(k,), tuple_budget=config.tuple_budget)
            structures.append({
                'structure': path,
                'equal': report.valid,
                'instances': report.summary(),
                'mismatches': [r.to_dict() for r in report.mismatches()],
            })

        equal = sum(1 for s in structures if s['equal'])
        summary = f"{equal}/{len(structures)} equal"
        payload = {'k': k, 'equal': equal, 'total': len(structures), 'structures': structures}
        ok = equal == len(structures)
        return CommandOutcome(payload, summary, ok=ok, failure='' if ok else summary)
